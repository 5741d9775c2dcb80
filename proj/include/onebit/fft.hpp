#ifndef ONEBIT_FFT_HPP
#define ONEBIT_FFT_HPP

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace onebit {

using cplx = std::complex<double>;

// Discrete Fourier transform of arbitrary length.
//
// Power-of-two sizes use an iterative radix-2 transform. Other sizes go
// through Bluestein's chirp-z identity, which rewrites the DFT as a circular
// convolution of power-of-two length >= 2n - 1. All tables are built in the
// constructor; transform() only touches caller-owned buffers, so one plan
// can be shared by many threads.
class FftPlan {
public:
    FftPlan() = default;

    explicit FftPlan(std::size_t n) : n_(n) {
        if (n == 0) throw std::invalid_argument("FftPlan: n must be >= 1");
        if (is_pow2(n)) {
            build_radix2(n, roots_);
            return;
        }
        m_ = 1;
        while (m_ < 2 * n - 1) m_ <<= 1;
        build_radix2(m_, roots_);
        chirp_.resize(n);
        // k^2 mod 2n keeps the angle argument exact for large k.
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t k2 = (static_cast<unsigned long long>(k) * k) % (2 * n);
            const double ang = std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
            chirp_[k] = std::polar(1.0, -ang);
        }
        kernel_.assign(m_, cplx{});
        kernel_[0] = std::conj(chirp_[0]);
        for (std::size_t k = 1; k < n; ++k) kernel_[k] = kernel_[m_ - k] = std::conj(chirp_[k]);
        radix2(kernel_, roots_, false);
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }

    /// In-place forward (inverse = false) or inverse DFT. The inverse
    /// includes the 1/n factor.
    void transform(std::vector<cplx>& a, bool inverse) const {
        if (a.size() != n_) throw std::invalid_argument("FftPlan: buffer length mismatch");
        if (chirp_.empty()) {
            radix2(a, roots_, inverse);
        } else {
            bluestein(a, inverse);
        }
        if (inverse) {
            const double s = 1.0 / static_cast<double>(n_);
            for (auto& v : a) v *= s;
        }
    }

    [[nodiscard]] std::vector<cplx> forward(std::span<const double> x) const {
        std::vector<cplx> a(x.begin(), x.end());
        transform(a, false);
        return a;
    }

private:
    static bool is_pow2(std::size_t n) { return (n & (n - 1)) == 0; }

    static void build_radix2(std::size_t n, std::vector<cplx>& roots) {
        roots.resize(n / 2 > 0 ? n / 2 : 1);
        for (std::size_t k = 0; k < roots.size(); ++k)
            roots[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
    }

    // Unnormalized; roots must have been built for a.size().
    static void radix2(std::vector<cplx>& a, const std::vector<cplx>& roots, bool inverse) {
        const std::size_t n = a.size();
        if (n == 1) return;
        for (std::size_t i = 1, j = 0; i < n; ++i) {
            std::size_t bit = n >> 1;
            for (; j & bit; bit >>= 1) j ^= bit;
            j ^= bit;
            if (i < j) std::swap(a[i], a[j]);
        }
        for (std::size_t len = 2; len <= n; len <<= 1) {
            const std::size_t half = len / 2;
            const std::size_t stride = n / len;
            for (std::size_t i = 0; i < n; i += len) {
                for (std::size_t k = 0; k < half; ++k) {
                    cplx w = roots[k * stride];
                    if (inverse) w = std::conj(w);
                    const cplx u = a[i + k];
                    const cplx v = a[i + k + half] * w;
                    a[i + k] = u + v;
                    a[i + k + half] = u - v;
                }
            }
        }
    }

    void bluestein(std::vector<cplx>& a, bool inverse) const {
        // Inverse DFT = conj(forward(conj(x))), before the 1/n factor.
        std::vector<cplx> b(m_, cplx{});
        for (std::size_t k = 0; k < n_; ++k) b[k] = (inverse ? std::conj(a[k]) : a[k]) * chirp_[k];
        radix2(b, roots_, false);
        for (std::size_t k = 0; k < m_; ++k) b[k] *= kernel_[k];
        radix2(b, roots_, true);
        const double s = 1.0 / static_cast<double>(m_);
        for (std::size_t k = 0; k < n_; ++k) {
            const cplx v = b[k] * s * chirp_[k];
            a[k] = inverse ? std::conj(v) : v;
        }
    }

    std::size_t n_ = 0;
    std::size_t m_ = 0;
    std::vector<cplx> roots_;
    std::vector<cplx> chirp_;
    std::vector<cplx> kernel_;
};

}  // namespace onebit

#endif  // ONEBIT_FFT_HPP
