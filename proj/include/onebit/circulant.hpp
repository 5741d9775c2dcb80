#ifndef ONEBIT_CIRCULANT_HPP
#define ONEBIT_CIRCULANT_HPP

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fft.hpp"

namespace onebit {

namespace detail {
inline void require_size(std::size_t got, std::size_t want, const char* what) {
    if (got != want)
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (got " + std::to_string(got) +
                                    ", expected " + std::to_string(want) + ")");
}
}  // namespace detail

/// Cached DFT of the generator together with the plan that produced it.
struct SpectralPlan {
    FftPlan fft;
    std::vector<cplx> generator_dft;
};

/// Randomly subsampled circulant operator A = R_I Γ_ξ.
///
/// Row j of Γ_ξ is (ξ_{(j-k) mod n})_k, so Γ_ξ z is the circular convolution
/// ξ ⊛ z. `rows` is the sorted selection I and `m_nominal` the expected
/// selection size m used for every 1/m normalization downstream.
///
/// Immutable after construction; all apply/adjoint calls are reentrant.
class CirculantOperator {
public:
    CirculantOperator(std::vector<double> generator, std::vector<std::size_t> rows, std::size_t m_nominal)
        : xi_(std::move(generator)), rows_(std::move(rows)), m_nominal_(m_nominal) {
        const std::size_t n = xi_.size();
        if (n == 0) throw std::invalid_argument("CirculantOperator: empty generator");
        for (double v : xi_)
            if (!std::isfinite(v)) throw std::invalid_argument("CirculantOperator: non-finite generator entry");
        if (m_nominal_ > n) throw std::invalid_argument("CirculantOperator: m_nominal > n");
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (rows_[i] >= n) throw std::invalid_argument("CirculantOperator: row index out of range");
            if (i > 0 && rows_[i] <= rows_[i - 1])
                throw std::invalid_argument("CirculantOperator: rows must be strictly increasing");
        }
        auto plan = std::make_shared<SpectralPlan>();
        plan->fft = FftPlan(n);
        plan->generator_dft = plan->fft.forward(xi_);
        plan_ = std::move(plan);
    }

    /// Full selection I = {0, ..., n-1} with m_nominal = n.
    static CirculantOperator full(std::vector<double> generator) {
        const std::size_t n = generator.size();
        std::vector<std::size_t> rows(n);
        for (std::size_t i = 0; i < n; ++i) rows[i] = i;
        return CirculantOperator(std::move(generator), std::move(rows), n);
    }

    [[nodiscard]] std::size_t n() const noexcept { return xi_.size(); }
    [[nodiscard]] std::size_t m_nominal() const noexcept { return m_nominal_; }
    [[nodiscard]] std::size_t realized_m() const noexcept { return rows_.size(); }
    [[nodiscard]] const std::vector<double>& generator() const noexcept { return xi_; }
    [[nodiscard]] const std::vector<std::size_t>& rows() const noexcept { return rows_; }
    [[nodiscard]] const SpectralPlan& spectral_plan() const noexcept { return *plan_; }

    /// Γ_ξ z via the spectral path.
    [[nodiscard]] std::vector<double> circ_apply(std::span<const double> z) const {
        detail::require_size(z.size(), n(), "circ_apply");
        return spectral_product(z, false);
    }

    /// Γ_ξ^T v (circular correlation) via the spectral path.
    [[nodiscard]] std::vector<double> circ_adjoint(std::span<const double> v) const {
        detail::require_size(v.size(), n(), "circ_adjoint");
        return spectral_product(v, true);
    }

    /// Γ_ξ z by the O(n^2) double loop.
    [[nodiscard]] std::vector<double> circ_apply_naive(std::span<const double> z) const {
        detail::require_size(z.size(), n(), "circ_apply_naive");
        const std::size_t nn = n();
        std::vector<double> out(nn, 0.0);
        for (std::size_t j = 0; j < nn; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < nn; ++k) acc += xi_[(j + nn - k) % nn] * z[k];
            out[j] = acc;
        }
        return out;
    }

    /// A z, entries ordered as `rows()`.
    [[nodiscard]] std::vector<double> apply(std::span<const double> z) const {
        detail::require_size(z.size(), n(), "subsampled_apply");
        if (rows_.empty()) return {};
        const auto full = spectral_product(z, false);
        std::vector<double> out(rows_.size());
        for (std::size_t i = 0; i < rows_.size(); ++i) out[i] = full[rows_[i]];
        return out;
    }

    /// A^T w = Γ_ξ^T (scatter of w into the selected rows).
    [[nodiscard]] std::vector<double> adjoint(std::span<const double> w) const {
        detail::require_size(w.size(), rows_.size(), "subsampled_adjoint");
        std::vector<double> scattered(n(), 0.0);
        for (std::size_t i = 0; i < rows_.size(); ++i) scattered[rows_[i]] = w[i];
        return spectral_product(scattered, true);
    }

    /// Circular autocorrelation r(d) = Σ_j ξ_j ξ_{(j+d) mod n}; the Gram
    /// matrix Γ^T Γ has entry (k, l) = r((k - l) mod n).
    [[nodiscard]] std::vector<double> autocorrelation() const {
        std::vector<cplx> a(plan_->generator_dft.size());
        for (std::size_t k = 0; k < a.size(); ++k) a[k] = std::norm(plan_->generator_dft[k]);
        plan_->fft.transform(a, true);
        std::vector<double> r(a.size());
        for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k].real();
        return r;
    }

    /// ||Γ_ξ||_op = max_k |DFT(ξ)_k|.
    [[nodiscard]] double circ_operator_norm() const {
        double m = 0.0;
        for (const auto& c : plan_->generator_dft) m = std::max(m, std::abs(c));
        return m;
    }

private:
    std::vector<double> spectral_product(std::span<const double> z, bool conjugate) const {
        std::vector<cplx> a(z.begin(), z.end());
        plan_->fft.transform(a, false);
        const auto& g = plan_->generator_dft;
        for (std::size_t k = 0; k < a.size(); ++k) a[k] *= conjugate ? std::conj(g[k]) : g[k];
        plan_->fft.transform(a, true);
        std::vector<double> out(a.size());
        for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k].real();
        return out;
    }

    std::vector<double> xi_;
    std::vector<std::size_t> rows_;
    std::size_t m_nominal_;
    std::shared_ptr<const SpectralPlan> plan_;
};

/// ||x||_[k]: Euclidean norm of the k largest-magnitude entries.
inline double top_k_norm(std::span<const double> x, std::size_t k) {
    if (k < 1 || k > x.size()) throw std::invalid_argument("top_k_norm: need 1 <= k <= n");
    std::vector<double> sq(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sq[i] = x[i] * x[i];
    std::nth_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(k - 1), sq.end(), std::greater<>());
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += sq[i];
    return std::sqrt(acc);
}

}  // namespace onebit

#endif  // ONEBIT_CIRCULANT_HPP
