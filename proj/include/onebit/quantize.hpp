#ifndef ONEBIT_QUANTIZE_HPP
#define ONEBIT_QUANTIZE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "circulant.hpp"
#include "detail/vec.hpp"
#include "rng.hpp"

namespace onebit {

using Sign = std::int8_t;
using SignVector = std::vector<Sign>;

enum class Adversary { none, random_flip, greedy_signal_aligned };

inline std::string_view to_string(Adversary a) {
    switch (a) {
        case Adversary::none: return "none";
        case Adversary::random_flip: return "random_flip";
        case Adversary::greedy_signal_aligned: return "greedy_signal_aligned";
    }
    return "?";
}

inline Adversary adversary_from_string(std::string_view s) {
    if (s == "none") return Adversary::none;
    if (s == "random_flip") return Adversary::random_flip;
    if (s == "greedy_signal_aligned" || s == "greedy") return Adversary::greedy_signal_aligned;
    throw std::invalid_argument("unknown adversary '" + std::string(s) + "'");
}

struct ChannelConfig {
    Distribution noise{Family::gaussian, 0.0, 0.0, 3.0};
    double lambda = 1.0;
    double beta = 0.0;
    Adversary adversary = Adversary::none;

    void validate() const {
        noise.validate();
        if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("channel: lambda must be > 0");
        if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("channel: beta must lie in [0, 1)");
    }
};

/// Hard corruption budget floor(beta * m).
inline std::size_t corruption_budget(double beta, std::size_t m_nominal) {
    if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("corruption budget: beta must lie in [0, 1)");
    return static_cast<std::size_t>(std::floor(beta * static_cast<double>(m_nominal)));
}

/// Clean and corrupted quantized measurements, aligned with the operator's
/// selected rows. `flipped` holds row indices (members of I), sorted.
struct QuantizedSample {
    SignVector q;
    SignVector q_corr;
    std::vector<std::size_t> flipped;
    bool norm_warning = false;

    [[nodiscard]] std::size_t hamming() const {
        std::size_t d = 0;
        for (std::size_t i = 0; i < q.size(); ++i) d += q[i] != q_corr[i];
        return d;
    }

    [[nodiscard]] std::vector<double> corrupted_as_real() const { return {q_corr.begin(), q_corr.end()}; }
};

inline Sign sign_of(double v) noexcept { return v >= 0.0 ? Sign{1} : Sign{-1}; }

/// q_i = sign(y_i + nu_i + tau_i) with sign(0) = +1.
inline SignVector quantize(std::span<const double> measurements, std::span<const double> noise,
                           std::span<const double> dither) {
    if (noise.size() != measurements.size() || dither.size() != measurements.size())
        throw std::invalid_argument("quantize: length mismatch");
    SignVector q(measurements.size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = sign_of(measurements[i] + noise[i] + dither[i]);
    return q;
}

/// Applies the configured adversary within the budget floor(beta * m_nominal).
inline QuantizedSample corrupt(const SignVector& q, std::span<const double> x_true, const CirculantOperator& op,
                               const ChannelConfig& cfg, const SeedTree& seed) {
    if (!(cfg.beta >= 0.0 && cfg.beta < 1.0)) throw std::invalid_argument("corrupt: beta must lie in [0, 1)");
    detail::require_size(q.size(), op.realized_m(), "corrupt");
    QuantizedSample out;
    out.q = q;
    out.q_corr = q;
    const std::size_t budget = corruption_budget(cfg.beta, op.m_nominal());
    if (cfg.adversary == Adversary::none || budget == 0 || q.empty()) return out;
    if (budget > q.size())
        throw std::invalid_argument("corrupt: budget " + std::to_string(budget) + " exceeds |I| = " +
                                    std::to_string(q.size()));

    std::vector<std::size_t> positions;
    if (cfg.adversary == Adversary::random_flip) {
        Engine eng(seed);
        positions = sample_subset(q.size(), budget, eng);
    } else {
        const auto y = op.apply(x_true);
        std::vector<std::size_t> order(q.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        auto score = [&](std::size_t i) { return static_cast<double>(q[i]) * y[i]; };
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(budget), order.end(),
                          [&](std::size_t a, std::size_t b) {
                              const double sa = score(a), sb = score(b);
                              return sa != sb ? sa > sb : a < b;
                          });
        positions.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(budget));
    }
    std::sort(positions.begin(), positions.end());
    for (std::size_t p : positions) {
        out.q_corr[p] = static_cast<Sign>(-out.q_corr[p]);
        out.flipped.push_back(op.rows()[p]);
    }
    return out;
}

/// The full channel: A x, then noise and dither, then sign, then corruption.
///
/// Seed layout: noise from seed/"noise", dither from seed/"dither",
/// adversary randomness from seed/"adversary".
inline QuantizedSample measure_and_quantize(std::span<const double> x, const CirculantOperator& op,
                                            const ChannelConfig& cfg, const SeedTree& seed) {
    cfg.validate();
    detail::require_size(x.size(), op.n(), "measure_and_quantize");
    const auto y = op.apply(x);
    std::vector<double> nu, tau;
    if (!y.empty()) {
        nu = sample_vector(cfg.noise, y.size(), seed.child("noise"));
        tau = sample_dither(y.size(), cfg.lambda, seed.child("dither"));
    }
    const auto q = quantize(y, nu, tau);
    auto sample = corrupt(q, x, op, cfg, seed.child("adversary"));
    sample.norm_warning = detail::norm2(x) > 1.0 + 1e-12;
    return sample;
}

/// Monte-Carlo mean of sign(y + tau) over `draws` dither samples.
inline double dither_sign_mean(double y, double lambda, std::size_t draws, const SeedTree& seed) {
    if (draws == 0) throw std::invalid_argument("dither_sign_mean: draws must be >= 1");
    const auto tau = sample_dither(draws, lambda, seed);
    long long acc = 0;
    for (double t : tau) acc += sign_of(y + t);
    return static_cast<double>(acc) / static_cast<double>(draws);
}

/// Monte-Carlo estimates of the heavier-tailed noise conditions
/// P(2|nu| > lambda), E(|nu| 1{2|nu| > lambda}) and |E nu|, each compared
/// against c1 * rho.
struct HeavyTailCheck {
    double exceed_probability = 0.0;
    double tail_mean = 0.0;
    double abs_mean = 0.0;
    double threshold = 0.0;
    std::size_t samples = 0;
    bool ok = false;
};

inline HeavyTailCheck check_heavy_tail(const Distribution& noise, double lambda, double rho, double c1,
                                       std::size_t samples, const SeedTree& seed) {
    if (!(lambda > 0.0)) throw std::invalid_argument("check_heavy_tail: lambda must be > 0");
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("check_heavy_tail: rho must lie in (0, 1)");
    HeavyTailCheck r;
    r.samples = samples;
    r.threshold = c1 * rho;
    const auto v = sample_vector(noise, samples, seed);
    std::size_t exceed = 0;
    double tail = 0.0;
    for (double x : v) {
        if (2.0 * std::abs(x) > lambda) {
            ++exceed;
            tail += std::abs(x);
        }
    }
    const double ns = static_cast<double>(samples);
    r.exceed_probability = static_cast<double>(exceed) / ns;
    r.tail_mean = tail / ns;
    r.abs_mean = std::abs(noise.mean);
    r.ok = r.exceed_probability <= r.threshold && r.tail_mean <= r.threshold && r.abs_mean <= r.threshold;
    return r;
}

}  // namespace onebit

#endif  // ONEBIT_QUANTIZE_HPP
