#ifndef ONEBIT_DIAGNOSTICS_HPP
#define ONEBIT_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "circulant.hpp"
#include "detail/parallel.hpp"
#include "detail/vec.hpp"
#include "rng.hpp"

namespace onebit {

// Empirical constants for the structural properties of Γ_ξ. Every "hat"
// value is a minimum or maximum over random r-sparse probes, never a
// certified supremum over all of Σ_{r,n}.

struct GrowthReport {
    std::size_t r = 0;
    double gamma1_hat = 0.0;
    std::size_t argmax_k = 0;
};

/// Smallest γ with ||x||_[k] <= γ sqrt(k log(e n / k) / n) ||x||_2 for all
/// k in [r, n]. Natural logarithm; ties in the argmax go to the smallest k.
inline GrowthReport growth_gamma(std::span<const double> x, std::size_t r) {
    const std::size_t n = x.size();
    if (r < 1 || r > n) throw std::invalid_argument("growth_gamma: need 1 <= r <= n");
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = x[i] * x[i];
    std::sort(sq.begin(), sq.end(), std::greater<>());
    double total = 0.0;
    for (double v : sq) total += v;
    if (total == 0.0) throw std::invalid_argument("growth_gamma: zero vector");
    const double nd = static_cast<double>(n);
    const double norm = std::sqrt(total);

    GrowthReport rep;
    rep.r = r;
    double prefix = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        prefix += sq[k - 1];
        if (k < r) continue;
        const double kd = static_cast<double>(k);
        const double shape = std::sqrt(kd * (1.0 + std::log(nd / kd)) / nd);
        const double g = std::sqrt(prefix) / (shape * norm);
        if (g > rep.gamma1_hat) {
            rep.gamma1_hat = g;
            rep.argmax_k = k;
        }
    }
    return rep;
}

struct GrowthBatchReport {
    std::size_t r = 0;
    std::size_t probe_count = 0;
    double max_gamma1 = 0.0;
    double median_gamma1 = 0.0;
    std::size_t argmax_k = 0;  // of the worst probe
    std::vector<double> per_probe;
    double slack = 3.0;
    double bound = 0.0;  // slack * ln(n) * ln(r)
    bool within_bound = false;
};

struct IsomorphismReport {
    std::size_t r = 0;
    double kappa_hat = 0.0;
    double kappa_prime_hat = 0.0;
    std::size_t probe_count = 0;
};

namespace detail {
inline double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

inline std::vector<double> probe(std::size_t n, std::size_t r, const SeedTree& seed, std::size_t i) {
    return random_sparse_unit(n, r, seed.child("probe", i));
}
}  // namespace detail

/// Growth constants of Γ_ξ t for random unit-norm r-sparse probes t.
inline GrowthBatchReport certify_growth_on_images(const CirculantOperator& op, std::size_t r, std::size_t trials,
                                                  const SeedTree& seed, double slack = 3.0,
                                                  std::size_t workers = 1) {
    if (trials < 1) throw std::invalid_argument("certify_growth_on_images: trials must be >= 1");
    if (r < 1 || r > op.n()) throw std::invalid_argument("certify_growth_on_images: need 1 <= r <= n");
    std::vector<GrowthReport> reports(trials);
    detail::parallel_for(trials, workers, [&](std::size_t i) {
        const auto t = detail::probe(op.n(), r, seed, i);
        reports[i] = growth_gamma(op.circ_apply(t), r);
    });
    GrowthBatchReport out;
    out.r = r;
    out.probe_count = trials;
    out.slack = slack;
    out.per_probe.reserve(trials);
    for (const auto& rep : reports) {
        out.per_probe.push_back(rep.gamma1_hat);
        if (rep.gamma1_hat > out.max_gamma1) {
            out.max_gamma1 = rep.gamma1_hat;
            out.argmax_k = rep.argmax_k;
        }
    }
    out.median_gamma1 = detail::median_of(out.per_probe);
    out.bound = slack * std::log(static_cast<double>(op.n())) * std::log(static_cast<double>(r));
    out.within_bound = out.max_gamma1 <= out.bound;
    return out;
}

/// min / max of ||Γ_ξ t||_2 / (sqrt(n) ||t||_2) over random r-sparse probes.
inline IsomorphismReport certify_isomorphism(const CirculantOperator& op, std::size_t r, std::size_t trials,
                                             const SeedTree& seed, std::size_t workers = 1) {
    if (trials < 1) throw std::invalid_argument("certify_isomorphism: trials must be >= 1");
    if (r < 1 || r > op.n()) throw std::invalid_argument("certify_isomorphism: need 1 <= r <= n");
    std::vector<double> ratio(trials);
    const double sqrt_n = std::sqrt(static_cast<double>(op.n()));
    detail::parallel_for(trials, workers, [&](std::size_t i) {
        const auto t = detail::probe(op.n(), r, seed, i);
        ratio[i] = detail::norm2(op.circ_apply(t)) / (sqrt_n * detail::norm2(t));
    });
    IsomorphismReport rep;
    rep.r = r;
    rep.probe_count = trials;
    rep.kappa_hat = *std::min_element(ratio.begin(), ratio.end());
    rep.kappa_prime_hat = *std::max_element(ratio.begin(), ratio.end());
    return rep;
}

/// Running maximum of ||A t||_2 / (sqrt(m) ||t||_2) over random r-sparse
/// probes, m the nominal count. A lower estimate of the true supremum.
inline double sparse_operator_norm(const CirculantOperator& op, std::size_t r, std::size_t trials,
                                   const SeedTree& seed, std::size_t workers = 1) {
    if (trials < 1) throw std::invalid_argument("sparse_operator_norm: trials must be >= 1");
    if (op.m_nominal() < 1) throw std::invalid_argument("sparse_operator_norm: m_nominal must be >= 1");
    if (r < 1 || r > op.n()) throw std::invalid_argument("sparse_operator_norm: need 1 <= r <= n");
    std::vector<double> ratio(trials);
    const double sqrt_m = std::sqrt(static_cast<double>(op.m_nominal()));
    detail::parallel_for(trials, workers, [&](std::size_t i) {
        const auto t = detail::probe(op.n(), r, seed, i);
        ratio[i] = detail::norm2(op.apply(t)) / (sqrt_m * detail::norm2(t));
    });
    return *std::max_element(ratio.begin(), ratio.end());
}

}  // namespace onebit

#endif  // ONEBIT_DIAGNOSTICS_HPP
