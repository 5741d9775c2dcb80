#ifndef ONEBIT_RECOVER_HPP
#define ONEBIT_RECOVER_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "circulant.hpp"
#include "detail/vec.hpp"
#include "quantize.hpp"
#include "rng.hpp"

namespace onebit {

enum class ConstraintKind { exact_sparse, approx_sparse };
enum class Solver { closed_form, maximize_phi, lasso_pg };

inline std::string_view to_string(ConstraintKind c) {
    return c == ConstraintKind::exact_sparse ? "exact_sparse" : "approx_sparse";
}

inline ConstraintKind constraint_from_string(std::string_view s) {
    if (s == "exact_sparse") return ConstraintKind::exact_sparse;
    if (s == "approx_sparse") return ConstraintKind::approx_sparse;
    throw std::invalid_argument("unknown constraint '" + std::string(s) + "'");
}

inline std::string_view to_string(Solver s) {
    switch (s) {
        case Solver::closed_form: return "closed_form";
        case Solver::maximize_phi: return "maximize_phi";
        case Solver::lasso_pg: return "lasso_pg";
    }
    return "?";
}

inline Solver solver_from_string(std::string_view s) {
    if (s == "closed_form") return Solver::closed_form;
    if (s == "maximize_phi") return Solver::maximize_phi;
    if (s == "lasso_pg") return Solver::lasso_pg;
    throw std::invalid_argument("unknown solver '" + std::string(s) + "'");
}

/// Σ_{s,n} (exact_sparse) or √s B_1 ∩ B_2 (approx_sparse).
struct Constraint {
    ConstraintKind kind = ConstraintKind::exact_sparse;
    std::size_t s = 1;
};

struct RecoverySpec {
    Constraint constraint;
    double lambda = 1.0;
    Solver solver = Solver::closed_form;
    std::size_t pg_max_iters = 500;
    double pg_tol = 1e-8;

    void validate(std::size_t n) const {
        if (constraint.s < 1 || constraint.s > n) throw std::invalid_argument("recovery: need 1 <= s <= n");
        if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("recovery: lambda must be > 0");
        if (!(pg_tol > 0.0)) throw std::invalid_argument("recovery: pg_tol must be > 0");
        if (solver != Solver::lasso_pg && constraint.kind != ConstraintKind::exact_sparse)
            throw std::invalid_argument(std::string("recovery: solver ") + std::string(to_string(solver)) +
                                        " requires the exact_sparse constraint");
    }
};

struct RecoveryResult {
    std::vector<double> x;
    double objective = 0.0;
    std::size_t iterations = 0;
    bool converged = true;
    /// Per-iteration objective values (lasso_pg only).
    std::vector<double> objective_trace;
};

// ---------------------------------------------------------------------------
// Thresholding and projections

/// Sorted indices of the s largest |v_i|; ties go to the lower index.
inline std::vector<std::size_t> top_s_support(std::span<const double> v, std::size_t s) {
    if (s < 1 || s > v.size()) throw std::invalid_argument("hard_threshold: need 1 <= s <= n");
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(s - 1), idx.end(),
                     [&](std::size_t a, std::size_t b) {
                         const double fa = std::abs(v[a]), fb = std::abs(v[b]);
                         return fa != fb ? fa > fb : a < b;
                     });
    idx.resize(s);
    std::sort(idx.begin(), idx.end());
    return idx;
}

/// H_s: keep the s largest-magnitude entries.
inline std::vector<double> hard_threshold(std::span<const double> v, std::size_t s) {
    std::vector<double> out(v.size(), 0.0);
    for (std::size_t i : top_s_support(v, s)) out[i] = v[i];
    return out;
}

/// Euclidean projection onto Σ_{s,n} = {s-sparse} ∩ B_2.
inline std::vector<double> project_sigma_s(std::span<const double> v, std::size_t s) {
    auto h = hard_threshold(v, s);
    const double nh = detail::norm2(h);
    if (nh > 1.0)
        for (auto& x : h) x /= nh;
    return h;
}

inline std::vector<double> soft_threshold(std::span<const double> v, double theta) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]) - theta;
        out[i] = a > 0.0 ? std::copysign(a, v[i]) : 0.0;
    }
    return out;
}

/// Euclidean projection onto √s B_1^n ∩ B_2^n.
///
/// The projection has the form soft(v, θ) / max(1, ||soft(v, θ)||_2) for the
/// smallest θ >= 0 whose candidate meets the ℓ1 radius; θ is located by
/// bisection on [0, ||v||_∞].
inline std::vector<double> project_l1_l2(std::span<const double> v, std::size_t s) {
    if (s < 1) throw std::invalid_argument("project_l1_l2: s must be >= 1");
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument("project_l1_l2: non-finite input");
    const double radius = std::sqrt(static_cast<double>(s));
    auto candidate = [&](double theta) {
        auto c = soft_threshold(v, theta);
        const double n2 = detail::norm2(c);
        if (n2 > 1.0)
            for (auto& x : c) x /= n2;
        return c;
    };
    auto c0 = candidate(0.0);
    if (detail::norm1(c0) <= radius) return c0;

    const double vmax = detail::norm_inf(v);
    double lo = 0.0, hi = vmax;
    while (hi - lo > 1e-12 * vmax) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (detail::norm1(candidate(mid)) <= radius)
            hi = mid;
        else
            lo = mid;
    }
    return candidate(hi);
}

inline std::vector<double> project_onto(const Constraint& c, std::span<const double> v) {
    return c.kind == ConstraintKind::exact_sparse ? project_sigma_s(v, c.s) : project_l1_l2(v, c.s);
}

// ---------------------------------------------------------------------------
// Objectives

namespace detail {
inline double inv_m(const CirculantOperator& op) {
    if (op.m_nominal() < 1) throw std::invalid_argument("recovery: operator has m_nominal = 0");
    return 1.0 / static_cast<double>(op.m_nominal());
}
}  // namespace detail

/// φ(z) = (1/m)<q, Az> - ||Γ_ξ z||_2^2 / (2 λ n), with m the nominal count.
inline double phi_value(std::span<const double> z, std::span<const double> q_corr, const CirculantOperator& op,
                        double lambda) {
    detail::require_size(z.size(), op.n(), "phi_value");
    detail::require_size(q_corr.size(), op.realized_m(), "phi_value");
    const auto gz = op.circ_apply(z);
    double corr = 0.0;
    for (std::size_t i = 0; i < q_corr.size(); ++i) corr += q_corr[i] * gz[op.rows()[i]];
    const double quad = detail::dot(gz, gz) / static_cast<double>(op.n());
    return corr * detail::inv_m(op) - quad / (2.0 * lambda);
}

inline double phi_value(std::span<const double> z, const QuantizedSample& sample, const CirculantOperator& op,
                        double lambda) {
    return phi_value(z, sample.corrupted_as_real(), op, lambda);
}

/// (1/m)<b, z> - ||z||^2 / (2λ) where b = A^T q; the isotropic surrogate of φ.
inline double isotropic_objective(std::span<const double> z, std::span<const double> correlation, double lambda,
                                  std::size_t m_nominal) {
    return detail::dot(correlation, z) / static_cast<double>(m_nominal) - detail::dot(z, z) / (2.0 * lambda);
}

// ---------------------------------------------------------------------------
// Closed form

/// min{λ/m, 1/||H_s(b)||} H_s(b), and 0 when H_s(b) vanishes.
inline std::vector<double> closed_form_solution(std::span<const double> correlation, std::size_t s, double lambda,
                                                std::size_t m_nominal) {
    auto h = hard_threshold(correlation, s);
    const double nh = detail::norm2(h);
    if (nh == 0.0) return h;
    const double scale = std::min(lambda / static_cast<double>(m_nominal), 1.0 / nh);
    for (auto& v : h) v *= scale;
    return h;
}

inline RecoveryResult recover_closed_form(const QuantizedSample& sample, const CirculantOperator& op,
                                          const RecoverySpec& spec) {
    spec.validate(op.n());
    if (spec.constraint.kind != ConstraintKind::exact_sparse)
        throw std::invalid_argument("closed form requires the exact_sparse constraint");
    (void)detail::inv_m(op);
    const auto b = op.adjoint(sample.corrupted_as_real());
    RecoveryResult r;
    r.x = closed_form_solution(b, spec.constraint.s, spec.lambda, op.m_nominal());
    r.objective = isotropic_objective(r.x, b, spec.lambda, op.m_nominal());
    return r;
}

// ---------------------------------------------------------------------------
// Exact maximization of φ

namespace detail {

/// argmax c^T z - ½ z^T H z subject to ||z||_2 <= 1, H symmetric PSD.
///
/// Solved in the eigenbasis of H: z(μ) = (H + μI)^{-1} c with μ = 0 if that
/// point is feasible, otherwise the μ > 0 with ||z(μ)|| = 1 (bisection).
inline Eigen::VectorXd maximize_ball_quadratic(const Eigen::MatrixXd& h, const Eigen::VectorXd& c) {
    const Eigen::Index k = c.size();
    if (k == 0) return {};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    Eigen::VectorXd evals = eig.eigenvalues().cwiseMax(0.0);
    const Eigen::MatrixXd& q = eig.eigenvectors();
    const Eigen::VectorXd ct = q.transpose() * c;
    const double cn = ct.norm();
    if (cn == 0.0) return Eigen::VectorXd::Zero(k);

    const double tiny = 1e-13 * std::max(1.0, evals.maxCoeff());
    auto z_of = [&](double mu) {
        Eigen::VectorXd zt(k);
        for (Eigen::Index i = 0; i < k; ++i) {
            const double d = evals(i) + mu;
            zt(i) = d > tiny ? ct(i) / d : 0.0;
        }
        return zt;
    };
    bool singular_hit = false;
    for (Eigen::Index i = 0; i < k; ++i)
        if (evals(i) <= tiny && std::abs(ct(i)) > 1e-14 * cn) singular_hit = true;
    if (!singular_hit) {
        Eigen::VectorXd z0 = z_of(0.0);
        if (z0.norm() <= 1.0) return q * z0;
    }
    // ||z(μ)|| is decreasing in μ and ||z(||c||)|| <= 1.
    double lo = 0.0, hi = cn;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (z_of(mid).norm() > 1.0)
            lo = mid;
        else
            hi = mid;
    }
    Eigen::VectorXd zt = z_of(hi);
    const double nz = zt.norm();
    if (nz > 1.0) zt /= nz;
    return q * zt;
}

inline bool next_combination(std::vector<std::size_t>& comb, std::size_t n) {
    const std::size_t k = comb.size();
    for (std::size_t i = k; i-- > 0;) {
        if (comb[i] < n - k + i) {
            ++comb[i];
            for (std::size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace detail

/// Largest n for which every support of size s is enumerated.
inline constexpr std::size_t kExhaustiveMaxN = 20;

enum class PhiSearch { automatic, exhaustive, certify_support };

/// Maximizes φ over Σ_{s,n}. For n <= 20 every size-s support is searched;
/// otherwise only the support picked by H_s(A^T q) is solved exactly.
inline RecoveryResult recover_maximize_phi(const QuantizedSample& sample, const CirculantOperator& op,
                                           const RecoverySpec& spec, PhiSearch mode = PhiSearch::automatic) {
    spec.validate(op.n());
    const std::size_t n = op.n();
    const std::size_t s = spec.constraint.s;
    if (mode == PhiSearch::exhaustive && n > kExhaustiveMaxN)
        throw std::invalid_argument("maximize_phi: exhaustive search refused for n > " +
                                    std::to_string(kExhaustiveMaxN));
    const bool exhaustive = mode == PhiSearch::exhaustive || (mode == PhiSearch::automatic && n <= kExhaustiveMaxN);

    const auto q = sample.corrupted_as_real();
    const auto b = op.adjoint(q);
    const auto autocorr = op.autocorrelation();
    const double inv_m = detail::inv_m(op);
    const double quad_scale = 1.0 / (spec.lambda * static_cast<double>(n));

    auto solve_support = [&](const std::vector<std::size_t>& support, std::vector<double>& z) {
        const auto k = static_cast<Eigen::Index>(support.size());
        Eigen::MatrixXd h(k, k);
        Eigen::VectorXd c(k);
        for (Eigen::Index a = 0; a < k; ++a) {
            c(a) = b[support[a]] * inv_m;
            for (Eigen::Index d = 0; d < k; ++d)
                h(a, d) = autocorr[(support[a] + n - support[d]) % n] * quad_scale;
        }
        const Eigen::VectorXd zs = detail::maximize_ball_quadratic(h, c);
        z.assign(n, 0.0);
        for (Eigen::Index a = 0; a < k; ++a) z[support[a]] = zs(a);
        return c.dot(zs) - 0.5 * zs.dot(h * zs);
    };

    RecoveryResult best;
    best.objective = -std::numeric_limits<double>::infinity();
    std::vector<double> z;
    std::size_t searched = 0;
    if (exhaustive) {
        std::vector<std::size_t> comb(s);
        std::iota(comb.begin(), comb.end(), std::size_t{0});
        do {
            const double val = solve_support(comb, z);
            ++searched;
            if (val > best.objective) {
                best.objective = val;
                best.x = z;
            }
        } while (detail::next_combination(comb, n));
    } else {
        best.objective = solve_support(top_s_support(b, s), best.x);
        searched = 1;
    }
    best.iterations = searched;
    // Report φ evaluated directly rather than the restricted quadratic value.
    best.objective = phi_value(best.x, q, op, spec.lambda);
    return best;
}

// ---------------------------------------------------------------------------
// Generalized Lasso by projected gradient

/// Largest eigenvalue of A^T A by power iteration from a fixed start vector.
inline double estimate_gram_norm(const CirculantOperator& op, int iterations = 50) {
    if (op.realized_m() == 0) return 0.0;
    Engine eng(SeedTree(0x5EED).child("power_iteration"));
    std::vector<double> v(op.n());
    for (auto& x : v) x = eng.normal();
    double est = 0.0;
    for (int it = 0; it < iterations; ++it) {
        const double nv = detail::norm2(v);
        if (nv == 0.0) return 0.0;
        for (auto& x : v) x /= nv;
        auto w = op.adjoint(op.apply(v));
        est = detail::dot(v, w);
        v = std::move(w);
    }
    return est;
}

/// Minimizes ||y - A z / (2λ)||_2 over the constraint set by projected
/// gradient on ½||y - A z / (2λ)||^2, starting at z = 0 with step 1/L,
/// L = ||A||^2 / (2λ)^2. L is doubled whenever a step fails to decrease the
/// objective, so the iterates are monotone even if the power-iteration
/// estimate falls short of the true norm.
inline RecoveryResult recover_lasso_pg(std::span<const double> data, const CirculantOperator& op,
                                       const RecoverySpec& spec) {
    spec.validate(op.n());
    detail::require_size(data.size(), op.realized_m(), "recover_lasso_pg");
    const double c = 1.0 / (2.0 * spec.lambda);
    const std::size_t n = op.n();

    auto half_sq = [&](std::span<const double> z, std::vector<double>& residual) {
        residual = op.apply(z);
        for (std::size_t i = 0; i < residual.size(); ++i) residual[i] = data[i] - c * residual[i];
        return 0.5 * detail::dot(residual, residual);
    };

    RecoveryResult r;
    r.x.assign(n, 0.0);
    r.converged = false;
    std::vector<double> residual;
    double f = half_sq(r.x, residual);
    r.objective_trace.push_back(std::sqrt(2.0 * f));

    double lip = estimate_gram_norm(op) * c * c;
    if (!(lip > 0.0)) {
        r.objective = std::sqrt(2.0 * f);
        r.converged = true;
        return r;
    }

    std::vector<double> trial_residual;
    for (std::size_t it = 0; it < spec.pg_max_iters; ++it) {
        // grad = -c A^T residual
        auto grad = op.adjoint(residual);
        std::vector<double> z_new;
        double f_new = f;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            std::vector<double> step(n);
            for (std::size_t k = 0; k < n; ++k) step[k] = r.x[k] + (c / lip) * grad[k];
            z_new = project_onto(spec.constraint, step);
            f_new = half_sq(z_new, trial_residual);
            if (f_new <= f) {
                accepted = true;
                break;
            }
            lip *= 2.0;
        }
        r.iterations = it + 1;
        if (!accepted) break;
        const double change = f - f_new;
        r.x = std::move(z_new);
        residual.swap(trial_residual);
        f = f_new;
        r.objective_trace.push_back(std::sqrt(2.0 * f));
        if (change <= spec.pg_tol * f || f <= 1e-30) {
            r.converged = true;
            break;
        }
    }
    r.objective = std::sqrt(2.0 * f);
    return r;
}

inline RecoveryResult recover_lasso_pg(const QuantizedSample& sample, const CirculantOperator& op,
                                       const RecoverySpec& spec) {
    return recover_lasso_pg(sample.corrupted_as_real(), op, spec);
}

/// Dispatches on `spec.solver`.
inline RecoveryResult recover(const QuantizedSample& sample, const CirculantOperator& op, const RecoverySpec& spec) {
    switch (spec.solver) {
        case Solver::closed_form: return recover_closed_form(sample, op, spec);
        case Solver::maximize_phi: return recover_maximize_phi(sample, op, spec);
        case Solver::lasso_pg: return recover_lasso_pg(sample, op, spec);
    }
    throw std::invalid_argument("recover: unknown solver");
}

}  // namespace onebit

#endif  // ONEBIT_RECOVER_HPP
