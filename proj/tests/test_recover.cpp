#include <gtest/gtest.h>

#include <cmath>

#include "onebit/recover.hpp"

using namespace onebit;

namespace {

struct Instance {
    CirculantOperator op;
    std::vector<double> x;
    QuantizedSample sample;
    double lambda;
};

Instance make_instance(std::size_t n, std::size_t m, std::size_t s, double lambda, double beta,
                       const SeedTree& seed, Family xi_family = Family::gaussian) {
    CirculantOperator op(sample_vector(Distribution::standard(xi_family), n, seed.child("xi")),
                         sample_selectors(n, m, seed.child("rows")), m);
    auto x = random_sparse_unit(n, s, seed.child("x"));
    ChannelConfig ch;
    ch.noise = Distribution{Family::gaussian, 0.0, 0.3, 3.0};
    ch.lambda = lambda;
    ch.beta = beta;
    ch.adversary = beta > 0 ? Adversary::random_flip : Adversary::none;
    auto sample = measure_and_quantize(x, op, ch, seed.child("channel"));
    return {std::move(op), std::move(x), std::move(sample), lambda};
}

std::vector<std::vector<double>> dense_circulant(const std::vector<double>& xi) {
    const std::size_t n = xi.size();
    std::vector<std::vector<double>> g(n, std::vector<double>(n));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) g[j][k] = xi[(j + n - k) % n];
    return g;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double dist2(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

std::size_t nnz(std::span<const double> v) {
    std::size_t c = 0;
    for (double x : v) c += x != 0.0;
    return c;
}

double l1(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

// Random point of √s B1 ∩ B2.
std::vector<double> random_feasible_l1_l2(std::size_t n, std::size_t s, Engine& eng) {
    std::vector<double> g(n);
    const std::size_t k = 1 + eng.below(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = i < k ? eng.normal() : 0.0;
    for (std::size_t i = n; i-- > 1;) std::swap(g[i], g[eng.below(i + 1)]);
    const double scale = std::min(1.0 / std::sqrt(dot(g, g)), std::sqrt(static_cast<double>(s)) / l1(g));
    const double radius = std::pow(eng.uniform01(), 0.25);
    for (auto& v : g) v *= scale * radius;
    return g;
}

}  // namespace

// --- hard thresholding / projections -----------------------------------------

TEST(HardThreshold, Examples) {
    EXPECT_EQ(hard_threshold(std::vector<double>{1, -5, 2}, 1), (std::vector<double>{0, -5, 0}));
    EXPECT_EQ(hard_threshold(std::vector<double>{2, 2, 1}, 1), (std::vector<double>{2, 0, 0}));
    const std::vector<double> v{0.3, -1.2, 4.0, 0.0};
    EXPECT_EQ(hard_threshold(v, 4), v);
    EXPECT_THROW(hard_threshold(v, 0), std::invalid_argument);
    EXPECT_THROW(hard_threshold(v, 5), std::invalid_argument);
}

TEST(HardThreshold, TiesAcrossTheCut) {
    EXPECT_EQ(hard_threshold(std::vector<double>{1, -3, 3, 1, 3}, 2), (std::vector<double>{0, -3, 3, 0, 0}));
}

TEST(ProjectSigmaS, Examples) {
    const std::vector<double> inside{0.0, 0.6, 0.0};
    EXPECT_EQ(project_sigma_s(inside, 1), inside);
    EXPECT_EQ(project_sigma_s(std::vector<double>{3, 0, 0}, 1), (std::vector<double>{1, 0, 0}));
}

TEST(ProjectSigmaS, MatchesEnumerationOracle) {
    // n = 3, s = 1: the nearest point on each signed axis segment is
    // clamp(v_i, -1, 1) e_i; take the best of the three.
    Engine eng(SeedTree(1));
    for (int t = 0; t < 500; ++t) {
        std::vector<double> v{3 * eng.normal(), 3 * eng.normal(), 3 * eng.normal()};
        double best = 1e300;
        std::vector<double> best_p;
        for (std::size_t i = 0; i < 3; ++i) {
            std::vector<double> p(3, 0.0);
            p[i] = std::clamp(v[i], -1.0, 1.0);
            const double d = dist2(v, p);
            if (d < best) {
                best = d;
                best_p = p;
            }
        }
        const auto got = project_sigma_s(v, 1);
        EXPECT_NEAR(dist2(v, got), best, 1e-12);
        for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(got[i], best_p[i], 1e-12);
    }
}

TEST(ProjectL1L2, InteriorPointUnchanged) {
    const std::vector<double> v{0.3, -0.2, 0.1, 0.0};
    EXPECT_EQ(project_l1_l2(v, 1), v);
}

TEST(ProjectL1L2, LargeSReducesToBallProjection) {
    Engine eng(SeedTree(2));
    for (int t = 0; t < 50; ++t) {
        std::vector<double> v(6);
        for (auto& x : v) x = 2 * eng.normal();
        const double nv = std::sqrt(dot(v, v));
        const auto got = project_l1_l2(v, 6);
        for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(got[i], v[i] / std::max(1.0, nv), 1e-14);
    }
}

TEST(ProjectL1L2, MatchesGridSearch) {
    // n = 3, s = 1: the feasible set is the unit ℓ1 ball. Grid step 0.005.
    Engine eng(SeedTree(3));
    const int steps = 400;
    for (int t = 0; t < 4; ++t) {
        std::vector<double> v{1.5 * eng.normal(), 1.5 * eng.normal(), 1.5 * eng.normal()};
        const auto p = project_l1_l2(v, 1);
        double best = 1e300;
        for (int a = -steps / 2; a <= steps / 2; ++a) {
            const double za = a * 0.005;
            for (int b = -steps / 2; b <= steps / 2; ++b) {
                const double zb = b * 0.005;
                const double rest = 1.0 - std::abs(za) - std::abs(zb);
                if (rest < -1e-12) continue;
                for (int c = -steps / 2; c <= steps / 2; ++c) {
                    const double zc = c * 0.005;
                    if (std::abs(zc) > rest + 1e-12) continue;
                    if (za * za + zb * zb + zc * zc > 1.0 + 1e-12) continue;
                    const double d = (v[0] - za) * (v[0] - za) + (v[1] - zb) * (v[1] - zb) + (v[2] - zc) * (v[2] - zc);
                    best = std::min(best, d);
                }
            }
        }
        const double got = dist2(v, p);
        EXPECT_LE(got, best + 1e-12);
        EXPECT_LE(best - got, 1e-4);
    }
}

TEST(ProjectL1L2, KktAudit) {
    Engine eng(SeedTree(4));
    const std::size_t n = 50, s = 4;
    for (int t = 0; t < 20; ++t) {
        std::vector<double> v(n);
        for (auto& x : v) x = eng.normal() * (t % 2 ? 0.2 : 1.0);
        const auto p = project_l1_l2(v, s);
        EXPECT_LE(l1(p), std::sqrt(4.0) * (1 + 1e-9));
        EXPECT_LE(std::sqrt(dot(p, p)), 1 + 1e-9);
        const double dp = std::sqrt(dist2(v, p));
        for (int k = 0; k < 2000; ++k) {
            const auto z = random_feasible_l1_l2(n, s, eng);
            ASSERT_LE(dp, std::sqrt(dist2(v, z)) + 1e-8);
        }
    }
}

TEST(ProjectL1L2, RejectsNonFinite) {
    EXPECT_THROW(project_l1_l2(std::vector<double>{1.0, NAN}, 1), std::invalid_argument);
    EXPECT_THROW(project_l1_l2(std::vector<double>{1.0, INFINITY}, 1), std::invalid_argument);
    EXPECT_THROW(project_l1_l2(std::vector<double>{1.0}, 0), std::invalid_argument);
}

// --- closed form ------------------------------------------------------------

TEST(ClosedForm, ZeroCorrelationGivesZero) {
    const std::vector<double> b(6, 0.0);
    EXPECT_EQ(closed_form_solution(b, 2, 1.0, 4), b);
    // An empty selection makes A^T q vanish.
    const CirculantOperator op(std::vector<double>{1, 2, 3, 4}, {}, 2);
    RecoverySpec spec;
    spec.constraint = {ConstraintKind::exact_sparse, 2};
    const auto r = recover_closed_form(QuantizedSample{}, op, spec);
    EXPECT_EQ(r.x, std::vector<double>(4, 0.0));
}

TEST(ClosedForm, SaturatesUnitBall) {
    for (std::uint64_t t = 0; t < 20; ++t) {
        auto inst = make_instance(64, 32, 3, 1.0, 0.0, SeedTree(5).child("t", t));
        RecoverySpec spec;
        spec.constraint = {ConstraintKind::exact_sparse, 3};
        spec.lambda = 1e4;  // λ ||H_s(A^T q)|| / m >= 1
        const auto r = recover_closed_form(inst.sample, inst.op, spec);
        EXPECT_NEAR(std::sqrt(dot(r.x, r.x)), 1.0, 1e-15);
    }
}

TEST(ClosedForm, MatchesSupportEnumeration) {
    // n = 8, s = 1, Rademacher ξ, noiseless, β = 0. For each support i the
    // one-dimensional concave problem has maximizer clamp(λ b_i / m, -1, 1).
    const std::size_t n = 8;
    for (std::uint64_t t = 0; t < 50; ++t) {
        const SeedTree seed = SeedTree(6).child("t", t);
        const auto op = CirculantOperator::full(sample_vector(Distribution::standard(Family::rademacher), n, seed.child("xi")));
        const auto x = random_sparse_unit(n, 1, seed.child("x"));
        ChannelConfig ch;
        ch.lambda = 0.5 + 3.0 * Engine(seed.child("lambda")).uniform01();
        const auto sample = measure_and_quantize(x, op, ch, seed.child("channel"));
        const std::vector<double> q(sample.q_corr.begin(), sample.q_corr.end());
        const auto dense = dense_circulant(op.generator());
        std::vector<double> b(n, 0.0);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) b[k] += dense[j][k] * q[j];
        const double m = static_cast<double>(n);
        double best = -1e300;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = std::clamp(ch.lambda * b[i] / m, -1.0, 1.0);
            best = std::max(best, b[i] * z / m - z * z / (2 * ch.lambda));
        }
        RecoverySpec spec;
        spec.constraint = {ConstraintKind::exact_sparse, 1};
        spec.lambda = ch.lambda;
        const auto r = recover_closed_form(sample, op, spec);
        EXPECT_NEAR(r.objective, best, 1e-9);
    }
}

TEST(ClosedForm, EqualsProjectionOfScaledCorrelation) {
    for (std::uint64_t t = 0; t < 200; ++t) {
        const SeedTree seed = SeedTree(7).child("t", t);
        Engine eng(seed.child("params"));
        const std::size_t n = 4 + eng.below(125);
        const std::size_t m = 1 + eng.below(n);
        const std::size_t s = 1 + eng.below(std::min<std::size_t>(n, 6));
        const double lambda = 0.2 + 5 * eng.uniform01();
        auto inst = make_instance(n, m, s, lambda, 0.0, seed);
        RecoverySpec spec;
        spec.constraint = {ConstraintKind::exact_sparse, s};
        spec.lambda = lambda;
        const auto r = recover_closed_form(inst.sample, inst.op, spec);
        auto b = inst.op.adjoint(inst.sample.corrupted_as_real());
        for (auto& v : b) v *= lambda / static_cast<double>(m);
        const auto p = project_sigma_s(b, s);
        for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(r.x[i], p[i], 1e-12) << t;
        ASSERT_LE(nnz(r.x), s);
        ASSERT_LE(std::sqrt(dot(r.x, r.x)), 1 + 1e-9);
    }
}

TEST(ClosedForm, ScalingCovariance) {
    Engine eng(SeedTree(8));
    for (int t = 0; t < 100; ++t) {
        std::vector<double> b(30);
        for (auto& v : b) v = eng.normal();
        const double c = 0.1 + 3 * eng.uniform01();
        const std::size_t m = 1000;  // small λ/m keeps both unclipped
        const auto x1 = closed_form_solution(b, 4, 1.0, m);
        const auto x2 = closed_form_solution(b, 4, c, m);
        EXPECT_EQ(top_s_support(x1, 4), top_s_support(x2, 4));
        for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(x2[i], c * x1[i], 1e-15);
        // Clipped case: support still unchanged.
        const auto x3 = closed_form_solution(b, 4, 1e6, m);
        EXPECT_EQ(top_s_support(x3, 4), top_s_support(x1, 4));
    }
}

// --- φ ------------------------------------------------------------------------

TEST(Phi, ZeroAtOrigin) {
    auto inst = make_instance(16, 8, 2, 1.0, 0.0, SeedTree(9));
    EXPECT_EQ(phi_value(std::vector<double>(16, 0.0), inst.sample, inst.op, 1.0), 0.0);
}

TEST(Phi, SignSymmetry) {
    auto inst = make_instance(16, 8, 2, 1.0, 0.0, SeedTree(10));
    auto q = inst.sample.corrupted_as_real();
    std::vector<double> nq(q.size()), z = random_sparse_unit(16, 3, SeedTree(11)), nz(16);
    for (std::size_t i = 0; i < q.size(); ++i) nq[i] = -q[i];
    for (std::size_t i = 0; i < 16; ++i) nz[i] = -z[i];
    EXPECT_NEAR(phi_value(z, q, inst.op, 1.3), phi_value(nz, nq, inst.op, 1.3), 1e-15);
}

TEST(Phi, MatchesDenseFormula) {
    for (std::uint64_t t = 0; t < 20; ++t) {
        auto inst = make_instance(12, 6, 2, 0.8, 0.0, SeedTree(12).child("t", t));
        const auto z = sample_vector(Distribution::standard(Family::gaussian), 12, SeedTree(13).child("t", t));
        const auto g = dense_circulant(inst.op.generator());
        const auto q = inst.sample.corrupted_as_real();
        double corr = 0.0, quad = 0.0;
        for (std::size_t j = 0; j < 12; ++j) {
            const double gz = dot(g[j], z);
            quad += gz * gz;
        }
        for (std::size_t i = 0; i < q.size(); ++i) corr += q[i] * dot(g[inst.op.rows()[i]], z);
        const double want = corr / 6.0 - quad / (2 * 0.8 * 12.0);
        EXPECT_NEAR(phi_value(z, q, inst.op, 0.8), want, 1e-12 * std::max(1.0, std::abs(want)));
    }
}

// --- exact maximization of φ -------------------------------------------------

TEST(MaximizePhi, BeatsRandomSparseCandidates) {
    const std::size_t n = 12, s = 2;
    auto inst = make_instance(n, 8, s, 1.2, 0.0, SeedTree(14));
    RecoverySpec spec;
    spec.constraint = {ConstraintKind::exact_sparse, s};
    spec.lambda = 1.2;
    spec.solver = Solver::maximize_phi;
    const auto r = recover_maximize_phi(inst.sample, inst.op, spec);
    EXPECT_LE(nnz(r.x), s);
    EXPECT_LE(std::sqrt(dot(r.x, r.x)), 1 + 1e-9);
    const auto q = inst.sample.corrupted_as_real();
    const double best = phi_value(r.x, q, inst.op, 1.2);
    EXPECT_NEAR(best, r.objective, 1e-12);
    Engine eng(SeedTree(15));
    for (int k = 0; k < 10000; ++k) {
        auto z = random_sparse_unit(n, 1 + eng.below(s), SeedTree(16).child("z", k));
        const double rad = std::sqrt(eng.uniform01());
        for (auto& v : z) v *= rad;
        ASSERT_GE(best, phi_value(z, q, inst.op, 1.2) - 1e-12);
    }
}

TEST(MaximizePhi, AgreesWithClosedFormOnIsometricOperator) {
    // ξ = sqrt(n) e_0 with every row selected gives ||Γz||²/n = ||z||², so
    // φ coincides with the isotropic program.
    const std::size_t n = 10;
    for (std::uint64_t t = 0; t < 20; ++t) {
        std::vector<double> xi(n, 0.0);
        xi[0] = std::sqrt(static_cast<double>(n));
        const auto op = CirculantOperator::full(xi);
        const auto x = random_sparse_unit(n, 2, SeedTree(17).child("x", t));
        ChannelConfig ch;
        ch.lambda = t % 2 ? 0.7 : 9.0;
        ch.noise = Distribution{Family::gaussian, 0.0, 0.3, 3.0};
        const auto sample = measure_and_quantize(x, op, ch, SeedTree(17).child("ch", t));
        RecoverySpec spec;
        spec.constraint = {ConstraintKind::exact_sparse, 2};
        spec.lambda = ch.lambda;
        const auto cf = recover_closed_form(sample, op, spec);
        const auto mp = recover_maximize_phi(sample, op, spec);
        EXPECT_NEAR(mp.objective, cf.objective, 1e-10);
        EXPECT_NEAR(phi_value(cf.x, sample, op, ch.lambda), mp.objective, 1e-10);
    }
}

TEST(MaximizePhi, MatchesGridSearch) {
    const std::size_t n = 10, s = 2;
    const double lambda = 0.9;
    auto inst = make_instance(n, 7, s, lambda, 0.0, SeedTree(18));
    RecoverySpec spec;
    spec.constraint = {ConstraintKind::exact_sparse, s};
    spec.lambda = lambda;
    const auto r = recover_maximize_phi(inst.sample, inst.op, spec);

    const auto g = dense_circulant(inst.op.generator());
    const auto q = inst.sample.corrupted_as_real();
    std::vector<double> b(n, 0.0);
    for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t k = 0; k < n; ++k) b[k] += g[inst.op.rows()[i]][k] * q[i];
    std::vector<std::vector<double>> gram(n, std::vector<double>(n, 0.0));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t c = 0; c < n; ++c)
            for (std::size_t j = 0; j < n; ++j) gram[a][c] += g[j][a] * g[j][c];
    const double m = 7.0;
    double best = -1e300;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t c = a + 1; c < n; ++c)
            for (int i = -50; i <= 50; ++i)
                for (int k = -50; k <= 50; ++k) {
                    const double u = 0.02 * i, v = 0.02 * k;
                    if (u * u + v * v > 1.0) continue;
                    const double val = (b[a] * u + b[c] * v) / m -
                                       (gram[a][a] * u * u + 2 * gram[a][c] * u * v + gram[c][c] * v * v) /
                                           (2 * lambda * static_cast<double>(n));
                    best = std::max(best, val);
                }
    EXPECT_GE(r.objective, best - 1e-12);
    EXPECT_LE(r.objective - best, 1e-3);
}

TEST(MaximizePhi, ExhaustiveRefusedAboveTwenty) {
    auto inst = make_instance(24, 12, 2, 1.0, 0.0, SeedTree(19));
    RecoverySpec spec;
    spec.constraint = {ConstraintKind::exact_sparse, 2};
    spec.solver = Solver::maximize_phi;
    EXPECT_THROW(recover_maximize_phi(inst.sample, inst.op, spec, PhiSearch::exhaustive), std::invalid_argument);
    // Automatic mode certifies the closed form's support instead.
    const auto r = recover_maximize_phi(inst.sample, inst.op, spec);
    const auto cf = recover_closed_form(inst.sample, inst.op, spec);
    EXPECT_EQ(r.iterations, 1u);
    for (std::size_t i = 0; i < 24; ++i) {
        if (r.x[i] != 0.0) EXPECT_NE(cf.x[i], 0.0);
    }
}

TEST(RecoverySpec, Validation) {
    RecoverySpec spec;
    spec.constraint = {ConstraintKind::approx_sparse, 2};
    spec.solver = Solver::closed_form;
    EXPECT_THROW(spec.validate(10), std::invalid_argument);
    spec.solver = Solver::maximize_phi;
    EXPECT_THROW(spec.validate(10), std::invalid_argument);
    spec.solver = Solver::lasso_pg;
    EXPECT_NO_THROW(spec.validate(10));
    spec.constraint.s = 0;
    EXPECT_THROW(spec.validate(10), std::invalid_argument);
    spec.constraint.s = 11;
    EXPECT_THROW(spec.validate(10), std::invalid_argument);
    spec.constraint.s = 2;
    spec.lambda = 0.0;
    EXPECT_THROW(spec.validate(10), std::invalid_argument);
}

// --- generalized Lasso --------------------------------------------------------

TEST(LassoPg, ConsistentSystemReachesZero) {
    const std::size_t n = 32;
    const double lambda = 0.7;
    const auto op = CirculantOperator::full(sample_vector(Distribution::standard(Family::gaussian), n, SeedTree(20)));
    // z* strictly inside √2 B1 ∩ B2.
    auto zstar = random_sparse_unit(n, 2, SeedTree(21));
    for (auto& v : zstar) v *= 0.6;
    auto y = op.apply(zstar);
    for (auto& v : y) v /= 2 * lambda;
    RecoverySpec spec;
    spec.constraint = {ConstraintKind::approx_sparse, 2};
    spec.lambda = lambda;
    spec.solver = Solver::lasso_pg;
    spec.pg_max_iters = 20000;
    spec.pg_tol = 1e-14;
    const auto r = recover_lasso_pg(y, op, spec);
    EXPECT_LE(r.objective, 1e-6);
}

TEST(LassoPg, IsometricSigmaMatchesClosedForm) {
    // ξ = e_0, I full, large λ: both programs saturate at H_s(q)/||H_s(q)||.
    // Every |q_i| = 1, so the support is a tie; compare the invariant parts:
    // s entries of magnitude 1/sqrt(s) carrying the signs of q, and equal
    // Lasso objective values.
    const std::size_t n = 16, s = 3;
    std::vector<double> xi(n, 0.0);
    xi[0] = 1.0;
    const auto op = CirculantOperator::full(xi);
    for (std::uint64_t t = 0; t < 10; ++t) {
        const auto x = random_sparse_unit(n, s, SeedTree(22).child("x", t));
        ChannelConfig ch;
        ch.lambda = 50.0;
        const auto sample = measure_and_quantize(x, op, ch, SeedTree(22).child("ch", t));
        RecoverySpec spec;
        spec.constraint = {ConstraintKind::exact_sparse, s};
        spec.lambda = ch.lambda;
        spec.solver = Solver::lasso_pg;
        const auto pg = recover_lasso_pg(sample, op, spec);
        const auto cf = recover_closed_form(sample, op, spec);
        const auto q = sample.corrupted_as_real();
        for (const auto* z : {&pg.x, &cf.x}) {
            EXPECT_EQ(nnz(*z), s);
            for (std::size_t i = 0; i < n; ++i)
                if ((*z)[i] != 0.0) EXPECT_NEAR((*z)[i], q[i] / std::sqrt(3.0), 1e-6);
        }
        std::vector<double> res(n);
        for (std::size_t i = 0; i < n; ++i) res[i] = q[i] - cf.x[i] / (2 * ch.lambda);
        EXPECT_NEAR(pg.objective, std::sqrt(dot(res, res)), 1e-9);
    }
}

TEST(LassoPg, MatchesFrankWolfeCertificate) {
    // n = 6, T = B1 (√1 B1 ∩ B2 = B1). Frank-Wolfe with exact line search
    // gives an independent upper estimate and a duality-gap lower bound.
    const std::size_t n = 6;
    const double lambda = 0.8;
    for (std::uint64_t t = 0; t < 5; ++t) {
        const SeedTree seed = SeedTree(23).child("t", t);
        auto inst = make_instance(n, 5, 1, lambda, 0.0, seed);
        RecoverySpec spec;
        spec.constraint = {ConstraintKind::approx_sparse, 1};
        spec.lambda = lambda;
        spec.solver = Solver::lasso_pg;
        spec.pg_max_iters = 5000;
        spec.pg_tol = 1e-15;
        const auto r = recover_lasso_pg(inst.sample, inst.op, spec);

        const auto g = dense_circulant(inst.op.generator());
        const auto& rows = inst.op.rows();
        const auto y = inst.sample.corrupted_as_real();
        const double c = 1.0 / (2 * lambda);
        auto residual = [&](const std::vector<double>& z) {
            std::vector<double> res(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) res[i] = y[i] - c * dot(g[rows[i]], z);
            return res;
        };
        std::vector<double> z(n, 0.0);
        double lower = -1e300, fz = 0.0;
        for (int it = 0; it < 200000; ++it) {
            const auto res = residual(z);
            fz = 0.5 * dot(res, res);
            std::vector<double> grad(n, 0.0);
            for (std::size_t i = 0; i < rows.size(); ++i)
                for (std::size_t k = 0; k < n; ++k) grad[k] -= c * g[rows[i]][k] * res[i];
            std::size_t best = 0;
            for (std::size_t k = 1; k < n; ++k)
                if (std::abs(grad[k]) > std::abs(grad[best])) best = k;
            std::vector<double> vertex(n, 0.0);
            vertex[best] = grad[best] > 0 ? -1.0 : 1.0;
            std::vector<double> d(n);
            for (std::size_t k = 0; k < n; ++k) d[k] = vertex[k] - z[k];
            const double gap = -dot(grad, d);
            lower = std::max(lower, fz - gap);
            if (gap < 1e-12) break;
            std::vector<double> ad(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) ad[i] = c * dot(g[rows[i]], d);
            const double denom = dot(ad, ad);
            const double step = denom > 0 ? std::clamp(gap / denom, 0.0, 1.0) : 1.0;
            for (std::size_t k = 0; k < n; ++k) z[k] += step * d[k];
        }
        const double pg_half = 0.5 * r.objective * r.objective;
        EXPECT_GE(pg_half, lower - 1e-9);
        EXPECT_LE(r.objective - std::sqrt(2 * std::max(lower, 0.0)), 1e-3);
        EXPECT_LE(r.objective, std::sqrt(2 * fz) + 1e-9);
    }
}

TEST(LassoPg, MonotoneDescentAndFeasibility) {
    for (std::uint64_t t = 0; t < 20; ++t) {
        const SeedTree seed = SeedTree(24).child("t", t);
        auto inst = make_instance(128, 60, 4, 1.5, 0.05, seed);
        RecoverySpec spec;
        spec.constraint = {t % 2 ? ConstraintKind::approx_sparse : ConstraintKind::exact_sparse, 4};
        spec.lambda = 1.5;
        spec.solver = Solver::lasso_pg;
        const auto r = recover_lasso_pg(inst.sample, inst.op, spec);
        ASSERT_GE(r.objective_trace.size(), 2u);
        for (std::size_t k = 1; k < r.objective_trace.size(); ++k)
            ASSERT_LE(r.objective_trace[k], r.objective_trace[k - 1]) << "iteration " << k;
        EXPECT_LE(std::sqrt(dot(r.x, r.x)), 1 + 1e-9);
        if (spec.constraint.kind == ConstraintKind::exact_sparse)
            EXPECT_LE(nnz(r.x), 4u);
        else
            EXPECT_LE(l1(r.x), 2.0 * (1 + 1e-9));
    }
}

TEST(LassoPg, PowerIterationEstimatesGramNorm) {
    const auto op = CirculantOperator::full(sample_vector(Distribution::standard(Family::gaussian), 64, SeedTree(25)));
    const double exact = op.circ_operator_norm() * op.circ_operator_norm();
    const double est = estimate_gram_norm(op, 500);
    EXPECT_LE(est, exact * (1 + 1e-12));
    EXPECT_GE(est, 0.9 * exact);
}
