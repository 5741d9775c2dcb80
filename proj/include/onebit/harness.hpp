#ifndef ONEBIT_HARNESS_HPP
#define ONEBIT_HARNESS_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "circulant.hpp"
#include "detail/parallel.hpp"
#include "detail/vec.hpp"
#include "diagnostics.hpp"
#include "io.hpp"
#include "quantize.hpp"
#include "recover.hpp"
#include "rng.hpp"

namespace onebit {

using json = nlohmann::json;

/// λ = γ max{σ, 1} log(e γ² max{σ, 1} / ρ), σ the sd of the centred noise.
/// This is the dither rule's functional shape with its constant set to 1.
inline double auto_lambda(const Distribution& noise, double rho_target, double gamma1_hint) {
    if (!(rho_target > 0.0 && rho_target <= 1.0))
        throw std::invalid_argument("auto_lambda: rho_target must lie in (0, 1]");
    if (!(gamma1_hint > 0.0)) throw std::invalid_argument("auto_lambda: gamma1_hint must be > 0");
    const double spread = std::max(noise.centred_sd(), 1.0);
    return gamma1_hint * spread * std::log(std::exp(1.0) * gamma1_hint * gamma1_hint * spread / rho_target);
}

// ---------------------------------------------------------------------------
// Configuration

struct LambdaRule {
    enum class Kind { fixed, automatic };
    Kind kind = Kind::fixed;
    std::vector<double> values{1.0};  // fixed: one sweep cell per value
    double rho_target = 0.5;          // automatic
    double gamma1_hint = 1.0;         // automatic
};

struct SignalModel {
    enum class Kind { random_sparse_unit, provided };
    Kind kind = Kind::random_sparse_unit;
    std::string path;
};

/// `identity` replaces the random draw by ξ = e_0 with every row selected.
enum class OperatorModel { random, identity };

struct ExperimentConfig {
    std::size_t n = 64;
    std::size_t s = 1;
    std::vector<std::size_t> m_grid{64};
    std::vector<double> beta_grid{0.0};
    Distribution noise{Family::gaussian, 0.0, 0.0, 3.0};
    std::vector<double> noise_scale_grid;  // empty: {noise.scale}
    Distribution xi_family{Family::gaussian, 0.0, 1.0, 3.0};
    LambdaRule lambda_rule;
    Adversary adversary = Adversary::none;
    Solver solver = Solver::closed_form;
    ConstraintKind constraint = ConstraintKind::exact_sparse;
    std::size_t trials_per_cell = 1;
    std::uint64_t master_seed = 1;
    SignalModel signal_model;
    OperatorModel operator_model = OperatorModel::random;
    /// One (ξ, I) draw per m shared by every trial, instead of one per trial.
    bool fixed_operator = false;
    bool allow_heavy_tail = false;
    double heavy_tail_c1 = 1.0;
    std::size_t pg_max_iters = 500;
    double pg_tol = 1e-8;
    bool record_timing = true;

    [[nodiscard]] std::vector<double> noise_scales() const {
        return noise_scale_grid.empty() ? std::vector<double>{noise.scale} : noise_scale_grid;
    }

    void validate() const {
        auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
        if (n < 1) fail("n must be >= 1");
        if (s < 1 || s > n) fail("s must satisfy 1 <= s <= n");
        if (m_grid.empty()) fail("m_grid must not be empty");
        for (auto m : m_grid)
            if (m < 1 || m > n) fail("every m in m_grid must satisfy 1 <= m <= n");
        if (beta_grid.empty()) fail("beta_grid must not be empty");
        for (double b : beta_grid)
            if (!(b >= 0.0 && b < 1.0)) fail("every beta must lie in [0, 1)");
        if (trials_per_cell < 1) fail("trials_per_cell must be >= 1");
        try {
            noise.validate();
            xi_family.validate();
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
        for (double sc : noise_scales())
            if (!(sc >= 0.0) || !std::isfinite(sc)) fail("noise scales must be finite and >= 0");
        if (noise.family == Family::student_t && !allow_heavy_tail)
            fail("student_t noise requires allow_heavy_tail = true");
        if (lambda_rule.kind == LambdaRule::Kind::fixed) {
            if (lambda_rule.values.empty()) fail("lambda_rule.value must not be empty");
            for (double l : lambda_rule.values)
                if (!(l > 0.0) || !std::isfinite(l)) fail("lambda values must be > 0");
        } else {
            if (!(lambda_rule.rho_target > 0.0 && lambda_rule.rho_target < 1.0))
                fail("lambda_rule.rho_target must lie in (0, 1)");
            if (!(lambda_rule.gamma1_hint > 0.0)) fail("lambda_rule.gamma1_hint must be > 0");
        }
        if (solver != Solver::lasso_pg && constraint != ConstraintKind::exact_sparse)
            fail("solver " + std::string(to_string(solver)) + " requires constraint exact_sparse");
        if (signal_model.kind == SignalModel::Kind::provided && signal_model.path.empty())
            fail("signal_model.path is required for provided signals");
        if (!(pg_tol > 0.0)) fail("pg_tol must be > 0");
        if (!(heavy_tail_c1 > 0.0)) fail("heavy_tail_c1 must be > 0");
    }
};

// ---------------------------------------------------------------------------
// JSON mapping. Unknown keys are rejected at every level.

namespace detail {

inline void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <class T>
T get_as(const json& j, const char* key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
    return j.contains(key) ? get_as<T>(j, key, where) : fallback;
}

template <class F>
auto enum_from(const json& j, const char* key, F parse, const std::string& where) {
    try {
        return parse(get_as<std::string>(j, key, where));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

}  // namespace detail

inline Distribution distribution_from_json(const json& j, const std::string& where) {
    detail::check_keys(j, {"family", "mean", "scale", "df"}, where);
    Distribution d;
    d.family = detail::enum_from(j, "family", family_from_string, where);
    d.mean = detail::get_or(j, "mean", 0.0, where);
    d.scale = detail::get_or(j, "scale", 1.0, where);
    d.df = detail::get_or(j, "df", 3.0, where);
    return d;
}

inline json to_json(const Distribution& d) {
    json j{{"family", to_string(d.family)}, {"mean", d.mean}, {"scale", d.scale}};
    if (d.family == Family::student_t) j["df"] = d.df;
    return j;
}

inline ExperimentConfig config_from_json(const json& j) {
    const std::string w = "config";
    detail::check_keys(j,
                       {"n", "s", "m_grid", "beta_grid", "noise", "noise_scale_grid", "xi_family", "lambda_rule",
                        "adversary", "solver", "constraint", "trials_per_cell", "master_seed", "signal_model",
                        "operator_model", "fixed_operator", "allow_heavy_tail", "heavy_tail_c1", "pg_max_iters",
                        "pg_tol", "record_timing"},
                       w);
    ExperimentConfig c;
    c.n = detail::get_as<std::size_t>(j, "n", w);
    c.s = detail::get_as<std::size_t>(j, "s", w);
    c.m_grid = detail::get_as<std::vector<std::size_t>>(j, "m_grid", w);
    c.beta_grid = detail::get_or(j, "beta_grid", std::vector<double>{0.0}, w);
    if (j.contains("noise")) c.noise = distribution_from_json(j.at("noise"), w + ".noise");
    c.noise_scale_grid = detail::get_or(j, "noise_scale_grid", std::vector<double>{}, w);
    if (j.contains("xi_family")) c.xi_family = distribution_from_json(j.at("xi_family"), w + ".xi_family");
    if (j.contains("lambda_rule")) {
        const auto& lr = j.at("lambda_rule");
        const std::string lw = w + ".lambda_rule";
        detail::check_keys(lr, {"rule", "value", "rho_target", "gamma1_hint"}, lw);
        const auto rule = detail::get_as<std::string>(lr, "rule", lw);
        if (rule == "fixed") {
            c.lambda_rule.kind = LambdaRule::Kind::fixed;
            const auto& v = lr.at("value");
            c.lambda_rule.values = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
        } else if (rule == "auto") {
            c.lambda_rule.kind = LambdaRule::Kind::automatic;
            c.lambda_rule.rho_target = detail::get_as<double>(lr, "rho_target", lw);
            c.lambda_rule.gamma1_hint = detail::get_or(lr, "gamma1_hint", 1.0, lw);
        } else {
            throw ConfigError(lw + ".rule: expected 'fixed' or 'auto'");
        }
    }
    if (j.contains("adversary")) c.adversary = detail::enum_from(j, "adversary", adversary_from_string, w);
    if (j.contains("solver")) c.solver = detail::enum_from(j, "solver", solver_from_string, w);
    if (j.contains("constraint")) c.constraint = detail::enum_from(j, "constraint", constraint_from_string, w);
    c.trials_per_cell = detail::get_or<std::size_t>(j, "trials_per_cell", 1, w);
    c.master_seed = detail::get_or<std::uint64_t>(j, "master_seed", 1, w);
    if (j.contains("signal_model")) {
        const auto& sm = j.at("signal_model");
        const std::string sw = w + ".signal_model";
        detail::check_keys(sm, {"kind", "path"}, sw);
        const auto kind = detail::get_as<std::string>(sm, "kind", sw);
        if (kind == "random_sparse_unit") {
            c.signal_model.kind = SignalModel::Kind::random_sparse_unit;
        } else if (kind == "provided") {
            c.signal_model.kind = SignalModel::Kind::provided;
            c.signal_model.path = detail::get_as<std::string>(sm, "path", sw);
        } else {
            throw ConfigError(sw + ".kind: expected 'random_sparse_unit' or 'provided'");
        }
    }
    if (j.contains("operator_model")) {
        const auto om = detail::get_as<std::string>(j, "operator_model", w);
        if (om == "random")
            c.operator_model = OperatorModel::random;
        else if (om == "identity")
            c.operator_model = OperatorModel::identity;
        else
            throw ConfigError(w + ".operator_model: expected 'random' or 'identity'");
    }
    c.fixed_operator = detail::get_or(j, "fixed_operator", false, w);
    c.allow_heavy_tail = detail::get_or(j, "allow_heavy_tail", false, w);
    c.heavy_tail_c1 = detail::get_or(j, "heavy_tail_c1", 1.0, w);
    c.pg_max_iters = detail::get_or<std::size_t>(j, "pg_max_iters", 500, w);
    c.pg_tol = detail::get_or(j, "pg_tol", 1e-8, w);
    c.record_timing = detail::get_or(j, "record_timing", true, w);
    c.validate();
    return c;
}

inline json to_json(const ExperimentConfig& c) {
    json lr;
    if (c.lambda_rule.kind == LambdaRule::Kind::fixed) {
        lr = {{"rule", "fixed"}, {"value", c.lambda_rule.values}};
    } else {
        lr = {{"rule", "auto"}, {"rho_target", c.lambda_rule.rho_target}, {"gamma1_hint", c.lambda_rule.gamma1_hint}};
    }
    json sm{{"kind", c.signal_model.kind == SignalModel::Kind::provided ? "provided" : "random_sparse_unit"}};
    if (c.signal_model.kind == SignalModel::Kind::provided) sm["path"] = c.signal_model.path;
    return json{{"n", c.n},
                {"s", c.s},
                {"m_grid", c.m_grid},
                {"beta_grid", c.beta_grid},
                {"noise", to_json(c.noise)},
                {"noise_scale_grid", c.noise_scales()},
                {"xi_family", to_json(c.xi_family)},
                {"lambda_rule", lr},
                {"adversary", to_string(c.adversary)},
                {"solver", to_string(c.solver)},
                {"constraint", to_string(c.constraint)},
                {"trials_per_cell", c.trials_per_cell},
                {"master_seed", c.master_seed},
                {"signal_model", sm},
                {"operator_model", c.operator_model == OperatorModel::identity ? "identity" : "random"},
                {"fixed_operator", c.fixed_operator},
                {"allow_heavy_tail", c.allow_heavy_tail},
                {"heavy_tail_c1", c.heavy_tail_c1},
                {"pg_max_iters", c.pg_max_iters},
                {"pg_tol", c.pg_tol},
                {"record_timing", c.record_timing}};
}

inline ExperimentConfig load_config(const std::string& path) {
    const auto text = read_text_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + path + "': " + e.what());
    }
    return config_from_json(j);
}

// ---------------------------------------------------------------------------
// Trials

/// One grid point of a sweep. λ is already resolved.
struct Cell {
    std::size_t index = 0;
    std::size_t m = 0;
    double beta = 0.0;
    double noise_scale = 0.0;
    double lambda = 1.0;
};

struct TrialRecord {
    std::size_t n = 0;
    std::size_t s = 0;
    std::size_t cell = 0;
    std::size_t m = 0;
    double beta = 0.0;
    Family noise_family = Family::gaussian;
    double noise_mean = 0.0;
    double noise_scale = 0.0;
    double lambda = 0.0;
    Adversary adversary = Adversary::none;
    Solver solver = Solver::closed_form;
    std::size_t trial = 0;
    std::size_t realized_m = 0;
    std::size_t hamming_used = 0;
    std::size_t budget = 0;
    double error_l2 = std::numeric_limits<double>::quiet_NaN();
    std::size_t iterations = 0;
    bool converged = false;
    double wall_ms = 0.0;
    std::string seed_path;
    bool failed = false;
    std::string failure;
    bool norm_warning = false;
};

/// Cells in canonical order: m, then beta, then noise scale, then λ.
inline std::vector<Cell> expand_cells(const ExperimentConfig& cfg) {
    std::vector<Cell> cells;
    for (auto m : cfg.m_grid)
        for (double beta : cfg.beta_grid)
            for (double scale : cfg.noise_scales()) {
                std::vector<double> lambdas;
                if (cfg.lambda_rule.kind == LambdaRule::Kind::fixed) {
                    lambdas = cfg.lambda_rule.values;
                } else {
                    Distribution nz = cfg.noise;
                    nz.scale = scale;
                    lambdas = {auto_lambda(nz, cfg.lambda_rule.rho_target, cfg.lambda_rule.gamma1_hint)};
                }
                for (double lambda : lambdas) cells.push_back({cells.size(), m, beta, scale, lambda});
            }
    return cells;
}

/// Trial t uses the same seed in every cell (common random numbers): cells
/// differ only in their parameters, so cell-to-cell comparisons are paired.
/// Selectors drawn for different m from one seed are nested.
inline SeedTree trial_seed(const ExperimentConfig& cfg, const Cell& /*cell*/, std::size_t trial) {
    return SeedTree(cfg.master_seed).child("trial", trial);
}

inline CirculantOperator draw_operator(const ExperimentConfig& cfg, std::size_t m, const SeedTree& trial_seed) {
    if (cfg.operator_model == OperatorModel::identity) {
        std::vector<double> xi(cfg.n, 0.0);
        xi[0] = 1.0;
        std::vector<std::size_t> rows(cfg.n);
        for (std::size_t i = 0; i < cfg.n; ++i) rows[i] = i;
        return CirculantOperator(std::move(xi), std::move(rows), m);
    }
    const SeedTree root = cfg.fixed_operator ? SeedTree(cfg.master_seed).child("operator", m) : trial_seed;
    return CirculantOperator(sample_vector(cfg.xi_family, cfg.n, root.child("xi")),
                             sample_selectors(cfg.n, m, root.child("selectors")), m);
}

/// Loads the provided signal, if the config names one.
inline std::optional<std::vector<double>> load_signal(const ExperimentConfig& cfg) {
    if (cfg.signal_model.kind != SignalModel::Kind::provided) return std::nullopt;
    auto x = read_vector_file(cfg.signal_model.path);
    if (x.size() != cfg.n)
        throw ConfigError("provided signal has length " + std::to_string(x.size()) + ", expected n = " +
                          std::to_string(cfg.n));
    return x;
}

/// One end-to-end trial. Failures inside the pipeline are recorded in the
/// returned record, never thrown.
inline TrialRecord run_trial(const ExperimentConfig& cfg, const Cell& cell, std::size_t trial,
                             const std::optional<std::vector<double>>& provided = std::nullopt) {
    const SeedTree seed = trial_seed(cfg, cell, trial);
    TrialRecord rec;
    rec.n = cfg.n;
    rec.s = cfg.s;
    rec.cell = cell.index;
    rec.m = cell.m;
    rec.beta = cell.beta;
    rec.noise_family = cfg.noise.family;
    rec.noise_mean = cfg.noise.mean;
    rec.noise_scale = cell.noise_scale;
    rec.lambda = cell.lambda;
    rec.adversary = cfg.adversary;
    rec.solver = cfg.solver;
    rec.trial = trial;
    rec.seed_path = seed.path_string();
    rec.budget = corruption_budget(cell.beta, cell.m);
    try {
        const auto x = provided ? *provided : random_sparse_unit(cfg.n, cfg.s, seed.child("signal"));
        const auto op = draw_operator(cfg, cell.m, seed);
        rec.realized_m = op.realized_m();

        ChannelConfig ch;
        ch.noise = cfg.noise;
        ch.noise.scale = cell.noise_scale;
        ch.lambda = cell.lambda;
        ch.beta = cell.beta;
        ch.adversary = cfg.adversary;

        RecoverySpec spec;
        spec.constraint = {cfg.constraint, cfg.s};
        spec.lambda = cell.lambda;
        spec.solver = cfg.solver;
        spec.pg_max_iters = cfg.pg_max_iters;
        spec.pg_tol = cfg.pg_tol;

        const auto t0 = std::chrono::steady_clock::now();
        const auto sample = measure_and_quantize(x, op, ch, seed.child("channel"));
        const auto result = recover(sample, op, spec);
        const auto t1 = std::chrono::steady_clock::now();

        rec.hamming_used = sample.hamming();
        rec.norm_warning = sample.norm_warning;
        rec.iterations = result.iterations;
        rec.converged = result.converged;
        std::vector<double> diff(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) diff[i] = result.x[i] - x[i];
        rec.error_l2 = detail::norm2(diff);
        if (cfg.record_timing) rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    } catch (const std::exception& e) {
        rec.failed = true;
        rec.failure = e.what();
        rec.error_l2 = std::numeric_limits<double>::quiet_NaN();
        rec.converged = false;
    }
    return rec;
}

// ---------------------------------------------------------------------------
// Sweeps

/// Linear-interpolation quantile (p in [0, 1]) of unsorted values.
inline double quantile(std::vector<double> v, double p) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

struct CellAggregate {
    Cell cell;
    std::size_t trials = 0;
    std::size_t failures = 0;
    std::size_t budget = 0;
    std::size_t max_hamming = 0;
    double median_error = std::numeric_limits<double>::quiet_NaN();
    double p90_error = std::numeric_limits<double>::quiet_NaN();
    std::optional<HeavyTailCheck> heavy_tail;
};

struct SweepResult {
    std::vector<Cell> cells;
    std::vector<TrialRecord> records;  // ordered by (cell, trial)
    std::vector<CellAggregate> aggregates;
};

inline std::vector<CellAggregate> aggregate(const std::vector<Cell>& cells, const std::vector<TrialRecord>& records) {
    std::vector<CellAggregate> out;
    for (const auto& cell : cells) {
        CellAggregate a;
        a.cell = cell;
        a.budget = corruption_budget(cell.beta, cell.m);
        std::vector<double> errors;
        for (const auto& r : records) {
            if (r.cell != cell.index) continue;
            ++a.trials;
            a.max_hamming = std::max(a.max_hamming, r.hamming_used);
            if (r.failed)
                ++a.failures;
            else
                errors.push_back(r.error_l2);
        }
        a.median_error = quantile(errors, 0.5);
        a.p90_error = quantile(errors, 0.9);
        out.push_back(std::move(a));
    }
    return out;
}

/// Worker count from ONEBIT_WORKERS, else `fallback`.
inline std::size_t workers_from_env(std::size_t fallback) {
    if (const char* env = std::getenv("ONEBIT_WORKERS")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
        throw ConfigError("ONEBIT_WORKERS must be a positive integer");
    }
    return fallback;
}

/// Runs every cell x trial. Per-trial seeds depend only on (master seed,
/// trial index), so the output is independent of `workers`.
inline SweepResult run_sweep(const ExperimentConfig& cfg, std::size_t workers = 1) {
    cfg.validate();
    SweepResult res;
    res.cells = expand_cells(cfg);
    const auto provided = load_signal(cfg);
    const std::size_t per = cfg.trials_per_cell;
    res.records.resize(res.cells.size() * per);
    detail::parallel_for(res.records.size(), workers, [&](std::size_t task) {
        res.records[task] = run_trial(cfg, res.cells[task / per], task % per, provided);
    });
    for (const auto& r : res.records)
        if (r.hamming_used > r.budget)
            throw std::logic_error("corruption budget exceeded in trial " + r.seed_path);
    res.aggregates = aggregate(res.cells, res.records);
    if (cfg.noise.family == Family::student_t) {
        for (auto& a : res.aggregates) {
            Distribution nz = cfg.noise;
            nz.scale = a.cell.noise_scale;
            const double rho = cfg.lambda_rule.kind == LambdaRule::Kind::automatic ? cfg.lambda_rule.rho_target : 0.5;
            a.heavy_tail = check_heavy_tail(nz, a.cell.lambda, rho, cfg.heavy_tail_c1, 200000,
                                            SeedTree(cfg.master_seed).child("heavy_tail", a.cell.index));
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Output

inline const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols{
        "n",      "s",     "m",          "beta",         "noise_family", "noise_mean", "noise_scale",
        "lambda", "adversary", "solver", "trial",        "realized_m",   "hamming_used", "error_l2",
        "iterations", "converged", "wall_ms", "seed_path"};
    return cols;
}

inline std::string csv_row(const TrialRecord& r) {
    std::string out;
    auto put = [&](const std::string& v) {
        if (!out.empty()) out += ',';
        out += v;
    };
    put(std::to_string(r.n));
    put(std::to_string(r.s));
    put(std::to_string(r.m));
    put(format_double(r.beta));
    put(std::string(to_string(r.noise_family)));
    put(format_double(r.noise_mean));
    put(format_double(r.noise_scale));
    put(format_double(r.lambda));
    put(std::string(to_string(r.adversary)));
    put(std::string(to_string(r.solver)));
    put(std::to_string(r.trial));
    put(std::to_string(r.realized_m));
    put(std::to_string(r.hamming_used));
    put(format_double(r.error_l2));
    put(std::to_string(r.iterations));
    put(r.converged ? "true" : "false");
    put(format_double(r.wall_ms));
    put(r.seed_path);
    return out;
}

inline std::string to_csv(const std::vector<TrialRecord>& records) {
    std::string out;
    for (std::size_t i = 0; i < csv_columns().size(); ++i) {
        if (i) out += ',';
        out += csv_columns()[i];
    }
    out += '\n';
    for (const auto& r : records) {
        out += csv_row(r);
        out += '\n';
    }
    return out;
}

inline json to_json(const TrialRecord& r) {
    json j{{"n", r.n},
           {"s", r.s},
           {"cell", r.cell},
           {"m", r.m},
           {"beta", r.beta},
           {"noise_family", to_string(r.noise_family)},
           {"noise_mean", r.noise_mean},
           {"noise_scale", r.noise_scale},
           {"lambda", r.lambda},
           {"adversary", to_string(r.adversary)},
           {"solver", to_string(r.solver)},
           {"trial", r.trial},
           {"realized_m", r.realized_m},
           {"hamming_used", r.hamming_used},
           {"budget", r.budget},
           {"iterations", r.iterations},
           {"converged", r.converged},
           {"wall_ms", r.wall_ms},
           {"seed_path", r.seed_path},
           {"failed", r.failed},
           {"norm_warning", r.norm_warning}};
    j["error_l2"] = std::isfinite(r.error_l2) ? json(r.error_l2) : json(nullptr);
    if (r.failed) j["failure"] = r.failure;
    return j;
}

inline json to_json(const HeavyTailCheck& h) {
    return json{{"exceed_probability", h.exceed_probability},
                {"tail_mean", h.tail_mean},
                {"abs_mean", h.abs_mean},
                {"threshold", h.threshold},
                {"samples", h.samples},
                {"ok", h.ok}};
}

inline json summary_json(const ExperimentConfig& cfg, const SweepResult& res) {
    json cells = json::array();
    for (const auto& a : res.aggregates) {
        json c{{"cell", a.cell.index},
               {"m", a.cell.m},
               {"beta", a.cell.beta},
               {"noise_scale", a.cell.noise_scale},
               {"lambda", a.cell.lambda},
               {"trials", a.trials},
               {"failures", a.failures},
               {"budget", a.budget},
               {"max_hamming", a.max_hamming}};
        c["median_error"] = std::isfinite(a.median_error) ? json(a.median_error) : json(nullptr);
        c["p90_error"] = std::isfinite(a.p90_error) ? json(a.p90_error) : json(nullptr);
        if (a.heavy_tail) c["heavy_tail_check"] = to_json(*a.heavy_tail);
        cells.push_back(std::move(c));
    }
    json failures = json::array();
    for (const auto& r : res.records)
        if (r.failed) failures.push_back({{"cell", r.cell}, {"trial", r.trial}, {"failure", r.failure}});
    std::size_t warnings = 0;
    for (const auto& r : res.records) warnings += r.norm_warning;
    return json{{"config", to_json(cfg)}, {"cells", cells}, {"failures", failures}, {"norm_warnings", warnings}};
}

// ---------------------------------------------------------------------------
// Diagnostics reports

inline json to_json(const GrowthReport& g) {
    return json{{"r", g.r}, {"gamma1_hat", g.gamma1_hat}, {"argmax_k", g.argmax_k}};
}

inline json to_json(const GrowthBatchReport& g) {
    return json{{"r", g.r},
                {"probe_count", g.probe_count},
                {"max_gamma1", g.max_gamma1},
                {"median_gamma1", g.median_gamma1},
                {"argmax_k", g.argmax_k},
                {"slack", g.slack},
                {"bound", g.bound},
                {"within_bound", g.within_bound}};
}

inline json to_json(const IsomorphismReport& r) {
    return json{{"r", r.r},
                {"kappa_hat", r.kappa_hat},
                {"kappa_prime_hat", r.kappa_prime_hat},
                {"probe_count", r.probe_count}};
}

// ---------------------------------------------------------------------------
// Operator description files used by the `recover` subcommand:
//   {"n": N, "m_nominal": M, "xi": [...], "rows": [...]}            explicit
//   {"n": N, "m_nominal": M, "xi_family": {...}, "seed": S}          seeded
// A seeded description draws ξ from seed/"xi" and I from seed/"selectors".

inline CirculantOperator operator_from_json(const json& j) {
    const std::string w = "operator";
    detail::check_keys(j, {"n", "m_nominal", "xi", "rows", "xi_family", "seed"}, w);
    const auto n = detail::get_as<std::size_t>(j, "n", w);
    const auto m = detail::get_as<std::size_t>(j, "m_nominal", w);
    if (n < 1 || m > n) throw ConfigError("operator: need n >= 1 and m_nominal <= n");
    try {
        if (j.contains("xi")) {
            auto xi = detail::get_as<std::vector<double>>(j, "xi", w);
            if (xi.size() != n) throw ConfigError("operator.xi: length must equal n");
            auto rows = detail::get_as<std::vector<std::size_t>>(j, "rows", w);
            return CirculantOperator(std::move(xi), std::move(rows), m);
        }
        const auto fam = distribution_from_json(j.at("xi_family"), w + ".xi_family");
        const SeedTree seed(detail::get_as<std::uint64_t>(j, "seed", w));
        std::vector<std::size_t> rows = j.contains("rows") ? detail::get_as<std::vector<std::size_t>>(j, "rows", w)
                                                           : sample_selectors(n, m, seed.child("selectors"));
        return CirculantOperator(sample_vector(fam, n, seed.child("xi")), std::move(rows), m);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("operator: ") + e.what());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("operator: ") + e.what());
    }
}

inline json operator_to_json(const CirculantOperator& op) {
    return json{{"n", op.n()}, {"m_nominal", op.m_nominal()}, {"xi", op.generator()}, {"rows", op.rows()}};
}

}  // namespace onebit

#endif  // ONEBIT_HARNESS_HPP
