// onebit: command-line front end for simulation, sweeps, diagnostics and
// recovery from stored sign vectors.
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "onebit/onebit.hpp"

namespace {

using namespace onebit;

constexpr int kConfigError = 2;
constexpr int kIoError = 3;

struct SimulateArgs {
    std::string config;
    std::size_t cell = 0;
    std::size_t trial = 0;
    std::string emit_signs;
    std::string emit_operator;
    std::string emit_signal;
};

struct SweepArgs {
    std::string config;
    std::string csv;
    std::string json_out;
    std::size_t workers = 0;
};

struct DiagnoseArgs {
    std::size_t n = 1024;
    std::size_t r = 4;
    std::size_t m = 0;
    std::string xi = "gaussian";
    std::uint64_t seed = 1;
    std::size_t trials = 200;
    double slack = 3.0;
    std::size_t workers = 0;
};

struct RecoverArgs {
    std::string signs;
    std::string op;
    std::size_t s = 1;
    double lambda = 1.0;
    std::string solver = "closed_form";
    std::string constraint = "exact_sparse";
    std::size_t pg_max_iters = 500;
    double pg_tol = 1e-8;
    std::string out;
};

std::size_t resolve_workers(std::size_t cli) { return cli > 0 ? cli : workers_from_env(1); }

int cmd_simulate(const SimulateArgs& a) {
    const auto cfg = load_config(a.config);
    const auto cells = expand_cells(cfg);
    if (a.cell >= cells.size()) throw ConfigError("--cell out of range (" + std::to_string(cells.size()) + " cells)");
    const auto& cell = cells[a.cell];
    const auto provided = load_signal(cfg);
    const auto rec = run_trial(cfg, cell, a.trial, provided);

    if (!a.emit_signs.empty() || !a.emit_operator.empty() || !a.emit_signal.empty()) {
        // Re-derive the trial's data so it can be replayed through `recover`.
        const SeedTree seed = trial_seed(cfg, cell, a.trial);
        const auto x = provided ? *provided : random_sparse_unit(cfg.n, cfg.s, seed.child("signal"));
        const auto op = draw_operator(cfg, cell.m, seed);
        ChannelConfig ch;
        ch.noise = cfg.noise;
        ch.noise.scale = cell.noise_scale;
        ch.lambda = cell.lambda;
        ch.beta = cell.beta;
        ch.adversary = cfg.adversary;
        const auto sample = measure_and_quantize(x, op, ch, seed.child("channel"));
        if (!a.emit_signs.empty()) write_text_file(a.emit_signs, format_signs(sample.q_corr));
        if (!a.emit_operator.empty()) write_text_file(a.emit_operator, operator_to_json(op).dump() + "\n");
        if (!a.emit_signal.empty()) write_text_file(a.emit_signal, format_vector(x));
    }
    std::cout << to_json(rec).dump(2) << "\n";
    return 0;
}

int cmd_sweep(const SweepArgs& a) {
    const auto cfg = load_config(a.config);
    const auto res = run_sweep(cfg, resolve_workers(a.workers));
    const auto csv = to_csv(res.records);
    const auto summary = summary_json(cfg, res).dump(2) + "\n";
    if (a.csv.empty())
        std::cout << csv;
    else
        write_text_file(a.csv, csv);
    if (!a.json_out.empty())
        write_text_file(a.json_out, summary);
    else if (!a.csv.empty())
        std::cout << summary;
    return 0;
}

int cmd_diagnose(const DiagnoseArgs& a) {
    Distribution fam;
    try {
        fam = Distribution::standard(family_from_string(a.xi));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (a.n < 1 || a.r < 1 || a.r > a.n) throw ConfigError("diagnose: need 1 <= r <= n");
    if (a.m > a.n) throw ConfigError("diagnose: need m <= n");
    if (a.trials < 1) throw ConfigError("diagnose: trials must be >= 1");
    const SeedTree seed(a.seed);
    const std::size_t m = a.m == 0 ? a.n : a.m;
    const std::size_t workers = resolve_workers(a.workers);
    const CirculantOperator op(sample_vector(fam, a.n, seed.child("xi")), sample_selectors(a.n, m, seed.child("selectors")),
                               m);
    const auto growth = certify_growth_on_images(op, a.r, a.trials, seed.child("growth"), a.slack, workers);
    const auto iso = certify_isomorphism(op, a.r, a.trials, seed.child("isomorphism"), workers);
    const double kappa = sparse_operator_norm(op, a.r, a.trials, seed.child("operator_norm"), workers);
    json out{{"n", a.n},
             {"r", a.r},
             {"m_nominal", m},
             {"realized_m", op.realized_m()},
             {"xi_family", a.xi},
             {"seed", a.seed},
             {"growth", to_json(growth)},
             {"isomorphism", to_json(iso)},
             {"sparse_operator_norm", kappa}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_recover(const RecoverArgs& a) {
    const auto q = read_signs_file(a.signs);
    json opj;
    try {
        opj = json::parse(read_text_file(a.op));
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + a.op + "': " + e.what());
    }
    const auto op = operator_from_json(opj);
    if (q.size() != op.realized_m())
        throw ConfigError("signs file has " + std::to_string(q.size()) + " entries but the operator selects " +
                          std::to_string(op.realized_m()) + " rows");
    RecoverySpec spec;
    try {
        spec.constraint = {constraint_from_string(a.constraint), a.s};
        spec.solver = solver_from_string(a.solver);
        spec.lambda = a.lambda;
        spec.pg_max_iters = a.pg_max_iters;
        spec.pg_tol = a.pg_tol;
        spec.validate(op.n());
        if (op.m_nominal() < 1) throw std::invalid_argument("operator m_nominal must be >= 1");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    QuantizedSample sample;
    sample.q = q;
    sample.q_corr = q;
    const auto result = recover(sample, op, spec);
    const auto text = format_vector(result.x);
    if (a.out.empty())
        std::cout << text;
    else
        write_text_file(a.out, text);
    std::cerr << "objective " << format_double(result.objective) << " iterations " << result.iterations
              << (result.converged ? " converged" : " not-converged") << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"One-bit compressed sensing with subsampled circulant matrices"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run one trial and print its record as JSON");
    simulate->add_option("-c,--config", sim.config, "Experiment config (JSON)")->required();
    simulate->add_option("--cell", sim.cell, "Cell index in canonical grid order");
    simulate->add_option("--trial", sim.trial, "Trial index");
    simulate->add_option("--emit-signs", sim.emit_signs, "Write the corrupted sign vector here");
    simulate->add_option("--emit-operator", sim.emit_operator, "Write the operator description here");
    simulate->add_option("--emit-signal", sim.emit_signal, "Write the true signal here");

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Run the full grid; CSV rows plus JSON summary");
    sweep->add_option("-c,--config", sw.config, "Experiment config (JSON)")->required();
    sweep->add_option("--csv", sw.csv, "CSV output path (stdout if omitted)");
    sweep->add_option("--json", sw.json_out, "JSON summary output path");
    sweep->add_option("-j,--workers", sw.workers, "Worker threads (default: ONEBIT_WORKERS or 1)");

    DiagnoseArgs dg;
    auto* diagnose = app.add_subcommand("diagnose", "Growth / isomorphism reports for a random circulant operator");
    diagnose->add_option("-n", dg.n, "Ambient dimension");
    diagnose->add_option("-r", dg.r, "Probe sparsity");
    diagnose->add_option("-m", dg.m, "Nominal measurement count (default n)");
    diagnose->add_option("--xi", dg.xi, "Generator family: gaussian, rademacher, uniform_pm");
    diagnose->add_option("--seed", dg.seed, "Master seed");
    diagnose->add_option("--trials", dg.trials, "Number of probes");
    diagnose->add_option("--slack", dg.slack, "Slack factor on the growth bound");
    diagnose->add_option("-j,--workers", dg.workers, "Worker threads");

    RecoverArgs rc;
    auto* rec = app.add_subcommand("recover", "Recover x from a signs file and an operator description");
    rec->add_option("--signs", rc.signs, "Signs file, one +1/-1 per selected row")->required();
    rec->add_option("--operator", rc.op, "Operator description (JSON)")->required();
    rec->add_option("-s", rc.s, "Sparsity")->required();
    rec->add_option("--lambda", rc.lambda, "Dither level")->required();
    rec->add_option("--solver", rc.solver, "closed_form | maximize_phi | lasso_pg");
    rec->add_option("--constraint", rc.constraint, "exact_sparse | approx_sparse");
    rec->add_option("--pg-max-iters", rc.pg_max_iters, "Projected-gradient iteration cap");
    rec->add_option("--pg-tol", rc.pg_tol, "Projected-gradient relative tolerance");
    rec->add_option("-o,--out", rc.out, "Output path (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (*simulate) return cmd_simulate(sim);
        if (*sweep) return cmd_sweep(sw);
        if (*diagnose) return cmd_diagnose(dg);
        if (*rec) return cmd_recover(rc);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
