#include "fskmc/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "fskmc/config.hpp"
#include "fskmc/csv.hpp"
#include "fskmc/errors.hpp"
#include "fskmc/harness.hpp"
#include "fskmc/oracle.hpp"

namespace fskmc {

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::string output;
    std::string scheme;
};

void add_common(CLI::App* cmd, Options& opt) {
    cmd->add_option("--config", opt.config, "run configuration file")->required();
    cmd->add_option("--seed", opt.seed, "base seed (overrides run.seed)");
    cmd->add_option("--workers", opt.workers, "worker threads (overrides run.workers)");
    cmd->add_option("--output", opt.output, "CSV output path (default: stdout)");
    cmd->add_option("--scheme", opt.scheme, "lie | strang | random | random-raw | ssa (overrides scheme.kind)");
}

RunConfig resolve(const Options& opt) {
    RunConfig cfg = load_config(opt.config);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.workers) cfg.workers = *opt.workers;
    if (!opt.scheme.empty()) apply_scheme_override(cfg, opt.scheme);
    cfg.validate();
    return cfg;
}

// Exact initial law: a point mass, or the product Bernoulli measure that the
// per-replica random initial conditions sample from.
Eigen::VectorXd initial_law(const RunConfig& cfg, const Lattice& lat, const oracle::StateCodec& codec) {
    if (cfg.initial.kind != InitialCondition::Kind::random) {
        return oracle::point_mass(codec, make_initial(cfg, lat, 0));
    }
    Eigen::VectorXd p(static_cast<Eigen::Index>(codec.dimension()));
    std::vector<Spin> sigma(codec.sites());
    for (std::size_t s = 0; s < codec.dimension(); ++s) {
        codec.decode(s, sigma);
        double w = 1.0;
        for (Spin v : sigma) w *= v ? cfg.initial.density : 1.0 - cfg.initial.density;
        p(static_cast<Eigen::Index>(s)) = w;
    }
    return p;
}

void cmd_run(const RunConfig& cfg, std::ostream& csv) {
    const auto stats = run_ensemble(cfg, cfg.engine);
    write_trajectory_header(csv);
    write_trajectory_rows(csv, stats);
}

void cmd_compare(const RunConfig& cfg, std::ostream& csv, std::ostream& log) {
    const auto reference = run_ensemble(cfg, Engine::ssa, cfg.reference_samples, reference_seed(cfg.seed));
    const auto test = run_ensemble(cfg, cfg.engine);
    write_trajectory_header(csv);
    write_trajectory_rows(csv, reference);
    write_trajectory_rows(csv, test);
    for (const auto& obs : cfg.observables) {
        const auto e = weak_error(reference, test, obs);
        log << "weak_error scheme=" << test.scheme << " observable=" << obs.name()
            << " value=" << format_number(e.value) << " stderr=" << format_number(e.stderr_) << '\n';
    }
}

void cmd_sweep(const RunConfig& cfg, bool over_dt, std::ostream& csv, std::ostream& log) {
    if (cfg.engine == Engine::ssa) throw ConfigError("scheme.kind: sweeps need a splitting scheme, not ssa");
    if (over_dt ? cfg.sweep_dt.empty() : cfg.sweep_q.empty()) {
        throw ConfigError(over_dt ? "sweep.dt: no values given" : "sweep.q: no values given");
    }
    const auto reference = run_ensemble(cfg, Engine::ssa, cfg.reference_samples, reference_seed(cfg.seed));
    write_sweep_header(csv);
    for (const auto& obs : cfg.observables) {
        const auto result = over_dt ? sweep_dt(cfg, cfg.sweep_dt, reference, obs) : sweep_q(cfg, cfg.sweep_q, reference, obs);
        write_sweep_rows(csv, result);
        for (const auto& msg : result.skipped) log << "skipped " << msg << '\n';
        log << "slope scheme=" << result.scheme << " parameter=" << result.parameter << " observable=" << obs.name()
            << " value=" << format_number(result.fit.slope) << '\n';
    }
}

void cmd_oracle(const RunConfig& cfg, std::ostream& csv) {
    const Lattice lat = make_lattice(cfg);
    const ModelPtr model = make_model(cfg.model);
    std::vector<Site> all(lat.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Site>(i);
    const auto full = oracle::build_generator(*model, lat, all);
    const auto p0 = initial_law(cfg, lat, full.codec);
    const auto times = grid_times(cfg.horizon, cfg.grid);

    std::optional<Decomposition> dec;
    std::optional<oracle::DenseGenerator> l1, l2;
    if (cfg.engine == Engine::fs_kmc) {
        dec = decompose(lat, cfg.q, model->interaction_range());
        l1 = oracle::build_group_generator(*model, lat, *dec, 1);
        l2 = oracle::build_group_generator(*model, lat, *dec, 2);
    }
    bool first = true;
    for (const auto& obs : cfg.observables) {
        const auto f = oracle::observable_vector(full.codec, lat, obs);
        std::vector<double> exact;
        for (double t : times) exact.push_back(f.dot(oracle::expm_apply(full.matrix, p0, t)));
        std::vector<double> split;
        if (l1) split = oracle::splitting_curve(*l1, *l2, *dec, cfg.schedule, cfg.horizon, times, f, p0);
        std::ostringstream block;
        write_oracle_csv(block, times, obs.name(), exact, split, cfg.scheme_label());
        std::string text = block.str();
        if (!first) text.erase(0, text.find('\n') + 1);  // one header per file
        csv << text;
        first = false;
    }
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fractional-step kinetic Monte Carlo driver", "fskmc"};
    app.require_subcommand(1);
    Options opt;
    auto* run = app.add_subcommand("run", "run an ensemble and write grid statistics");
    auto* compare = app.add_subcommand("compare", "weak error of the configured scheme against an SSA reference");
    auto* sweep_dt_cmd = app.add_subcommand("sweep-dt", "weak error over sweep.dt values");
    auto* sweep_q_cmd = app.add_subcommand("sweep-q", "weak error over sweep.q values");
    auto* oracle_cmd = app.add_subcommand("oracle", "exact expectation curves for small lattices");
    for (auto* cmd : {run, compare, sweep_dt_cmd, sweep_q_cmd, oracle_cmd}) add_common(cmd, opt);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        const RunConfig cfg = resolve(opt);
        std::ofstream file;
        if (!opt.output.empty()) {
            file.open(opt.output, std::ios::binary);
            if (!file) throw std::runtime_error("cannot open output file '" + opt.output + "'");
        }
        std::ostream& csv = opt.output.empty() ? out : file;
        std::ostream& log = opt.output.empty() ? err : out;
        if (run->parsed()) cmd_run(cfg, csv);
        else if (compare->parsed()) cmd_compare(cfg, csv, log);
        else if (sweep_dt_cmd->parsed()) cmd_sweep(cfg, true, csv, log);
        else if (sweep_q_cmd->parsed()) cmd_sweep(cfg, false, csv, log);
        else cmd_oracle(cfg, csv);
        csv.flush();
        if (!csv) throw std::runtime_error("failed writing output");
        return 0;
    } catch (const ConfigError& e) {
        for (const auto& issue : e.issues()) err << "config error: " << issue << '\n';
        return 2;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_main(args, std::cout, std::cerr);
}

}  // namespace fskmc
