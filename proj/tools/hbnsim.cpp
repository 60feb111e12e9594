// Copyright 2026 the hbnsim authors. Licensed under the terms of the
// Apache 2.0 license. See LICENSE in the project root.
//
// hbnsim — simulate hybrid Boolean network PUFs and evaluate their
// uniqueness/reliability statistics.
//
// Subcommands:
//   sim      generate a challenge-response dataset file from a config
//   stats    compute per-class and ensemble statistics from a dataset
//   sweep    vary sigma or epsilon and tabulate the statistic at a fixed time
//   fit      fit y = B - A*exp(-C*x) to a sweep table
//   compare  RMS Z-score between two stats tables
//
// Exit codes: 0 success, 2 usage/config error, 3 I/O or format error.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hbn/ensemble.hpp"
#include "hbn/fitting.hpp"
#include "hbn/io.hpp"
#include "hbn/statistics.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    long long threads_flag = -1; // -1 = unset
    long long seed_flag = -1;    // -1 = unset (seeds are taken non-negative)
    bool seed_set = false;
};

unsigned resolve_threads(long long flag_value, unsigned config_value) {
    if (flag_value >= 0) return static_cast<unsigned>(flag_value);
    if (config_value > 0) return config_value;
    if (const char* env = std::getenv("HBNSIM_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return 0; // auto
}

int check_config(const hbn::SimConfig& cfg) {
    const auto violations = hbn::validate(cfg);
    if (violations.empty()) return 0;
    for (const auto& v : violations) std::cerr << "config error: " << v << "\n";
    return 2;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int run_sim(const CommonArgs& args) {
    hbn::ExperimentConfig exp = hbn::load_experiment_config(args.config_path);
    if (args.seed_set) exp.sim.master_seed = static_cast<std::uint64_t>(args.seed_flag);
    const std::string out = args.out_path.empty() ? exp.out : args.out_path;
    if (out.empty()) {
        std::cerr << "config error: out: no output path given (--out or config)\n";
        return 2;
    }
    if (int rc = check_config(exp.sim)) return rc;

    const unsigned threads = resolve_threads(args.threads_flag, exp.threads);
    const auto start = std::chrono::steady_clock::now();
    const hbn::ResponseTensor tensor = hbn::generate_dataset(exp.sim, threads);
    const hbn::TensorDims& d = tensor.dims;
    std::cout << "dataset: " << d.n_classes << " classes x " << d.n_instances
              << " instances x " << d.n_challenges << " challenges x " << d.n_repeats
              << " repeats x " << d.n_nodes << " nodes x " << d.n_times << " times = "
              << d.total_bits() << " bits\n";
    hbn::write_dataset(tensor, out);
    std::cout << "wrote " << out << " (" << tensor.bits.bytes().size() << " payload bytes) in "
              << seconds_since(start) << " s\n";
    return 0;
}

int run_stats(const std::string& in_path, const std::string& out_path,
              const std::string& mode_flag) {
    const hbn::ResponseTensor tensor = hbn::read_dataset(in_path);
    const hbn::PairNorm mode =
        mode_flag.empty() ? tensor.config.pair_norm : hbn::parse_pair_norm(mode_flag);
    const hbn::StatsSeries series = hbn::compute_stats(tensor, mode);
    hbn::write_file(out_path, hbn::stats_csv(series, mode));
    std::cout << "stats: " << series.per_class.size() << " classes, "
              << series.times_ns.size() << " sample times, ensemble t_opt = "
              << series.t_opt_ns() << " ns\n";
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int run_sweep(const CommonArgs& args, double eval_time_flag) {
    hbn::ExperimentConfig exp = hbn::load_experiment_config(args.config_path);
    if (!exp.sweep) {
        std::cerr << "config error: sweep: missing sweep block in config\n";
        return 2;
    }
    if (args.seed_set) exp.sim.master_seed = static_cast<std::uint64_t>(args.seed_flag);
    const std::string out = args.out_path.empty() ? exp.out : args.out_path;
    if (out.empty()) {
        std::cerr << "config error: out: no output path given (--out or config)\n";
        return 2;
    }
    if (int rc = check_config(exp.sim)) return rc;

    const double eval_time =
        eval_time_flag > 0.0 ? eval_time_flag : exp.sweep->eval_time_ns;
    const unsigned threads = resolve_threads(args.threads_flag, exp.threads);
    const auto start = std::chrono::steady_clock::now();

    // Run point by point so progress is visible on long sweeps.
    hbn::SweepCurve curve;
    curve.knob = exp.sweep->knob;
    curve.eval_time_ns = eval_time;
    curve.fixed_value = (curve.knob == hbn::SweepKnob::Sigma) ? exp.sim.epsilon : exp.sim.sigma;
    const auto& values = exp.sweep->values;
    for (std::size_t k = 0; k < values.size(); ++k) {
        const std::vector<double> one{values[k]};
        if (k > 0 && !(values[k] > values[k - 1])) {
            std::cerr << "config error: sweep.values: must be strictly increasing\n";
            return 2;
        }
        const hbn::SweepCurve point = hbn::sweep(curve.knob, one, exp.sim, eval_time, threads);
        curve.xs.push_back(point.xs[0]);
        curve.ys.push_back(point.ys[0]);
        curve.std_errs.push_back(point.std_errs[0]);
        std::cout << "sweep " << hbn::knob_name(curve.knob) << "=" << values[k] << " -> "
                  << point.ys[0] << " (" << (k + 1) << "/" << values.size() << ")\n";
    }
    hbn::write_file(out, hbn::sweep_csv(curve));
    std::cout << "wrote " << out << " in " << seconds_since(start) << " s\n";
    return 0;
}

int run_fit(const std::string& in_path, const std::string& out_path, bool weighted) {
    const hbn::SweepData data = hbn::read_sweep_csv(in_path);
    std::vector<double> weights;
    if (weighted) {
        weights.reserve(data.std_errs.size());
        for (double se : data.std_errs) {
            if (!(se > 0.0))
                throw std::invalid_argument("fit: --weighted needs positive std_err values");
            weights.push_back(1.0 / (se * se));
        }
    }
    const hbn::FitResult fit = hbn::fit_sat_exp(data.xs, data.ys, weights);
    hbn::write_file(out_path, hbn::fit_csv(fit, data.xs.front(), data.xs.back()));
    std::cout << "fit: A=" << fit.a << " +/- " << fit.std_errs[0] << ", B=" << fit.b
              << " +/- " << fit.std_errs[1] << ", C=" << fit.c << " +/- " << fit.std_errs[2]
              << ", rms=" << fit.residual_rms
              << (fit.converged ? "" : "  [did not converge]") << "\n";
    std::cout << "wrote " << out_path << "\n";
    return fit.converged ? 0 : 1;
}

int run_compare(const std::string& a_path, const std::string& b_path,
                const std::string& out_path) {
    const hbn::StatsTable a = hbn::read_stats_csv(a_path);
    const hbn::StatsTable b = hbn::read_stats_csv(b_path);
    const hbn::ZSeries z_inter = hbn::z_compare(a.inter, b.inter);
    const hbn::ZSeries z_intra = hbn::z_compare(a.intra, b.intra);
    if (z_inter.n_excluded || z_intra.n_excluded)
        std::cerr << "warning: " << (z_inter.n_excluded + z_intra.n_excluded)
                  << " time(s) had zero combined std and were excluded from the RMS\n";
    const std::string report = hbn::compare_csv(a.times_ns, z_inter, z_intra);
    if (out_path.empty())
        std::cout << report;
    else {
        hbn::write_file(out_path, report);
        std::cout << "wrote " << out_path << "\n";
    }
    std::cout << "Z_RMS: mu_inter=" << z_inter.z_rms << " mu_intra=" << z_intra.z_rms << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hbnsim — hybrid Boolean network PUF simulator"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string in_path, a_path, b_path, mode_flag;
    double eval_time_flag = 0.0;
    bool weighted = false;

    auto* sim = app.add_subcommand("sim", "generate a challenge-response dataset");
    sim->add_option("--config", args.config_path, "experiment config (JSON)")->required();
    sim->add_option("--out", args.out_path, "output dataset path");
    sim->add_option("--threads", args.threads_flag, "worker thread count (0 = auto)");
    sim->add_option("--seed", args.seed_flag, "override master seed")
        ->check(CLI::NonNegativeNumber);

    auto* stats = app.add_subcommand("stats", "compute statistics from a dataset");
    stats->add_option("--in", in_path, "dataset path")->required();
    stats->add_option("--out", args.out_path, "output stats table")->required();
    stats->add_option("--mode", mode_flag, "pair-count or paper-literal")
        ->check(CLI::IsMember({"pair-count", "paper-literal"}));

    auto* sweep = app.add_subcommand("sweep", "sweep sigma or epsilon");
    sweep->add_option("--config", args.config_path, "experiment config with sweep block")
        ->required();
    sweep->add_option("--out", args.out_path, "output sweep table");
    sweep->add_option("--threads", args.threads_flag, "worker thread count (0 = auto)");
    sweep->add_option("--seed", args.seed_flag, "override master seed")
        ->check(CLI::NonNegativeNumber);
    sweep->add_option("--eval-time-ns", eval_time_flag, "readout time for the statistic");

    auto* fit = app.add_subcommand("fit", "fit B - A*exp(-C*x) to a sweep table");
    fit->add_option("--in", in_path, "sweep table path")->required();
    fit->add_option("--out", args.out_path, "output fit table")->required();
    fit->add_flag("--weighted", weighted, "weight points by 1/std_err^2");

    auto* compare = app.add_subcommand("compare", "Z-score between two stats tables");
    compare->add_option("--a", a_path, "first stats table");
    compare->add_option("--b", b_path, "second stats table");
    compare->add_option("--config", args.config_path, "config with compare block");
    compare->add_option("--out", args.out_path, "output report (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    args.seed_set = sim->count("--seed") > 0 || sweep->count("--seed") > 0;

    try {
        if (sim->parsed()) return run_sim(args);
        if (stats->parsed()) return run_stats(in_path, args.out_path, mode_flag);
        if (sweep->parsed()) return run_sweep(args, eval_time_flag);
        if (fit->parsed()) return run_fit(in_path, args.out_path, weighted);
        if (compare->parsed()) {
            if ((a_path.empty() || b_path.empty()) && !args.config_path.empty()) {
                const hbn::ExperimentConfig exp = hbn::load_experiment_config(args.config_path);
                if (exp.compare) {
                    if (a_path.empty()) a_path = exp.compare->a;
                    if (b_path.empty()) b_path = exp.compare->b;
                }
            }
            if (a_path.empty() || b_path.empty()) {
                std::cerr << "compare: need --a and --b (or a compare block in --config)\n";
                return 2;
            }
            return run_compare(a_path, b_path, args.out_path);
        }
    } catch (const hbn::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
