// Copyright 2026 the hbnsim authors. Licensed under the terms of the
// Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hbn/ensemble.hpp"
#include "hbn/fitting.hpp"
#include "hbn/parameters.hpp"
#include "hbn/statistics.hpp"
#include "hbn/topology.hpp"

namespace hbn {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// JSON <-> domain types

inline nlohmann::json to_json(const SimConfig& cfg) {
    return nlohmann::json{
        {"tau_mean_ns", cfg.tau_mean_ns},
        {"dt_ns", cfg.dt_ns},
        {"t_int_ns", cfg.t_int_ns},
        {"sigma", cfg.sigma},
        {"epsilon", cfg.epsilon},
        {"delay_max_ns", cfg.delay_max_ns},
        {"sample_interval_ns", cfg.sample_interval_ns},
        {"discard_ns", cfg.discard_ns},
        {"n_classes", cfg.n_classes},
        {"n_instances", cfg.n_instances},
        {"n_challenges", cfg.n_challenges},
        {"n_repeats", cfg.n_repeats},
        {"n_nodes", cfg.n_nodes},
        {"degree", cfg.degree},
        {"master_seed", cfg.master_seed},
        {"pair_norm_mode", cfg.pair_norm == PairNorm::PairCount ? "pair-count" : "paper-literal"},
        {"exclude_fixed_point_challenges", cfg.exclude_fixed_point_challenges},
    };
}

inline PairNorm parse_pair_norm(const std::string& s) {
    if (s == "pair-count") return PairNorm::PairCount;
    if (s == "paper-literal") return PairNorm::PaperLiteral;
    throw std::invalid_argument("pair_norm_mode: expected 'pair-count' or 'paper-literal'");
}

inline SimConfig sim_config_from_json(const nlohmann::json& j) {
    static const std::vector<std::string> known = {
        "tau_mean_ns", "dt_ns", "t_int_ns", "sigma", "epsilon", "delay_max_ns",
        "sample_interval_ns", "discard_ns", "n_classes", "n_instances", "n_challenges",
        "n_repeats", "n_nodes", "degree", "master_seed", "pair_norm_mode",
        "exclude_fixed_point_challenges"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw std::invalid_argument("sim: unknown field '" + it.key() + "'");

    SimConfig cfg;
    try {
        cfg.tau_mean_ns = j.value("tau_mean_ns", cfg.tau_mean_ns);
        cfg.dt_ns = j.value("dt_ns", cfg.dt_ns);
        cfg.t_int_ns = j.value("t_int_ns", cfg.t_int_ns);
        cfg.sigma = j.value("sigma", cfg.sigma);
        cfg.epsilon = j.value("epsilon", cfg.epsilon);
        cfg.delay_max_ns = j.value("delay_max_ns", cfg.delay_max_ns);
        cfg.sample_interval_ns = j.value("sample_interval_ns", cfg.sample_interval_ns);
        cfg.discard_ns = j.value("discard_ns", cfg.discard_ns);
        cfg.n_classes = j.value("n_classes", cfg.n_classes);
        cfg.n_instances = j.value("n_instances", cfg.n_instances);
        cfg.n_challenges = j.value("n_challenges", cfg.n_challenges);
        cfg.n_repeats = j.value("n_repeats", cfg.n_repeats);
        cfg.n_nodes = j.value("n_nodes", cfg.n_nodes);
        cfg.degree = j.value("degree", cfg.degree);
        cfg.master_seed = j.value("master_seed", cfg.master_seed);
        if (j.contains("pair_norm_mode"))
            cfg.pair_norm = parse_pair_norm(j.at("pair_norm_mode").get<std::string>());
        cfg.exclude_fixed_point_challenges =
            j.value("exclude_fixed_point_challenges", cfg.exclude_fixed_point_challenges);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("sim: ") + e.what());
    }
    return cfg;
}

inline nlohmann::json to_json(const Topology& topo) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [a, b] : topo.undirected_edges()) edges.push_back({a, b});
    return nlohmann::json{{"n_nodes", topo.n_nodes}, {"degree", topo.degree}, {"edges", edges}};
}

inline Topology topology_from_json(const nlohmann::json& j) {
    Topology topo;
    topo.n_nodes = j.at("n_nodes").get<std::uint32_t>();
    topo.degree = j.at("degree").get<std::uint32_t>();
    topo.pred.assign(topo.n_nodes, {});
    for (const auto& e : j.at("edges")) {
        const auto a = e.at(0).get<std::uint32_t>();
        const auto b = e.at(1).get<std::uint32_t>();
        if (a >= topo.n_nodes || b >= topo.n_nodes)
            throw IoError("topology: edge endpoint out of range");
        topo.pred[a].push_back(b);
        topo.pred[b].push_back(a);
    }
    for (auto& p : topo.pred) std::sort(p.begin(), p.end());
    if (!validate(topo).empty()) throw IoError("topology: metadata violates invariants");
    return topo;
}

inline nlohmann::json to_json(const ClassSpec& cls) {
    bool uniform_xor = true;
    for (NodeFunction f : cls.node_fn) uniform_xor &= (f == NodeFunction::Xor);
    nlohmann::json j{{"class_index", cls.class_index},
                     {"topology", to_json(cls.topology)},
                     {"tau_mean_ns", cls.tau_mean_ns},
                     {"mean_delays_ns", cls.mean_delay_ns}};
    if (uniform_xor) {
        j["node_fn"] = "xor";
    } else {
        nlohmann::json fns = nlohmann::json::array();
        for (NodeFunction f : cls.node_fn) fns.push_back(f == NodeFunction::Xor ? "xor" : "xnor");
        j["node_fn"] = fns;
    }
    return j;
}

inline ClassSpec class_spec_from_json(const nlohmann::json& j) {
    ClassSpec cls;
    cls.class_index = j.at("class_index").get<std::uint32_t>();
    cls.topology = topology_from_json(j.at("topology"));
    cls.tau_mean_ns = j.at("tau_mean_ns").get<double>();
    cls.mean_delay_ns = j.at("mean_delays_ns").get<std::vector<double>>();
    if (cls.mean_delay_ns.size() != cls.topology.n_directed_edges())
        throw IoError("class: mean delay count does not match directed edges");
    const auto& fn = j.at("node_fn");
    if (fn.is_string()) {
        cls.node_fn.assign(cls.topology.n_nodes, fn.get<std::string>() == "xnor"
                                                     ? NodeFunction::Xnor
                                                     : NodeFunction::Xor);
    } else {
        for (const auto& f : fn)
            cls.node_fn.push_back(f.get<std::string>() == "xnor" ? NodeFunction::Xnor
                                                                 : NodeFunction::Xor);
        if (cls.node_fn.size() != cls.topology.n_nodes)
            throw IoError("class: node function count does not match n_nodes");
    }
    return cls;
}

// ---------------------------------------------------------------------------
// Experiment config file (JSON)

struct SweepSpec {
    SweepKnob knob = SweepKnob::Sigma;
    std::vector<double> values;
    double eval_time_ns = 6.0;
    bool operator==(const SweepSpec&) const = default;
};

struct CompareSpec {
    std::string a;
    std::string b;
    bool operator==(const CompareSpec&) const = default;
};

struct ExperimentConfig {
    SimConfig sim;
    std::optional<SweepSpec> sweep;
    std::optional<CompareSpec> compare;
    unsigned threads = 0; // 0 = auto
    std::string out;      // optional default output path
    bool operator==(const ExperimentConfig&) const = default;
};

inline SweepKnob parse_knob(const std::string& s) {
    if (s == "sigma") return SweepKnob::Sigma;
    if (s == "epsilon") return SweepKnob::Epsilon;
    throw std::invalid_argument("sweep.knob: expected 'sigma' or 'epsilon'");
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    static const std::vector<std::string> known = {"sim", "sweep", "compare", "threads", "out"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw std::invalid_argument("config: unknown field '" + it.key() + "'");

    ExperimentConfig cfg;
    if (j.contains("sim")) cfg.sim = sim_config_from_json(j.at("sim"));
    try {
        if (j.contains("sweep")) {
            const auto& js = j.at("sweep");
            SweepSpec spec;
            spec.knob = parse_knob(js.at("knob").get<std::string>());
            spec.values = js.at("values").get<std::vector<double>>();
            spec.eval_time_ns = js.value("eval_time_ns", spec.eval_time_ns);
            cfg.sweep = spec;
        }
        if (j.contains("compare")) {
            CompareSpec spec;
            spec.a = j.at("compare").at("a").get<std::string>();
            spec.b = j.at("compare").at("b").get<std::string>();
            cfg.compare = spec;
        }
        cfg.threads = j.value("threads", cfg.threads);
        cfg.out = j.value("out", cfg.out);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    return cfg;
}

inline nlohmann::json to_json(const ExperimentConfig& cfg) {
    nlohmann::json j{{"sim", to_json(cfg.sim)}};
    if (cfg.sweep) {
        j["sweep"] = {{"knob", knob_name(cfg.sweep->knob)},
                      {"values", cfg.sweep->values},
                      {"eval_time_ns", cfg.sweep->eval_time_ns}};
    }
    if (cfg.compare) j["compare"] = {{"a", cfg.compare->a}, {"b", cfg.compare->b}};
    if (cfg.threads) j["threads"] = cfg.threads;
    if (!cfg.out.empty()) j["out"] = cfg.out;
    return j;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

inline void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("write failed on " + path);
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    const std::string text = read_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config: " + std::string(e.what()));
    }
    return experiment_config_from_json(j);
}

inline void save_experiment_config(const ExperimentConfig& cfg, const std::string& path) {
    write_file(path, to_json(cfg).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Dataset file: "HBNPUF1 <json_bytes>\n" + JSON metadata + packed payload.

inline constexpr const char* kDatasetMagic = "HBNPUF1";

inline void write_dataset(const ResponseTensor& tensor, const std::string& path) {
    nlohmann::json meta{
        {"format", "hbnpuf-dataset"},
        {"version", 1},
        {"dims",
         {{"n_classes", tensor.dims.n_classes},
          {"n_instances", tensor.dims.n_instances},
          {"n_challenges", tensor.dims.n_challenges},
          {"n_repeats", tensor.dims.n_repeats},
          {"n_nodes", tensor.dims.n_nodes},
          {"n_times", tensor.dims.n_times}}},
        {"payload_bytes", tensor.bits.bytes().size()},
        {"sample_times_ns", tensor.sample_times_ns},
        {"config", to_json(tensor.config)},
    };
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& cls : tensor.classes) classes.push_back(to_json(cls));
    meta["classes"] = classes;

    const std::string header = meta.dump(2) + "\n";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << kDatasetMagic << ' ' << header.size() << '\n';
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    const auto& bytes = tensor.bits.bytes();
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed on " + path);
}

inline ResponseTensor read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string magic_line;
    if (!std::getline(in, magic_line)) throw IoError(path + ": truncated header line");
    std::istringstream magic(magic_line);
    std::string tag;
    std::uint64_t header_bytes = 0;
    magic >> tag >> header_bytes;
    if (tag != kDatasetMagic || header_bytes == 0)
        throw IoError(path + ": not an hbnpuf dataset");

    std::string header(header_bytes, '\0');
    in.read(header.data(), static_cast<std::streamsize>(header_bytes));
    if (static_cast<std::uint64_t>(in.gcount()) != header_bytes)
        throw IoError(path + ": truncated metadata header");

    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(header);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": bad metadata: " + e.what());
    }

    ResponseTensor tensor;
    try {
        const auto& jd = meta.at("dims");
        tensor.dims = {jd.at("n_classes").get<std::uint32_t>(),
                       jd.at("n_instances").get<std::uint32_t>(),
                       jd.at("n_challenges").get<std::uint32_t>(),
                       jd.at("n_repeats").get<std::uint32_t>(),
                       jd.at("n_nodes").get<std::uint32_t>(),
                       jd.at("n_times").get<std::uint32_t>()};
        tensor.sample_times_ns = meta.at("sample_times_ns").get<std::vector<double>>();
        tensor.config = sim_config_from_json(meta.at("config"));
        for (const auto& jc : meta.at("classes"))
            tensor.classes.push_back(class_spec_from_json(jc));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": bad metadata: " + e.what());
    }

    const std::uint64_t expected_bytes = (tensor.dims.total_bits() + 7) / 8;
    if (meta.at("payload_bytes").get<std::uint64_t>() != expected_bytes)
        throw IoError(path + ": payload length mismatch");

    tensor.bits = BitArray(tensor.dims.total_bits());
    auto& bytes = tensor.bits.bytes();
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<std::uint64_t>(in.gcount()) != expected_bytes)
        throw IoError(path + ": payload length mismatch");
    char extra;
    if (in.read(&extra, 1); in.gcount() != 0) throw IoError(path + ": payload length mismatch");
    return tensor;
}

// ---------------------------------------------------------------------------
// Delimited-text tables

inline std::string stats_csv(const StatsSeries& series, PairNorm mode) {
    std::ostringstream out;
    out << "# hbnsim stats v1 mode="
        << (mode == PairNorm::PairCount ? "pair-count" : "paper-literal") << "\n";
    out << "class,time_ns,mu_inter,mu_intra,delta_mu\n";
    for (std::size_t s = 0; s < series.per_class.size(); ++s) {
        const auto& cls = series.per_class[s];
        for (std::size_t t = 0; t < series.times_ns.size(); ++t)
            out << s << ',' << format_double(series.times_ns[t]) << ','
                << format_double(cls.mu_inter[t]) << ',' << format_double(cls.mu_intra[t])
                << ',' << format_double(cls.delta_mu[t]) << "\n";
    }
    out << "# ensemble\n";
    out << "time_ns,mu_inter_mean,mu_inter_std,mu_intra_mean,mu_intra_std,"
           "delta_mu_mean,delta_mu_std\n";
    for (std::size_t t = 0; t < series.times_ns.size(); ++t)
        out << format_double(series.times_ns[t]) << ',' << format_double(series.inter_mean[t])
            << ',' << format_double(series.inter_std[t]) << ','
            << format_double(series.intra_mean[t]) << ',' << format_double(series.intra_std[t])
            << ',' << format_double(series.delta_mean[t]) << ','
            << format_double(series.delta_std[t]) << "\n";
    out << "# t_opt\n";
    out << "class,t_opt_ns\n";
    for (std::size_t s = 0; s < series.per_class.size(); ++s)
        out << s << ',' << format_double(series.times_ns[series.per_class[s].t_opt_index])
            << "\n";
    out << "ensemble," << format_double(series.t_opt_ns()) << "\n";
    return std::move(out).str();
}

// Per-class mu curves parsed back from a stats table (ours or an external
// one in the same column format).
struct StatsTable {
    std::vector<double> times_ns;
    SeriesSet inter;
    SeriesSet intra;
};

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

inline double parse_double(const std::string& s, const std::string& context) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw IoError(context + ": bad number '" + s + "'");
    return v;
}

inline StatsTable parse_stats_csv(const std::string& text, const std::string& context) {
    StatsTable table;
    std::vector<std::string> class_order;
    std::vector<std::vector<double>> inter, intra;
    std::vector<std::vector<double>> times_per_class;

    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.find("ensemble") != std::string::npos ||
                line.find("t_opt") != std::string::npos)
                break;
            continue;
        }
        if (line.rfind("class,", 0) == 0) continue; // column header
        const auto fields = split_csv(line);
        if (fields.size() < 4)
            throw IoError(context + ": expected class,time_ns,mu_inter,mu_intra[,delta_mu]");
        const std::string& cls = fields[0];
        std::size_t idx = 0;
        for (; idx < class_order.size(); ++idx)
            if (class_order[idx] == cls) break;
        if (idx == class_order.size()) {
            class_order.push_back(cls);
            inter.emplace_back();
            intra.emplace_back();
            times_per_class.emplace_back();
        }
        times_per_class[idx].push_back(parse_double(fields[1], context));
        inter[idx].push_back(parse_double(fields[2], context));
        intra[idx].push_back(parse_double(fields[3], context));
    }

    if (class_order.empty()) throw IoError(context + ": no per-class rows found");
    table.times_ns = times_per_class[0];
    for (const auto& times : times_per_class) {
        if (times.size() != table.times_ns.size())
            throw IoError(context + ": inconsistent sample times across classes");
        for (std::size_t t = 0; t < times.size(); ++t)
            if (std::abs(times[t] - table.times_ns[t]) > 1e-9)
                throw IoError(context + ": inconsistent sample times across classes");
    }
    table.inter.times_ns = table.times_ns;
    table.inter.per_class = std::move(inter);
    table.intra.times_ns = table.times_ns;
    table.intra.per_class = std::move(intra);
    return table;
}

inline StatsTable read_stats_csv(const std::string& path) {
    return parse_stats_csv(read_file(path), path);
}

inline std::string sweep_csv(const SweepCurve& curve) {
    std::ostringstream out;
    out << "# hbnsim sweep v1 knob=" << knob_name(curve.knob)
        << " fixed=" << format_double(curve.fixed_value)
        << " eval_time_ns=" << format_double(curve.eval_time_ns) << "\n";
    out << "knob_value,statistic,std_err\n";
    for (std::size_t k = 0; k < curve.xs.size(); ++k)
        out << format_double(curve.xs[k]) << ',' << format_double(curve.ys[k]) << ','
            << format_double(curve.std_errs[k]) << "\n";
    return std::move(out).str();
}

struct SweepData {
    std::vector<double> xs, ys, std_errs;
};

inline SweepData parse_sweep_csv(const std::string& text, const std::string& context) {
    SweepData data;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("knob_value", 0) == 0) continue;
        const auto fields = split_csv(line);
        if (fields.size() < 2) throw IoError(context + ": expected knob_value,statistic[,std_err]");
        data.xs.push_back(parse_double(fields[0], context));
        data.ys.push_back(parse_double(fields[1], context));
        data.std_errs.push_back(fields.size() > 2 ? parse_double(fields[2], context) : 0.0);
    }
    if (data.xs.size() < 2) throw IoError(context + ": need at least 2 sweep rows");
    return data;
}

inline SweepData read_sweep_csv(const std::string& path) {
    return parse_sweep_csv(read_file(path), path);
}

inline std::string fit_csv(const FitResult& fit, double x_min, double x_max) {
    std::ostringstream out;
    out << "# hbnsim fit v1 model=B-A*exp(-C*x)\n";
    out << "A,B,C,A_std_err,B_std_err,C_std_err,residual_rms,converged,iterations\n";
    out << format_double(fit.a) << ',' << format_double(fit.b) << ',' << format_double(fit.c)
        << ',' << format_double(fit.std_errs[0]) << ',' << format_double(fit.std_errs[1]) << ','
        << format_double(fit.std_errs[2]) << ',' << format_double(fit.residual_rms) << ','
        << (fit.converged ? 1 : 0) << ',' << fit.iterations << "\n";
    out << "# curve\n";
    out << "x,y\n";
    constexpr int kCurvePoints = 100;
    for (int k = 0; k < kCurvePoints; ++k) {
        const double x = x_min + (x_max - x_min) * k / (kCurvePoints - 1);
        out << format_double(x) << ',' << format_double(sat_exp_eval(fit.a, fit.b, fit.c, x))
            << "\n";
    }
    return std::move(out).str();
}

inline std::string compare_csv(const std::vector<double>& times_ns, const ZSeries& inter,
                               const ZSeries& intra) {
    std::ostringstream out;
    out << "# hbnsim compare v1\n";
    out << "statistic,time_ns,z\n";
    const auto emit = [&](const char* name, const ZSeries& zs) {
        for (std::size_t t = 0; t < times_ns.size(); ++t)
            out << name << ',' << format_double(times_ns[t]) << ','
                << (zs.defined[t] ? format_double(zs.z[t]) : std::string("nan")) << "\n";
    };
    emit("mu_inter", inter);
    emit("mu_intra", intra);
    out << "# summary\n";
    out << "statistic,z_rms,n_times_used,n_times_excluded\n";
    out << "mu_inter," << format_double(inter.z_rms) << ',' << inter.n_used << ','
        << inter.n_excluded << "\n";
    out << "mu_intra," << format_double(intra.z_rms) << ',' << intra.n_used << ','
        << intra.n_excluded << "\n";
    double combined_sq = 0.0;
    std::uint32_t combined_n = 0;
    for (const ZSeries* zs : {&inter, &intra})
        for (std::size_t t = 0; t < zs->z.size(); ++t)
            if (zs->defined[t]) {
                combined_sq += zs->z[t] * zs->z[t];
                ++combined_n;
            }
    const double combined_rms =
        combined_n ? std::sqrt(combined_sq / combined_n) : std::numeric_limits<double>::quiet_NaN();
    out << "combined," << format_double(combined_rms) << ',' << combined_n << ','
        << (inter.n_excluded + intra.n_excluded) << "\n";
    return std::move(out).str();
}

} // namespace hbn
