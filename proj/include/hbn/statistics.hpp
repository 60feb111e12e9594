// Copyright 2026 the hbnsim authors. Licensed under the terms of the
// Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hbn/ensemble.hpp"
#include "hbn/parameters.hpp"

namespace hbn {

// Number of pairs used to normalize an averaged pairwise distance over an
// axis of length n.
inline double pair_norm(std::uint64_t n, PairNorm mode) {
    return mode == PairNorm::PairCount ? static_cast<double>(n) * (n - 1) / 2.0
                                       : static_cast<double>(n) * (n + 1) / 2.0;
}

// Mean |X_j - X_j'| over unordered pairs of Boolean values. For bits the
// pair sum collapses to k*(n-k) with k the number of ones.
inline double pairwise_mean_distance(std::span<const std::uint8_t> values, PairNorm mode) {
    const std::uint64_t n = values.size();
    if (n < 2) throw std::invalid_argument("pairwise_mean_distance: need at least 2 values");
    std::uint64_t ones = 0;
    for (std::uint8_t v : values) ones += (v & 1);
    const double sum = static_cast<double>(ones * (n - ones));
    return sum / pair_norm(n, mode);
}

// Per-class uniqueness curves mu_inter^s(t): pairwise mean distance across
// instances, plain average over challenges, repeats and nodes.
inline std::vector<std::vector<double>> uniqueness(const ResponseTensor& tensor,
                                                   PairNorm mode) {
    const TensorDims& d = tensor.dims;
    if (d.n_instances < 2)
        throw std::invalid_argument("uniqueness: need at least 2 instances");
    std::vector<std::vector<double>> out(d.n_classes, std::vector<double>(d.n_times));
    const double denom = pair_norm(d.n_instances, mode) *
                         static_cast<double>(d.n_challenges) * d.n_repeats * d.n_nodes;
    for (std::uint32_t s = 0; s < d.n_classes; ++s)
        for (std::uint32_t t = 0; t < d.n_times; ++t) {
            std::uint64_t total = 0;
            for (std::uint32_t c = 0; c < d.n_challenges; ++c)
                for (std::uint32_t r = 0; r < d.n_repeats; ++r)
                    for (std::uint32_t n = 0; n < d.n_nodes; ++n) {
                        std::uint64_t ones = 0;
                        for (std::uint32_t i = 0; i < d.n_instances; ++i)
                            ones += tensor.get(s, i, c, r, n, t);
                        total += ones * (d.n_instances - ones);
                    }
            out[s][t] = static_cast<double>(total) / denom;
        }
    return out;
}

// Per-class reliability curves mu_intra^s(t): pairwise mean distance across
// repeats, averaged over instances, challenges and nodes.
inline std::vector<std::vector<double>> reliability(const ResponseTensor& tensor,
                                                    PairNorm mode) {
    const TensorDims& d = tensor.dims;
    if (d.n_repeats < 2)
        throw std::invalid_argument("reliability: need at least 2 repeats");
    std::vector<std::vector<double>> out(d.n_classes, std::vector<double>(d.n_times));
    const double denom = pair_norm(d.n_repeats, mode) *
                         static_cast<double>(d.n_instances) * d.n_challenges * d.n_nodes;
    for (std::uint32_t s = 0; s < d.n_classes; ++s)
        for (std::uint32_t t = 0; t < d.n_times; ++t) {
            std::uint64_t total = 0;
            for (std::uint32_t i = 0; i < d.n_instances; ++i)
                for (std::uint32_t c = 0; c < d.n_challenges; ++c)
                    for (std::uint32_t n = 0; n < d.n_nodes; ++n) {
                        std::uint64_t ones = 0;
                        for (std::uint32_t r = 0; r < d.n_repeats; ++r)
                            ones += tensor.get(s, i, c, r, n, t);
                        total += ones * (d.n_repeats - ones);
                    }
            out[s][t] = static_cast<double>(total) / denom;
        }
    return out;
}

struct ClassSeries {
    std::vector<double> mu_inter;
    std::vector<double> mu_intra;
    std::vector<double> delta_mu;
    std::size_t t_opt_index = 0;
};

struct StatsSeries {
    std::vector<double> times_ns;
    std::vector<ClassSeries> per_class;
    // Class-ensemble mean and std (sample std over classes) of each curve.
    std::vector<double> inter_mean, inter_std;
    std::vector<double> intra_mean, intra_std;
    std::vector<double> delta_mean, delta_std;
    std::size_t t_opt_index = 0; // argmax of the ensemble delta curve

    double t_opt_ns() const { return times_ns.empty() ? 0.0 : times_ns[t_opt_index]; }
};

namespace detail {

inline void mean_std_over_classes(const std::vector<ClassSeries>& classes,
                                  std::vector<double> ClassSeries::*member,
                                  std::vector<double>& mean, std::vector<double>& std_dev) {
    const std::size_t n_s = classes.size();
    const std::size_t n_t = n_s ? (classes[0].*member).size() : 0;
    mean.assign(n_t, 0.0);
    std_dev.assign(n_t, 0.0);
    for (std::size_t t = 0; t < n_t; ++t) {
        double m = 0.0;
        for (const auto& c : classes) m += (c.*member)[t];
        m /= static_cast<double>(n_s);
        mean[t] = m;
        if (n_s > 1) {
            double ss = 0.0;
            for (const auto& c : classes) {
                const double dv = (c.*member)[t] - m;
                ss += dv * dv;
            }
            std_dev[t] = std::sqrt(ss / static_cast<double>(n_s - 1));
        }
    }
}

inline std::size_t argmax_earliest(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t t = 1; t < v.size(); ++t)
        if (v[t] > v[best]) best = t;
    return best;
}

} // namespace detail

// Fill delta_mu = mu_inter - mu_intra, per-class and ensemble t_opt (earliest
// argmax), and the class-ensemble aggregates.
inline void delta_and_topt(StatsSeries& series) {
    for (auto& cls : series.per_class) {
        cls.delta_mu.resize(cls.mu_inter.size());
        for (std::size_t t = 0; t < cls.delta_mu.size(); ++t)
            cls.delta_mu[t] = cls.mu_inter[t] - cls.mu_intra[t];
        cls.t_opt_index = detail::argmax_earliest(cls.delta_mu);
    }
    detail::mean_std_over_classes(series.per_class, &ClassSeries::mu_inter,
                                  series.inter_mean, series.inter_std);
    detail::mean_std_over_classes(series.per_class, &ClassSeries::mu_intra,
                                  series.intra_mean, series.intra_std);
    detail::mean_std_over_classes(series.per_class, &ClassSeries::delta_mu,
                                  series.delta_mean, series.delta_std);
    series.t_opt_index = detail::argmax_earliest(series.delta_mean);
}

inline StatsSeries compute_stats(const ResponseTensor& tensor, PairNorm mode) {
    StatsSeries series;
    series.times_ns = tensor.sample_times_ns;
    const auto inter = uniqueness(tensor, mode);
    const auto intra = reliability(tensor, mode);
    series.per_class.resize(tensor.dims.n_classes);
    for (std::uint32_t s = 0; s < tensor.dims.n_classes; ++s) {
        series.per_class[s].mu_inter = inter[s];
        series.per_class[s].mu_intra = intra[s];
    }
    delta_and_topt(series);
    return series;
}

// One statistic's per-class curves on a common time grid.
struct SeriesSet {
    std::vector<double> times_ns;
    std::vector<std::vector<double>> per_class;
};

struct ZSeries {
    std::vector<double> z;          // NaN where undefined
    std::vector<std::uint8_t> defined;
    double z_rms = 0.0;
    std::uint32_t n_used = 0;
    std::uint32_t n_excluded = 0;
};

// Z(t) between class-ensemble means with combined class-ensemble stds.
// Times where both stds vanish are flagged and left out of the RMS.
inline ZSeries z_compare(const SeriesSet& a, const SeriesSet& b) {
    if (a.times_ns.size() != b.times_ns.size())
        throw std::invalid_argument("z_compare: incompatible sample times");
    for (std::size_t t = 0; t < a.times_ns.size(); ++t)
        if (std::abs(a.times_ns[t] - b.times_ns[t]) > 1e-9)
            throw std::invalid_argument("z_compare: incompatible sample times");
    if (a.per_class.empty() || b.per_class.empty())
        throw std::invalid_argument("z_compare: empty series set");

    const auto ensemble = [](const SeriesSet& set, std::size_t t, double& mean, double& var) {
        const std::size_t n = set.per_class.size();
        mean = 0.0;
        for (const auto& c : set.per_class) mean += c[t];
        mean /= static_cast<double>(n);
        var = 0.0;
        if (n > 1) {
            for (const auto& c : set.per_class) {
                const double dv = c[t] - mean;
                var += dv * dv;
            }
            var /= static_cast<double>(n - 1);
        }
    };

    ZSeries out;
    const std::size_t n_t = a.times_ns.size();
    out.z.resize(n_t);
    out.defined.resize(n_t);
    double sum_sq = 0.0;
    for (std::size_t t = 0; t < n_t; ++t) {
        double mean_a, var_a, mean_b, var_b;
        ensemble(a, t, mean_a, var_a);
        ensemble(b, t, mean_b, var_b);
        const double combined = var_a + var_b;
        if (combined > 0.0) {
            out.z[t] = (mean_a - mean_b) / std::sqrt(combined);
            out.defined[t] = 1;
            sum_sq += out.z[t] * out.z[t];
            ++out.n_used;
        } else {
            out.z[t] = std::numeric_limits<double>::quiet_NaN();
            out.defined[t] = 0;
            ++out.n_excluded;
        }
    }
    out.z_rms = out.n_used ? std::sqrt(sum_sq / out.n_used)
                           : std::numeric_limits<double>::quiet_NaN();
    return out;
}

enum class SweepKnob : std::uint8_t { Sigma = 0, Epsilon = 1 };

inline std::string knob_name(SweepKnob k) { return k == SweepKnob::Sigma ? "sigma" : "epsilon"; }

struct SweepCurve {
    SweepKnob knob = SweepKnob::Sigma;
    double fixed_value = 0.0; // the other knob's setting
    double eval_time_ns = 6.0;
    std::vector<double> xs;
    std::vector<double> ys;       // ensemble statistic at eval_time
    std::vector<double> std_errs; // class std / sqrt(n_classes)
};

inline std::size_t nearest_time_index(const std::vector<double>& times, double t_ns) {
    if (times.empty()) throw std::invalid_argument("nearest_time_index: empty grid");
    std::size_t best = 0;
    for (std::size_t k = 1; k < times.size(); ++k)
        if (std::abs(times[k] - t_ns) < std::abs(times[best] - t_ns)) best = k;
    return best;
}

// Regenerate a dataset per knob value with every stream key unchanged, so
// only the knob's physical effect differs between points. The sigma knob
// reports mu_inter, the epsilon knob mu_intra, each at eval_time.
inline SweepCurve sweep(SweepKnob knob, const std::vector<double>& values,
                        const SimConfig& base_cfg, double eval_time_ns,
                        unsigned threads = 0) {
    if (values.empty()) throw std::invalid_argument("sweep: empty value list");
    for (std::size_t k = 1; k < values.size(); ++k)
        if (!(values[k] > values[k - 1]))
            throw std::invalid_argument("sweep: values must be strictly increasing");

    SweepCurve curve;
    curve.knob = knob;
    curve.eval_time_ns = eval_time_ns;
    curve.fixed_value = (knob == SweepKnob::Sigma) ? base_cfg.epsilon : base_cfg.sigma;
    curve.xs = values;
    curve.ys.reserve(values.size());
    curve.std_errs.reserve(values.size());

    for (double v : values) {
        SimConfig cfg = base_cfg;
        if (knob == SweepKnob::Sigma)
            cfg.sigma = v;
        else
            cfg.epsilon = v;
        const ResponseTensor tensor = generate_dataset(cfg, threads);
        const StatsSeries stats = compute_stats(tensor, cfg.pair_norm);
        const std::size_t t = nearest_time_index(stats.times_ns, eval_time_ns);
        const std::vector<double>& mean =
            (knob == SweepKnob::Sigma) ? stats.inter_mean : stats.intra_mean;
        const std::vector<double>& sd =
            (knob == SweepKnob::Sigma) ? stats.inter_std : stats.intra_std;
        curve.ys.push_back(mean[t]);
        curve.std_errs.push_back(sd[t] / std::sqrt(static_cast<double>(cfg.n_classes)));
    }
    return curve;
}

} // namespace hbn
