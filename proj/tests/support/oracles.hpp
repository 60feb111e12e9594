// Copyright 2026 the hbnsim authors. Licensed under the terms of the
// Apache 2.0 license. See LICENSE in the project root.
#pragma once

// Test-only oracles, deliberately written as the most literal double loops
// over index pairs so they stay independent of the production statistics
// path (which folds each pair sum into ones*(n-ones)).

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "hbn/ensemble.hpp"
#include "hbn/rng.hpp"
#include "hbn/statistics.hpp"

namespace hbn::test {

inline std::vector<std::vector<double>> brute_force_uniqueness(const ResponseTensor& tensor,
                                                               PairNorm mode) {
    const TensorDims& d = tensor.dims;
    std::vector<std::vector<double>> out(d.n_classes, std::vector<double>(d.n_times));
    const double denom = pair_norm(d.n_instances, mode) *
                         static_cast<double>(d.n_challenges) * d.n_repeats * d.n_nodes;
    for (std::uint32_t s = 0; s < d.n_classes; ++s)
        for (std::uint32_t t = 0; t < d.n_times; ++t) {
            std::uint64_t total = 0;
            for (std::uint32_t i = 0; i < d.n_instances; ++i)
                for (std::uint32_t i2 = i + 1; i2 < d.n_instances; ++i2)
                    for (std::uint32_t c = 0; c < d.n_challenges; ++c)
                        for (std::uint32_t r = 0; r < d.n_repeats; ++r)
                            for (std::uint32_t n = 0; n < d.n_nodes; ++n)
                                total += tensor.get(s, i, c, r, n, t) !=
                                         tensor.get(s, i2, c, r, n, t);
            out[s][t] = static_cast<double>(total) / denom;
        }
    return out;
}

inline std::vector<std::vector<double>> brute_force_reliability(const ResponseTensor& tensor,
                                                                PairNorm mode) {
    const TensorDims& d = tensor.dims;
    std::vector<std::vector<double>> out(d.n_classes, std::vector<double>(d.n_times));
    const double denom = pair_norm(d.n_repeats, mode) *
                         static_cast<double>(d.n_instances) * d.n_challenges * d.n_nodes;
    for (std::uint32_t s = 0; s < d.n_classes; ++s)
        for (std::uint32_t t = 0; t < d.n_times; ++t) {
            std::uint64_t total = 0;
            for (std::uint32_t i = 0; i < d.n_instances; ++i)
                for (std::uint32_t c = 0; c < d.n_challenges; ++c)
                    for (std::uint32_t r = 0; r < d.n_repeats; ++r)
                        for (std::uint32_t r2 = r + 1; r2 < d.n_repeats; ++r2)
                            for (std::uint32_t n = 0; n < d.n_nodes; ++n)
                                total += tensor.get(s, i, c, r, n, t) !=
                                         tensor.get(s, i, c, r2, n, t);
            out[s][t] = static_cast<double>(total) / denom;
        }
    return out;
}

// Tensor with its bits drawn Bernoulli(p); metadata left minimal.
inline ResponseTensor make_random_tensor(const TensorDims& dims, std::uint64_t seed,
                                         double p = 0.5) {
    ResponseTensor tensor;
    tensor.dims = dims;
    tensor.bits = BitArray(dims.total_bits());
    tensor.sample_times_ns.resize(dims.n_times);
    for (std::uint32_t t = 0; t < dims.n_times; ++t)
        tensor.sample_times_ns[t] = 0.5 * (t + 1);
    rng::Stream stream(seed, rng::Purpose::Noise);
    for (std::uint64_t b = 0; b < dims.total_bits(); ++b)
        if (stream.next_double() < p) tensor.bits.set(b, true);
    return tensor;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path make_temp_dir(const std::string& tag) {
    static std::mt19937_64 gen{std::random_device{}()};
    for (int attempt = 0; attempt < 100; ++attempt) {
        auto path = std::filesystem::temp_directory_path() /
                    ("hbnsim-" + tag + "-" + std::to_string(gen()));
        std::error_code ec;
        if (std::filesystem::create_directories(path, ec)) return path;
    }
    throw std::runtime_error("could not create temp dir");
}

} // namespace hbn::test
