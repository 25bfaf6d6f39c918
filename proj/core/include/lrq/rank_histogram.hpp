#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "lrq/rng.hpp"
#include "lrq/sv_targets.hpp"

namespace lrq {

/// Draws one state index per call.
using StateSampler = std::function<std::uint32_t(Rng&)>;

struct RankHistogram {
    /// counts[k] = number of repeats whose batch matrix had approximate rank k
    /// (k = 0 only for an all-zero batch). Length n_actions + 1.
    std::vector<std::size_t> counts;
    std::vector<double> cdf;
    std::size_t repeats = 0;

    std::size_t max_rank() const;
};

/// For each repeat, forms the batch_size x n_actions matrix of q_eval over sampled
/// states and records its approximate rank.
RankHistogram rank_histogram(const QEvaluator& q_eval, const StateSampler& sampler, std::size_t n_actions,
                             std::size_t batch_size = 32, std::size_t repeats = 10000, std::uint64_t seed = 0,
                             double energy = 0.99);

/// CSV columns: rank,count,cdf
void write_rank_histogram_csv(const std::filesystem::path& path, const RankHistogram& h);

}  // namespace lrq
