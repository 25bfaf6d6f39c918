#include "lrq/rank_histogram.hpp"

#include "lrq/csv.hpp"
#include "lrq/errors.hpp"
#include "lrq/linalg.hpp"

namespace lrq {

std::size_t RankHistogram::max_rank() const {
    for (std::size_t k = counts.size(); k-- > 0;) {
        if (counts[k] > 0) return k;
    }
    return 0;
}

RankHistogram rank_histogram(const QEvaluator& q_eval, const StateSampler& sampler, std::size_t n_actions,
                             std::size_t batch_size, std::size_t repeats, std::uint64_t seed, double energy) {
    if (repeats < 1) throw ArgumentError("rank_histogram: repeats must be >= 1");
    if (batch_size < 1 || n_actions < 1) throw ArgumentError("rank_histogram: batch_size and n_actions must be positive");

    Rng rng(seed);
    RankHistogram h;
    h.counts.assign(n_actions + 1, 0);
    h.repeats = repeats;
    DenseMatrix batch(batch_size, n_actions);
    for (std::size_t r = 0; r < repeats; ++r) {
        for (std::size_t i = 0; i < batch_size; ++i) {
            const std::uint32_t s = sampler(rng);
            auto row = batch.row(i);
            for (std::uint32_t a = 0; a < n_actions; ++a) row[a] = q_eval(s, a);
        }
        const std::size_t rank = approximate_rank_or_zero(batch, energy);
        ++h.counts[rank];
    }
    h.cdf.resize(h.counts.size());
    std::size_t acc = 0;
    for (std::size_t k = 0; k < h.counts.size(); ++k) {
        acc += h.counts[k];
        h.cdf[k] = static_cast<double>(acc) / static_cast<double>(repeats);
    }
    return h;
}

void write_rank_histogram_csv(const std::filesystem::path& path, const RankHistogram& h) {
    CsvWriter csv(path, {"rank", "count", "cdf"});
    for (std::size_t k = 0; k < h.counts.size(); ++k) {
        csv.cell(k).cell(h.counts[k]).cell(h.cdf[k]);
        csv.end_row();
    }
}

}  // namespace lrq
