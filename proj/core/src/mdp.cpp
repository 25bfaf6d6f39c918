#include "lrq/mdp.hpp"

#include <cmath>
#include <string>

#include "lrq/errors.hpp"

namespace lrq {

namespace {
constexpr double kProbabilityTolerance = 1e-9;
}

TabularMdp::TabularMdp(std::size_t n_states, std::size_t n_actions, double gamma, std::vector<double> rewards,
                       std::vector<std::uint64_t> offsets, std::vector<std::uint32_t> next_states,
                       std::vector<double> probabilities)
    : n_states_(n_states),
      n_actions_(n_actions),
      gamma_(gamma),
      rewards_(std::move(rewards)),
      offsets_(std::move(offsets)),
      next_(std::move(next_states)),
      prob_(std::move(probabilities)) {
    if (n_states_ == 0 || n_actions_ == 0) throw ArgumentError("TabularMdp: empty state or action set");
    if (n_states_ > UINT32_MAX) throw ArgumentError("TabularMdp: too many states for 32-bit indices");
    if (!(gamma_ >= 0.0 && gamma_ < 1.0)) throw ArgumentError("TabularMdp: gamma must lie in [0, 1)");
    const std::size_t pairs = n_states_ * n_actions_;
    if (rewards_.size() != pairs) throw ArgumentError("TabularMdp: reward table has wrong length");
    if (offsets_.size() != pairs + 1 || offsets_.front() != 0) throw ArgumentError("TabularMdp: malformed offsets");
    if (next_.size() != prob_.size() || offsets_.back() != next_.size()) {
        throw ArgumentError("TabularMdp: successor arrays inconsistent with offsets");
    }
    for (std::size_t p = 0; p < pairs; ++p) {
        if (!std::isfinite(rewards_[p])) throw ArgumentError("TabularMdp: non-finite reward at pair " + std::to_string(p));
        if (offsets_[p + 1] <= offsets_[p]) {
            throw ArgumentError("TabularMdp: pair " + std::to_string(p) + " has no successors");
        }
        double total = 0.0;
        for (std::uint64_t k = offsets_[p]; k < offsets_[p + 1]; ++k) {
            if (next_[k] >= n_states_) throw ArgumentError("TabularMdp: successor index out of range at pair " + std::to_string(p));
            if (!(prob_[k] >= 0.0)) throw ArgumentError("TabularMdp: negative probability at pair " + std::to_string(p));
            total += prob_[k];
        }
        if (std::abs(total - 1.0) > kProbabilityTolerance) {
            throw ArgumentError("TabularMdp: probabilities of pair " + std::to_string(p) + " sum to " +
                                std::to_string(total));
        }
    }
}

TabularMdp TabularMdp::with_gamma(double gamma) const {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ArgumentError("TabularMdp: gamma must lie in [0, 1)");
    TabularMdp copy = *this;
    copy.gamma_ = gamma;
    return copy;
}

MdpBuilder::MdpBuilder(std::size_t n_states, std::size_t n_actions, double gamma)
    : n_states_(n_states), n_actions_(n_actions), gamma_(gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ArgumentError("MdpBuilder: gamma must lie in [0, 1)");
    rewards_.reserve(n_states * n_actions);
    offsets_.reserve(n_states * n_actions + 1);
}

void MdpBuilder::add_pair(double reward, std::span<const Successor> successors) {
    if (rewards_.size() >= n_states_ * n_actions_) throw ArgumentError("MdpBuilder: too many pairs");
    const std::string where = "MdpBuilder: pair " + std::to_string(rewards_.size());
    if (successors.empty()) throw ArgumentError(where + " has no successors");
    if (!std::isfinite(reward)) throw ArgumentError(where + " has a non-finite reward");
    double total = 0.0;
    for (const auto& s : successors) {
        if (s.state >= n_states_) throw ArgumentError(where + " has a successor index out of range");
        if (!(s.probability >= 0.0)) throw ArgumentError(where + " has a negative probability");
        total += s.probability;
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance)
        throw ArgumentError(where + " has probabilities summing to " + std::to_string(total));
    rewards_.push_back(reward);
    for (const auto& s : successors) {
        next_.push_back(s.state);
        prob_.push_back(s.probability);
    }
    offsets_.push_back(next_.size());
}

TabularMdp MdpBuilder::build() && {
    return TabularMdp(n_states_, n_actions_, gamma_, std::move(rewards_), std::move(offsets_), std::move(next_),
                      std::move(prob_));
}

}  // namespace lrq
