#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace lrq {

struct Successor {
    std::uint32_t state;
    double probability;
};

/// Finite discounted MDP with sparse per-(s, a) successor lists stored CSR-style.
/// Pair index of (s, a) is s * n_actions + a.
class TabularMdp {
public:
    TabularMdp() = default;
    /// Validates every invariant: offsets monotone and consistent, successor
    /// indices in range, probabilities non-negative and summing to 1 (1e-9)
    /// per pair, rewards finite, gamma in [0, 1).
    TabularMdp(std::size_t n_states, std::size_t n_actions, double gamma, std::vector<double> rewards,
               std::vector<std::uint64_t> offsets, std::vector<std::uint32_t> next_states,
               std::vector<double> probabilities);

    std::size_t n_states() const noexcept { return n_states_; }
    std::size_t n_actions() const noexcept { return n_actions_; }
    std::size_t n_pairs() const noexcept { return n_states_ * n_actions_; }
    double gamma() const noexcept { return gamma_; }

    double reward(std::size_t s, std::size_t a) const noexcept { return rewards_[s * n_actions_ + a]; }

    std::span<const std::uint32_t> next_states(std::size_t s, std::size_t a) const noexcept {
        const std::size_t p = s * n_actions_ + a;
        return {next_.data() + offsets_[p], static_cast<std::size_t>(offsets_[p + 1] - offsets_[p])};
    }
    std::span<const double> probabilities(std::size_t s, std::size_t a) const noexcept {
        const std::size_t p = s * n_actions_ + a;
        return {prob_.data() + offsets_[p], static_cast<std::size_t>(offsets_[p + 1] - offsets_[p])};
    }

    std::span<const double> rewards() const noexcept { return rewards_; }
    std::span<const std::uint64_t> offsets() const noexcept { return offsets_; }
    std::span<const std::uint32_t> all_next_states() const noexcept { return next_; }
    std::span<const double> all_probabilities() const noexcept { return prob_; }

    /// Same model with a different discount.
    TabularMdp with_gamma(double gamma) const;

    bool operator==(const TabularMdp&) const = default;

private:
    std::size_t n_states_ = 0;
    std::size_t n_actions_ = 0;
    double gamma_ = 0.0;
    std::vector<double> rewards_;
    std::vector<std::uint64_t> offsets_;
    std::vector<std::uint32_t> next_;
    std::vector<double> prob_;
};

/// Builds a TabularMdp pair by pair in (s, a) row-major order.
class MdpBuilder {
public:
    MdpBuilder(std::size_t n_states, std::size_t n_actions, double gamma);

    void add_pair(double reward, std::span<const Successor> successors);
    void add_pair(double reward, std::initializer_list<Successor> successors) {
        add_pair(reward, std::span<const Successor>(successors.begin(), successors.size()));
    }

    TabularMdp build() &&;

private:
    std::size_t n_states_;
    std::size_t n_actions_;
    double gamma_;
    std::vector<double> rewards_;
    std::vector<std::uint64_t> offsets_{0};
    std::vector<std::uint32_t> next_;
    std::vector<double> prob_;
};

/// Deterministic policy: one action index per state.
struct Policy {
    std::vector<std::uint32_t> action;

    std::size_t size() const noexcept { return action.size(); }
    std::uint32_t operator[](std::size_t s) const noexcept { return action[s]; }
    bool operator==(const Policy&) const = default;
};

}  // namespace lrq
