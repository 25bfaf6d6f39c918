#include "lrq/control_tasks.hpp"

#include <cmath>
#include <string>

#include "lrq/errors.hpp"

namespace lrq {

std::size_t GridSpec::n_states() const {
    std::size_t n = 1;
    for (auto p : points_per_dim) n *= p;
    return n;
}

void GridSpec::validate(std::size_t state_dim) const {
    if (points_per_dim.size() != state_dim) {
        throw ArgumentError("GridSpec: " + std::to_string(points_per_dim.size()) + " grid dimensions for a " +
                            std::to_string(state_dim) + "-dimensional task");
    }
    for (auto p : points_per_dim) {
        if (p < 2) throw ArgumentError("GridSpec: every state dimension needs at least 2 points");
    }
    if (n_actions < 1) throw ArgumentError("GridSpec: n_actions must be >= 1");
}

StateGrid::StateGrid(const ControlTask& task, GridSpec spec) : bounds_(task.state_bounds), spec_(std::move(spec)) {
    spec_.validate(task.state_dim());
    action_bounds_ = task.action_bounds;
    n_states_ = spec_.n_states();
    strides_.assign(dims(), 1);
    for (std::size_t d = dims(); d-- > 1;) strides_[d - 1] = strides_[d] * spec_.points_per_dim[d];
}

double StateGrid::node_value(std::size_t dim, std::size_t i) const {
    const auto n = spec_.points_per_dim[dim];
    if (i + 1 == n) return bounds_[dim].hi;
    return bounds_[dim].lo + bounds_[dim].width() * static_cast<double>(i) / static_cast<double>(n - 1);
}

double StateGrid::action_value(std::size_t a) const {
    const auto n = spec_.n_actions;
    if (n == 1) return 0.5 * (action_bounds_.lo + action_bounds_.hi);
    if (a + 1 == n) return action_bounds_.hi;
    return action_bounds_.lo + action_bounds_.width() * static_cast<double>(a) / static_cast<double>(n - 1);
}

void StateGrid::state_at(std::size_t flat, std::span<double> out) const {
    for (std::size_t d = 0; d < dims(); ++d) {
        out[d] = node_value(d, (flat / strides_[d]) % spec_.points_per_dim[d]);
    }
}

std::vector<double> StateGrid::state_at(std::size_t flat) const {
    std::vector<double> out(dims());
    state_at(flat, out);
    return out;
}

std::size_t StateGrid::nearest(std::span<const double> state) const {
    std::size_t flat = 0;
    for (std::size_t d = 0; d < dims(); ++d) {
        const auto n = spec_.points_per_dim[d];
        const double f = (state[d] - bounds_[d].lo) / bounds_[d].width() * static_cast<double>(n - 1);
        const double r = std::clamp(std::round(f), 0.0, static_cast<double>(n - 1));
        flat += static_cast<std::size_t>(r) * strides_[d];
    }
    return flat;
}

void StateGrid::interpolate(std::span<const double> state, std::vector<Successor>& out) const {
    out.clear();
    out.push_back({0, 1.0});
    for (std::size_t d = 0; d < dims(); ++d) {
        const auto n = spec_.points_per_dim[d];
        const double f = std::clamp((state[d] - bounds_[d].lo) / bounds_[d].width() * static_cast<double>(n - 1), 0.0,
                                    static_cast<double>(n - 1));
        auto lower = static_cast<std::size_t>(std::floor(f));
        if (lower > n - 2) lower = n - 2;
        const double upper_w = std::clamp(f - static_cast<double>(lower), 0.0, 1.0);
        const double lower_w = 1.0 - upper_w;

        const std::size_t count = out.size();
        for (std::size_t k = 0; k < count; ++k) {
            const Successor base = out[k];
            const auto lo_idx = static_cast<std::uint32_t>(base.state + lower * strides_[d]);
            if (upper_w > 0.0) out.push_back({static_cast<std::uint32_t>(lo_idx + strides_[d]), base.probability * upper_w});
            out[k] = {lo_idx, base.probability * lower_w};
        }
    }
    std::erase_if(out, [](const Successor& s) { return s.probability == 0.0; });
}

TabularMdp discretize(const ControlTask& task, const GridSpec& grid_spec, double gamma) {
    const StateGrid grid(task, grid_spec);
    const std::size_t n_states = grid.n_states();
    const std::size_t n_actions = grid.n_actions();
    const std::size_t dims = grid.dims();
    const std::size_t slots = std::size_t{1} << dims;
    if (n_states > UINT32_MAX) throw ArgumentError("discretize: grid too large for 32-bit state indices");

    // Fixed 2^d slots per pair so pairs can be filled independently; compacted afterwards.
    std::vector<std::uint8_t> counts(n_states * n_actions);
    std::vector<Successor> scratch(n_states * n_actions * slots);
    std::vector<double> rewards(n_states * n_actions);

    const auto n = static_cast<std::int64_t>(n_states);
    std::string failure;
#pragma omp parallel
    {
        std::vector<double> x(dims), next(dims);
        std::vector<Successor> succ;
        succ.reserve(slots);
#pragma omp for schedule(static)
        for (std::int64_t si = 0; si < n; ++si) {
            const auto s = static_cast<std::size_t>(si);
            grid.state_at(s, x);
            const bool absorbing = task.absorbing && task.absorbing(x);
            for (std::size_t a = 0; a < n_actions; ++a) {
                const std::size_t pair = s * n_actions + a;
                const double u = grid.action_value(a);
                rewards[pair] = task.reward(x, u);
                if (absorbing) {
                    scratch[pair * slots] = {static_cast<std::uint32_t>(s), 1.0};
                    counts[pair] = 1;
                    continue;
                }
                task.step(x, u, next);
                bool finite = std::isfinite(rewards[pair]);
                for (double v : next) finite = finite && std::isfinite(v);
                if (!finite) {
#pragma omp critical
                    if (failure.empty()) {
                        failure = "discretize(" + task.name + "): non-finite transition at state " +
                                  std::to_string(s) + ", action " + std::to_string(a);
                    }
                    counts[pair] = 0;
                    continue;
                }
                grid.interpolate(next, succ);
                std::copy(succ.begin(), succ.end(), scratch.begin() + static_cast<std::ptrdiff_t>(pair * slots));
                counts[pair] = static_cast<std::uint8_t>(succ.size());
            }
        }
    }
    if (!failure.empty()) throw NumericalError(failure);

    std::vector<std::uint64_t> offsets(n_states * n_actions + 1, 0);
    for (std::size_t p = 0; p < counts.size(); ++p) offsets[p + 1] = offsets[p] + counts[p];
    std::vector<std::uint32_t> next_states(offsets.back());
    std::vector<double> probs(offsets.back());
    for (std::size_t p = 0; p < counts.size(); ++p) {
        for (std::size_t k = 0; k < counts[p]; ++k) {
            next_states[offsets[p] + k] = scratch[p * slots + k].state;
            probs[offsets[p] + k] = scratch[p * slots + k].probability;
        }
    }
    scratch = {};
    return TabularMdp(n_states, n_actions, gamma, std::move(rewards), std::move(offsets), std::move(next_states),
                      std::move(probs));
}

}  // namespace lrq
