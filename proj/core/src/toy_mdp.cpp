#include "lrq/control_tasks.hpp"
#include "lrq/rng.hpp"

namespace lrq {

TabularMdp toy_mdp(std::size_t n_states, std::size_t n_actions, double gamma, std::uint64_t seed) {
    Rng transitions(mix_seed(seed, 1));
    Rng rewards(mix_seed(seed, 2));
    MdpBuilder builder(n_states, n_actions, gamma);
    for (std::size_t s = 0; s < n_states; ++s) {
        for (std::size_t a = 0; a < n_actions; ++a) {
            const auto next = static_cast<std::uint32_t>(transitions.index(n_states));
            builder.add_pair(rewards.uniform(), {Successor{next, 1.0}});
        }
    }
    return std::move(builder).build();
}

}  // namespace lrq
