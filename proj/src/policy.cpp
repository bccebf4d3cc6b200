#include "fmdp/policy.hpp"

#include <stdexcept>
#include <string>

namespace fmdp {

int PolicyTable::action_at(int h, FlatIndex s) const {
    if (h < 0 || h >= horizon() || s < 0 ||
        s >= static_cast<FlatIndex>(actions[static_cast<size_t>(h)].size())) {
        throw std::invalid_argument("policy lookup missing for step " + std::to_string(h) +
                                    ", state " + std::to_string(s));
    }
    return actions[static_cast<size_t>(h)][static_cast<size_t>(s)];
}

void PolicyTable::require_total(int horizon, FlatIndex num_states, FlatIndex num_actions) const {
    if (static_cast<int>(actions.size()) != horizon) {
        throw std::invalid_argument("policy covers " + std::to_string(actions.size()) +
                                    " steps, horizon is " + std::to_string(horizon));
    }
    for (const auto& row : actions) {
        if (static_cast<FlatIndex>(row.size()) != num_states) {
            throw std::invalid_argument("policy row covers " + std::to_string(row.size()) +
                                        " states, expected " + std::to_string(num_states));
        }
        for (int a : row) {
            if (a < 0 || a >= num_actions) {
                throw std::invalid_argument("policy action " + std::to_string(a) +
                                            " outside [0, " + std::to_string(num_actions) + ")");
            }
        }
    }
}

std::uint64_t PolicyTable::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto eat = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    };
    eat(actions.size());
    for (const auto& row : actions) {
        eat(row.size());
        for (int a : row) eat(static_cast<std::uint64_t>(a));
    }
    return h;
}

}  // namespace fmdp
