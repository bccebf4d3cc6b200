#pragma once

#include <vector>

#include "fmdp/indexing.hpp"

namespace fmdp {

/// Deterministic non-stationary policy: flat action index per (step, flat state).
/// actions[h][s] for h in [0, H) and s in [0, S).
struct PolicyTable {
    std::vector<std::vector<int>> actions;

    int horizon() const { return static_cast<int>(actions.size()); }

    int action_at(int h, FlatIndex s) const;

    /// Throws std::invalid_argument unless the table covers H x S with actions
    /// inside [0, A).
    void require_total(int horizon, FlatIndex num_states, FlatIndex num_actions) const;

    /// FNV-1a hash of the action table, for cheap per-episode policy identity.
    std::uint64_t hash() const;
};

}  // namespace fmdp
