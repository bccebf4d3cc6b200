#pragma once

#include <cstdint>
#include <vector>

#include "fmdp/policy.hpp"
#include "fmdp/rng.hpp"
#include "fmdp/spec.hpp"

namespace fmdp {

/// One executed step: joint factor vectors plus the individually observed
/// per-component reward samples.
struct TrajectoryStep {
    FactorVec state;
    FactorVec action;
    std::vector<double> reward_samples;  // r_{t,i}, one per reward factor
    FactorVec next_state;

    /// Observed step reward (1/m) sum_i r_{t,i}.
    double step_reward() const;
};

/// One episode's record. Identical (spec, policy, seed, episode) always
/// reproduces the identical trajectory.
struct Trajectory {
    FactorVec initial_state;
    std::vector<TrajectoryStep> steps;

    double total_reward() const;
};

/// Runs one episode of `spec` under `policy` from `initial_state`. Every
/// random draw is keyed by (seed, episode, step, factor), so draws are
/// order-independent and episodes with distinct keys can run in parallel.
Trajectory run_episode(const FmdpSpec& spec, const PolicyTable& policy,
                       const FactorVec& initial_state, CounterRng rng,
                       std::uint64_t episode = 0);

/// Production-line benchmark: d machines in sequence, each influenced only by
/// its direct neighbors. Machine i's reward and transition scope is its
/// neighbor window plus the shared action factor; rows and means are random
/// but valid, deterministic in the seed.
FmdpSpec gen_production_line(int d, int per_machine_states, int actions, std::uint64_t seed);

/// Hard benchmark of independent tree bandits: each of the `num_factors`
/// components walks a binary tree of depth log2(states_per_factor) with
/// deterministic transitions; leaves self-loop and carry Bernoulli rewards.
/// Per component, the (first leaf, action 0) arm has mean 0.5 + gap, every
/// other leaf arm has mean 0.5. Requires states_per_factor a power of two and
/// log2(states_per_factor) <= H/2.
FmdpSpec gen_tree_bandit_instance(int num_factors, int states_per_factor, int actions_per_factor,
                                  double gap, int horizon);

/// Hard benchmark of independent two-well components: from any non-rewarding
/// state each action reaches the rewarding state with probability 0.5, except
/// one hidden (state 0, action) pair boosted by epsilon. The rewarding state
/// pays deterministic reward 1 and falls back to state 0 with probability 0.5.
FmdpSpec gen_parallel_hard_mdps(int num_factors, int states, int actions, double epsilon,
                                int horizon, std::uint64_t seed);

/// Random valid spec for the given dims and scopes: transition rows drawn
/// uniformly from the simplex, Bernoulli reward means uniform in [0,1].
FmdpSpec gen_random_fmdp(const FactorDims& dims, const std::vector<Scope>& reward_scopes,
                         const std::vector<Scope>& transition_scopes, int horizon,
                         std::uint64_t seed);

}  // namespace fmdp
