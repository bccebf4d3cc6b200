#include "fmdp/env.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fmdp {

namespace {

// Key tags so that reward, transition and generator draws never collide.
enum Draw : std::uint64_t { kReward = 1, kTransition = 2, kGenRow = 3, kGenMean = 4, kGenPick = 5 };

double sample_reward(const RewardDist& dist, const CounterRng& rng, std::uint64_t episode,
                     std::uint64_t step, std::uint64_t factor) {
    switch (dist.kind) {
        case RewardDist::Kind::Deterministic:
            return dist.value;
        case RewardDist::Kind::Bernoulli:
            return rng.bernoulli(dist.value, {episode, step, kReward, factor}) ? 1.0 : 0.0;
    }
    return 0.0;
}

}  // namespace

double TrajectoryStep::step_reward() const {
    double sum = 0.0;
    for (double r : reward_samples) sum += r;
    return sum / static_cast<double>(reward_samples.size());
}

double Trajectory::total_reward() const {
    double sum = 0.0;
    for (const auto& st : steps) sum += st.step_reward();
    return sum;
}

Trajectory run_episode(const FmdpSpec& spec, const PolicyTable& policy,
                       const FactorVec& initial_state, CounterRng rng, std::uint64_t episode) {
    const auto sdims = spec.dims.state_dims;
    policy.require_total(spec.horizon, spec.dims.state_count(), spec.dims.action_count());

    Trajectory traj;
    traj.initial_state = initial_state;
    traj.steps.reserve(static_cast<size_t>(spec.horizon));

    FactorVec state = initial_state;
    const auto all = spec.dims.joint_dims();
    for (int h = 0; h < spec.horizon; ++h) {
        const FlatIndex s = encode_index(state, sdims);
        const int a = policy.action_at(h, s);
        const auto av = decode_index(a, spec.dims.action_dims);

        FactorVec joint = state;
        joint.insert(joint.end(), av.begin(), av.end());

        TrajectoryStep step;
        step.state = state;
        step.action = av;
        step.reward_samples.reserve(spec.rewards.size());
        for (size_t i = 0; i < spec.rewards.size(); ++i) {
            const auto& rf = spec.rewards[i];
            const auto cell = project_scope(joint, rf.scope);
            const auto cell_dims = rf.scope.dims_in(all);
            const auto& dist = rf.table[static_cast<size_t>(encode_index(cell, cell_dims))];
            step.reward_samples.push_back(
                sample_reward(dist, rng, episode, static_cast<std::uint64_t>(h), i));
        }

        FactorVec next(sdims.size());
        for (size_t j = 0; j < sdims.size(); ++j) {
            const auto& row = spec.transition_row(static_cast<int>(j), joint);
            next[j] = rng.categorical(
                row, {episode, static_cast<std::uint64_t>(h), kTransition, j});
        }
        step.next_state = next;
        traj.steps.push_back(std::move(step));
        state = std::move(next);
    }
    return traj;
}

namespace {

std::vector<double> random_simplex_row(const CounterRng& rng, std::uint64_t table,
                                       std::uint64_t cell, int size) {
    std::vector<double> row(static_cast<size_t>(size));
    double sum = 0.0;
    for (int v = 0; v < size; ++v) {
        const double u =
            rng.uniform({kGenRow, table, cell, static_cast<std::uint64_t>(v)});
        row[static_cast<size_t>(v)] = -std::log1p(-u);  // Exp(1)
        sum += row[static_cast<size_t>(v)];
    }
    for (double& p : row) p /= sum;
    return row;
}

}  // namespace

FmdpSpec gen_random_fmdp(const FactorDims& dims, const std::vector<Scope>& reward_scopes,
                         const std::vector<Scope>& transition_scopes, int horizon,
                         std::uint64_t seed) {
    if (static_cast<int>(transition_scopes.size()) != dims.num_state_factors()) {
        throw std::invalid_argument("need one transition scope per state factor");
    }
    if (reward_scopes.empty()) throw std::invalid_argument("need at least one reward scope");
    CounterRng rng(seed);
    const auto all = dims.joint_dims();

    FmdpSpec spec;
    spec.dims = dims;
    spec.horizon = horizon;
    for (size_t i = 0; i < reward_scopes.size(); ++i) {
        RewardFactor rf;
        rf.scope = reward_scopes[i];
        const auto card = rf.scope.cardinality_in(all);
        rf.table.reserve(static_cast<size_t>(card));
        for (FlatIndex c = 0; c < card; ++c) {
            rf.table.push_back(RewardDist::bernoulli(
                rng.uniform({kGenMean, i, static_cast<std::uint64_t>(c)})));
        }
        spec.rewards.push_back(std::move(rf));
    }
    for (size_t j = 0; j < transition_scopes.size(); ++j) {
        TransitionFactor tf;
        tf.scope = transition_scopes[j];
        const auto card = tf.scope.cardinality_in(all);
        tf.rows.reserve(static_cast<size_t>(card));
        for (FlatIndex c = 0; c < card; ++c) {
            tf.rows.push_back(random_simplex_row(rng, j, static_cast<std::uint64_t>(c),
                                                 dims.state_dims[j]));
        }
        spec.transitions.push_back(std::move(tf));
    }
    require_valid(spec);
    return spec;
}

FmdpSpec gen_production_line(int d, int per_machine_states, int actions, std::uint64_t seed) {
    if (d < 2) throw std::invalid_argument("production line needs d >= 2 machines");
    if (per_machine_states < 1 || actions < 1) {
        throw std::invalid_argument("machine states and actions must be >= 1");
    }
    FactorDims dims;
    dims.state_dims.assign(static_cast<size_t>(d), per_machine_states);
    dims.action_dims = {actions};

    std::vector<Scope> scopes;
    scopes.reserve(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) {
        std::vector<int> idx;
        if (i == 0) {
            idx = {0, 1};
        } else if (i == d - 1) {
            idx = {d - 2, d - 1};
        } else {
            idx = {i - 1, i, i + 1};
        }
        idx.push_back(d);  // the shared action factor
        scopes.emplace_back(std::move(idx));
    }
    return gen_random_fmdp(dims, scopes, scopes, /*horizon=*/d, seed);
}

FmdpSpec gen_tree_bandit_instance(int num_factors, int states_per_factor, int actions_per_factor,
                                  double gap, int horizon) {
    if (num_factors < 1) throw std::invalid_argument("need at least one tree component");
    if (states_per_factor < 2 || (states_per_factor & (states_per_factor - 1)) != 0) {
        throw std::invalid_argument("states_per_factor must be a power of two >= 2");
    }
    if (actions_per_factor < 1) throw std::invalid_argument("need at least one action per factor");
    int depth = 0;
    for (int v = states_per_factor; v > 1; v >>= 1) ++depth;
    if (2 * depth > horizon) {
        throw std::invalid_argument("tree depth " + std::to_string(depth) +
                                    " exceeds horizon/2 = " + std::to_string(horizon) + "/2");
    }
    if (gap < 0.0 || 0.5 + gap > 1.0) {
        throw std::invalid_argument("gap must keep the boosted mean inside [0,1]");
    }

    const int nodes = states_per_factor - 1;   // full binary tree, heap order
    const int first_leaf = states_per_factor / 2 - 1;
    const int n = num_factors;

    FmdpSpec spec;
    spec.horizon = horizon;
    spec.dims.state_dims.assign(static_cast<size_t>(n), nodes);
    spec.dims.action_dims.assign(static_cast<size_t>(n), actions_per_factor);

    for (int i = 0; i < n; ++i) {
        const Scope scope({i, n + i});
        RewardFactor rf;
        rf.scope = scope;
        TransitionFactor tf;
        tf.scope = scope;
        for (int node = 0; node < nodes; ++node) {
            const bool leaf = node >= first_leaf;
            for (int a = 0; a < actions_per_factor; ++a) {
                if (leaf) {
                    const bool best = node == first_leaf && a == 0;
                    rf.table.push_back(RewardDist::bernoulli(best ? 0.5 + gap : 0.5));
                } else {
                    rf.table.push_back(RewardDist::deterministic(0.0));
                }
                std::vector<double> row(static_cast<size_t>(nodes), 0.0);
                const int next = leaf ? node : 2 * node + 1 + (a & 1);
                row[static_cast<size_t>(next)] = 1.0;
                tf.rows.push_back(std::move(row));
            }
        }
        spec.rewards.push_back(std::move(rf));
        spec.transitions.push_back(std::move(tf));
    }
    require_valid(spec);
    return spec;
}

FmdpSpec gen_parallel_hard_mdps(int num_factors, int states, int actions, double epsilon,
                                int horizon, std::uint64_t seed) {
    if (num_factors < 1) throw std::invalid_argument("need at least one component");
    if (states < 2 || actions < 1) {
        throw std::invalid_argument("each component needs >= 2 states and >= 1 action");
    }
    if (epsilon < 0.0 || 0.5 + epsilon > 1.0) {
        throw std::invalid_argument("epsilon pushes a transition probability outside [0,1]");
    }
    CounterRng rng(seed);
    const int n = num_factors;
    const int reward_state = states - 1;

    FmdpSpec spec;
    spec.horizon = horizon;
    spec.dims.state_dims.assign(static_cast<size_t>(n), states);
    spec.dims.action_dims.assign(static_cast<size_t>(n), actions);

    for (int i = 0; i < n; ++i) {
        const int hidden_action = static_cast<int>(
            rng.uniform({kGenPick, static_cast<std::uint64_t>(i)}) * actions);
        const Scope scope({i, n + i});
        RewardFactor rf;
        rf.scope = scope;
        TransitionFactor tf;
        tf.scope = scope;
        for (int s = 0; s < states; ++s) {
            for (int a = 0; a < actions; ++a) {
                rf.table.push_back(RewardDist::deterministic(s == reward_state ? 1.0 : 0.0));
                std::vector<double> row(static_cast<size_t>(states), 0.0);
                if (s == reward_state) {
                    row[static_cast<size_t>(reward_state)] = 0.5;
                    row[0] += 0.5;
                } else {
                    const double boost = (s == 0 && a == hidden_action) ? epsilon : 0.0;
                    row[static_cast<size_t>(reward_state)] = 0.5 + boost;
                    row[static_cast<size_t>(s)] += 0.5 - boost;
                }
                tf.rows.push_back(std::move(row));
            }
        }
        spec.rewards.push_back(std::move(rf));
        spec.transitions.push_back(std::move(tf));
    }
    require_valid(spec);
    return spec;
}

}  // namespace fmdp
