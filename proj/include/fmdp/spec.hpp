#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fmdp/indexing.hpp"

namespace fmdp {

/// Reward distribution of a single reward component at one scope cell.
/// Support is restricted to families with support in [0,1] so that return
/// distributions stay finitely enumerable.
struct RewardDist {
    enum class Kind { Bernoulli, Deterministic };
    Kind kind = Kind::Deterministic;
    double value = 0.0;  // Bernoulli mean, or the deterministic reward

    double mean() const { return value; }
    double variance() const {
        return kind == Kind::Bernoulli ? value * (1.0 - value) : 0.0;
    }

    static RewardDist bernoulli(double mean) { return {Kind::Bernoulli, mean}; }
    static RewardDist deterministic(double v) { return {Kind::Deterministic, v}; }

    bool operator==(const RewardDist&) const = default;
};

/// One factored reward component: scope into the joint factor vector plus a
/// distribution per scope cell (indexed by encode_index over the scope dims).
struct RewardFactor {
    Scope scope;
    std::vector<RewardDist> table;

    bool operator==(const RewardFactor&) const = default;
};

/// One factored transition component: the scope its row depends on plus a
/// probability row over its state factor per scope cell.
struct TransitionFactor {
    Scope scope;
    std::vector<std::vector<double>> rows;  // rows[cell][next factor value]

    bool operator==(const TransitionFactor&) const = default;
};

/// Complete factored MDP: factor dimensions, horizon, reward components and
/// per-state-factor transition components. Immutable after validation; all
/// queries are const and safe to share across threads.
struct FmdpSpec {
    FactorDims dims;
    int horizon = 1;
    std::vector<RewardFactor> rewards;
    std::vector<TransitionFactor> transitions;  // one per state factor

    int num_reward_factors() const { return static_cast<int>(rewards.size()); }
    int num_transition_factors() const { return static_cast<int>(transitions.size()); }

    /// Mean reward (1/m) sum_i Rbar_i((s,a)[Z_i]) at a joint factor vector.
    double mean_reward(std::span<const int> joint) const;

    /// Transition row of state factor j at a joint factor vector.
    const std::vector<double>& transition_row(int j, std::span<const int> joint) const;

    /// Per-factor rows at a joint factor vector, in state-factor order.
    std::vector<const std::vector<double>*> transition_rows(std::span<const int> joint) const;

    bool operator==(const FmdpSpec&) const = default;
};

/// Outcome of validate_spec: ok() iff no violations were found.
struct SpecValidation {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Structural validation: row sums, probability ranges, reward means in [0,1],
/// table sizes matching scope cardinalities, scope indices in range.
/// Violations are reported as data, never thrown.
SpecValidation validate_spec(const FmdpSpec& spec);

/// Throws std::invalid_argument listing all violations when the spec is invalid.
void require_valid(const FmdpSpec& spec);

/// Collapses a factored spec to the equivalent flat MDP: one state factor of
/// size S, one action factor of size A, a single full-scope Bernoulli reward
/// with the original mean, and a single full-scope transition with the product
/// rows.
FmdpSpec flatten_to_flat_mdp(const FmdpSpec& spec);

/// JSON (de)serialization of the spec document described in the README.
std::string spec_to_json(const FmdpSpec& spec, int indent = 2);
FmdpSpec spec_from_json(const std::string& text);
FmdpSpec load_spec_file(const std::string& path);
void save_spec_file(const FmdpSpec& spec, const std::string& path);

}  // namespace fmdp
