#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fmdp/agents.hpp"
#include "fmdp/policy.hpp"
#include "fmdp/spec.hpp"

namespace fmdp {

/// Discretization of the per-episode budgets: every budget and every cost
/// value is an integral multiple of 1/unit_denominator.
struct BudgetGrid {
    int unit_denominator = 1;      // q
    std::vector<double> budgets;   // one per constraint

    int num_constraints() const { return static_cast<int>(budgets.size()); }
    /// Budget in grid units, B_i * q.
    int budget_units(int i) const;

    bool operator==(const BudgetGrid&) const = default;
};

/// Finite-support cost distribution of one constraint at one (s,a).
struct CostAtom {
    double value = 0.0;
    double prob = 0.0;
    bool operator==(const CostAtom&) const = default;
};

struct CostDist {
    std::vector<CostAtom> support;
    bool operator==(const CostDist&) const = default;
};

/// Budget-constrained flat MDP: base dynamics plus per-constraint stochastic
/// costs on the unit grid. The augmented state is (s, remaining budget per
/// constraint); remaining budgets evolve by the sampled cost offset and clamp
/// to a violated sentinel once any coordinate goes negative.
struct BudgetedMdp {
    int num_states = 0;
    int num_actions = 0;
    int horizon = 0;
    std::vector<RewardDist> rewards;               // per s*A + a
    std::vector<std::vector<double>> transition;   // per s*A + a, row over s'
    BudgetGrid grid;
    std::vector<std::vector<CostDist>> costs;      // [constraint][s*A + a]

    int num_constraints() const { return grid.num_constraints(); }
    /// Number of representable cost levels of constraint i (max support value
    /// in grid units, plus one).
    int cost_levels(int i) const;
    /// Budget factor size of constraint i: grid points 0..B_i plus the
    /// violated sentinel.
    int budget_factor_size(int i) const { return grid.budget_units(i) + 2; }

    /// Augmented state count including sentinel combinations.
    FlatIndex augmented_size() const;
    /// Index of (s, remaining units per constraint); any negative remaining
    /// collapses to the sentinel.
    FlatIndex augmented_index(int s, std::span<const int> remaining_units) const;

    std::vector<int> full_budget_units() const;

    bool operator==(const BudgetedMdp&) const = default;
};

/// Validates grid alignment, probability rows, reward means and the
/// dimensionality guards (at most 2 constraints, B*q <= 64), then returns the
/// assembled model. Throws std::invalid_argument on any violation.
BudgetedMdp build_augmented(int num_states, int num_actions, int horizon,
                            std::vector<RewardDist> rewards,
                            std::vector<std::vector<double>> transition, BudgetGrid grid,
                            std::vector<std::vector<CostDist>> costs);

/// Pure step semantics: a step that begins with every remaining budget >= 0
/// collects its reward and pays its cost; the episode terminates iff any
/// remaining budget becomes strictly negative after paying.
struct BudgetStep {
    std::vector<int> next_remaining_units;  // clamped at -1 per coordinate
    double collected_reward = 0.0;
    bool terminated = false;
};

BudgetStep knapsack_step_semantics(std::span<const int> remaining_units,
                                   std::span<const int> cost_units, double sampled_reward);

/// Exact values and greedy policy over the augmented (step, state, budget)
/// space; violated budget states have value zero.
struct BudgetedValues {
    std::vector<std::vector<double>> v_star;  // (H+1) x augmented_size
    std::vector<std::vector<double>> q_star;  // H x (augmented_size * A)
    PolicyTable pi_star;                      // H x augmented_size
};

BudgetedValues budgeted_optimal_values(const BudgetedMdp& mdp);

/// Exact V^pi over the augmented space for a budget-aware policy.
std::vector<std::vector<double>> evaluate_budgeted_policy(const BudgetedMdp& mdp,
                                                          const PolicyTable& policy);

struct KnapsackRunRecord {
    std::vector<EpisodeRecord> episodes;
    std::int64_t constraint_violations = 0;  // steps taken from a violated budget; must stay 0
    PolicyTable final_policy;  // greedy on the final empirical model (no bonuses)
    std::uint64_t estimator_digest = 0;
};

/// Optimistic Bernstein learner on the augmented MDP: estimators are keyed by
/// (s,a) only, the budget transition reuses the estimated cost offsets, and
/// the executed policy respects the hard per-episode budget.
KnapsackRunRecord run_knapsack_bernstein(const BudgetedMdp& mdp, int initial_state,
                                         const RunConfig& cfg);

/// The two shipped illustration instances (budget 0.5, unit 1/2).
BudgetedMdp fig1_instance1();
BudgetedMdp fig1_instance2();

/// JSON fixture (de)serialization; schema documented in the README.
std::string budgeted_to_json(const BudgetedMdp& mdp, int indent = 2);
BudgetedMdp budgeted_from_json(const std::string& text);
BudgetedMdp load_budgeted_file(const std::string& path);
void save_budgeted_file(const BudgetedMdp& mdp, const std::string& path);

}  // namespace fmdp
