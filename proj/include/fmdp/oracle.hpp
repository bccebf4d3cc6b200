#pragma once

#include <vector>

#include "fmdp/planner.hpp"
#include "fmdp/policy.hpp"
#include "fmdp/spec.hpp"

namespace fmdp {

/// Ground-truth optimal values from backward induction on the true model.
struct ExactValues {
    std::vector<std::vector<double>> v_star;  // (H+1) x S
    std::vector<std::vector<double>> q_star;  // H x (S*A)
    PolicyTable pi_star;                      // lowest-index tie-break
};

ExactValues exact_optimal_values(const FmdpSpec& spec);

/// Exact V^pi by backward induction; (H+1) x S.
std::vector<std::vector<double>> evaluate_policy(const FmdpSpec& spec, const PolicyTable& policy);

/// Return-variance tables of the chain induced by a policy.
/// omega2[h][s] is the variance of the total reward collected from step h
/// onward starting at s; sigma2_p[h][s][i] the nested per-factor transition
/// variances of V^pi_{h+1}; sigma2_r[h][s][i] the true per-component reward
/// variances at (s, pi_h(s)).
struct ChainVariance {
    std::vector<std::vector<double>> omega2;
    std::vector<std::vector<std::vector<double>>> sigma2_p;
    std::vector<std::vector<std::vector<double>>> sigma2_r;
};

/// omega2 via the variance Bellman recursion
///   omega2_h = P omega2_{h+1} + sum_i sigma2_{P,i,h} + (1/m^2) sum_i sigma2_{R,i}.
ChainVariance chain_variance_recursive(const FmdpSpec& spec, const PolicyTable& policy);

/// omega2 via direct enumeration of every trajectory and reward outcome.
/// Independent of the recursion above; requires finite reward supports and
/// refuses instances whose outcome count exceeds max_atoms.
std::vector<std::vector<double>> chain_variance_bruteforce(const FmdpSpec& spec,
                                                           const PolicyTable& policy,
                                                           std::int64_t max_atoms = 10'000'000);

/// Occupancy-weighted total variance against the H^2 bound, plus the
/// telescoped start-state variance it should equal.
struct TotalVarianceCheck {
    double lhs = 0.0;
    double bound = 0.0;         // H^2
    double omega2_start = 0.0;  // omega2 at (h=0, initial state)
    bool ok = false;            // lhs <= bound + 1e-9
};

TotalVarianceCheck total_variance_bound_check(const FmdpSpec& spec, const PolicyTable& policy,
                                              const FactorVec& initial_state);

/// Both estimation-error decomposition inequalities for a pair of product
/// distributions and a value vector:
///   |Phat - P|_1            <= sum_i |Delta_i|_1
///   |(Phat - P) V|          <= sum_i |(Phat_i - P_i)(prod_{j!=i} P_j) V|
///                              + sum_{i != j} |V|_inf |Delta_i|_1 |Delta_j|_1
struct DecompositionCheck {
    double l1_lhs = 0.0;
    double l1_rhs = 0.0;
    double value_lhs = 0.0;
    double value_rhs = 0.0;
    bool ok = false;  // both inequalities hold with 1e-12 slack
};

DecompositionCheck decomposition_inequality_check(
    const std::vector<std::vector<double>>& rows_hat,
    const std::vector<std::vector<double>>& rows_true, const std::vector<double>& value);

}  // namespace fmdp
