#pragma once

#include <span>
#include <vector>

#include "fmdp/bonuses.hpp"
#include "fmdp/estimation.hpp"
#include "fmdp/policy.hpp"
#include "fmdp/spec.hpp"

namespace fmdp {

/// View over the per-factor rows of one product distribution.
using RowViews = std::vector<std::span<const double>>;

/// Backward prefix tables for one (rows, value-vector) pair:
/// partial[i][p] is the expectation of the value over factors i..n-1 given the
/// prefix p over factors 0..i-1, so partial[n] is the value itself and
/// partial[0][0] is the full product-distribution backup. Built back to
/// front in O(sum_i |S_i| prod_{j<=i} |S_j|) instead of the naive O(n S).
struct PrefixBackup {
    std::vector<std::vector<double>> partial;      // n+1 levels
    std::vector<std::vector<double>> prefix_prob;  // prefix_prob[i][p] over factors 0..i-1

    PrefixBackup(std::span<const std::span<const double>> rows, std::span<const double> value);

    double backup() const { return partial.front().front(); }
};

/// sum_{s'} prod_j rows[j](s'[j]) * value(s'), value indexed last-factor-fastest.
double factored_backup(std::span<const std::span<const double>> rows,
                       std::span<const double> value);

/// Per-factor nested variances: entry i is the expectation over prefixes of
/// the variance over factor i of the partial backup. Their sum telescopes to
/// the total variance of value(s') under the product distribution.
std::vector<double> nested_variance(std::span<const std::span<const double>> rows,
                                    std::span<const double> value);

/// Per-factor expected squared partial expectation of the optimistic-
/// pessimistic gap: entry i is E over prefixes 0..i of (E over the remaining
/// factors of (upper - lower))^2. Requires upper >= lower entrywise.
std::vector<double> expected_squared_gap(std::span<const std::span<const double>> rows,
                                         std::span<const double> upper,
                                         std::span<const double> lower);

/// Optimistic/pessimistic value tables from one planning sweep.
/// v_upper/v_lower have H+1 step levels (level H is the zero boundary),
/// q_upper has H levels of S*A entries, policy is the greedy argmax with
/// lowest-index tie-break.
struct ValueTables {
    std::vector<std::vector<double>> v_upper;
    std::vector<std::vector<double>> v_lower;
    std::vector<std::vector<double>> q_upper;
    PolicyTable policy;
};

/// Cells (flattened s*A+a) whose every transition-factor counter is positive.
std::vector<bool> known_cells(const FmdpSpec& spec, const Estimators& est);

/// Backward sweep with Hoeffding bonuses: unknown cells get Q = H, known
/// cells get min{H, Rhat + CB + Phat V}. The bonus does not depend on the
/// step, only on the visit counts. bonus_scale multiplies every bonus;
/// 0 turns the sweep into plain value iteration on the empirical model.
ValueTables sweep_hoeffding(const FmdpSpec& spec, const Estimators& est, const LogFactors& lf,
                            const std::vector<bool>& known, double bonus_scale = 1.0);

/// Backward sweep with Bernstein bonuses: the transition bonus at step h uses
/// the nested variance of v_upper[h+1] and the squared gap of
/// (v_upper - v_lower)[h+1], recomputed per cell inside the sweep. The
/// pessimistic value subtracts the same bonus along the greedy action.
ValueTables sweep_bernstein(const FmdpSpec& spec, const Estimators& est, const LogFactors& lf,
                            const std::vector<bool>& known, double bonus_scale = 1.0);

}  // namespace fmdp
