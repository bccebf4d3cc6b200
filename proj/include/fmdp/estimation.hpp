#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fmdp/env.hpp"
#include "fmdp/spec.hpp"

namespace fmdp {

/// Visit counters and running sums for one factored reward component,
/// over the cells of its scope.
struct RewardCounter {
    Scope scope;
    std::vector<int> scope_dims;
    std::vector<std::int64_t> counts;
    std::vector<double> sum_r;
    std::vector<double> sum_r2;
};

/// Visit counters and joint next-value counters for one factored transition
/// component: joint_counts[cell * S_j + v] counts transitions of factor j to
/// value v after visiting the cell.
struct TransitionCounter {
    Scope scope;
    std::vector<int> scope_dims;
    int next_dim = 0;
    std::vector<std::int64_t> counts;
    std::vector<std::int64_t> joint_counts;
};

/// Empirical model of a factored MDP: per-scope counters, reward means and
/// variances, and transition rows. Counts only grow; updates are
/// order-independent across episodes. Single writer during update; treat as
/// an immutable snapshot while a planner sweep reads it.
class Estimators {
  public:
    explicit Estimators(const FmdpSpec& spec);

    /// Folds one trajectory into all counters.
    void update_from_episode(const Trajectory& traj);

    int num_reward_factors() const { return static_cast<int>(rewards_.size()); }
    int num_transition_factors() const { return static_cast<int>(transitions_.size()); }

    /// Scope cell index of a joint (s,a) factor vector for reward factor i.
    FlatIndex reward_cell(int i, std::span<const int> joint) const;
    FlatIndex transition_cell(int j, std::span<const int> joint) const;

    std::int64_t reward_count(int i, FlatIndex cell) const {
        return rewards_[static_cast<size_t>(i)].counts[static_cast<size_t>(cell)];
    }
    std::int64_t transition_count(int j, FlatIndex cell) const {
        return transitions_[static_cast<size_t>(j)].counts[static_cast<size_t>(cell)];
    }

    /// Empirical reward mean; optimistic default 1.0 for an unvisited cell.
    double reward_mean(int i, FlatIndex cell) const;

    /// Biased empirical variance (1/N convention), clamped into [0, 0.25].
    /// Throws std::domain_error for an unvisited cell.
    double reward_variance(int i, FlatIndex cell) const;

    /// Empirical transition row of factor j at a visited cell.
    /// Throws std::domain_error for an unvisited cell.
    std::vector<double> transition_row(int j, FlatIndex cell) const;

    /// True iff every transition factor's cell of this (s,a) has been visited.
    bool in_known_set(std::span<const int> joint) const;

    const RewardCounter& reward_counter(int i) const { return rewards_[static_cast<size_t>(i)]; }
    const TransitionCounter& transition_counter(int j) const {
        return transitions_[static_cast<size_t>(j)];
    }

    /// Debug dump, columns: scope_id,cell_index,count. Reward scopes are R0..,
    /// transition scopes P0..
    void dump_counts_csv(std::ostream& out) const;

    /// FNV-1a digest over all counters and sums, for run records.
    std::uint64_t digest() const;

  private:
    std::vector<int> joint_dims_;
    std::vector<RewardCounter> rewards_;
    std::vector<TransitionCounter> transitions_;
};

}  // namespace fmdp
