#pragma once

#include <random>
#include <vector>

#include "fmdp/estimation.hpp"
#include "fmdp/spec.hpp"

namespace fmdp::testing {

/// Full-enumeration product backup: sum_{s'} prod_j rows[j][s'[j]] V(s').
/// Deliberately independent of the PrefixBackup implementation.
inline double naive_backup(const std::vector<std::vector<double>>& rows,
                           const std::vector<double>& value) {
    std::vector<int> dims;
    for (const auto& r : rows) dims.push_back(static_cast<int>(r.size()));
    double acc = 0.0;
    for (FlatIndex x = 0; x < table_size(dims); ++x) {
        const auto outcome = decode_index(x, dims);
        double p = 1.0;
        for (size_t j = 0; j < rows.size(); ++j) p *= rows[j][static_cast<size_t>(outcome[j])];
        acc += p * value[static_cast<size_t>(x)];
    }
    return acc;
}

/// Full-enumeration nested variances, by direct grouping over prefixes.
inline std::vector<double> naive_nested_variance(const std::vector<std::vector<double>>& rows,
                                                 const std::vector<double>& value) {
    const int n = static_cast<int>(rows.size());
    std::vector<int> dims;
    for (const auto& r : rows) dims.push_back(static_cast<int>(r.size()));
    std::vector<double> out(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        // enumerate prefixes s'[0..i-1]
        std::vector<int> prefix_dims(dims.begin(), dims.begin() + i);
        for (FlatIndex p = 0; p < table_size(prefix_dims); ++p) {
            const auto pv = decode_index(p, prefix_dims);
            double p_prob = 1.0;
            for (int j = 0; j < i; ++j) p_prob *= rows[static_cast<size_t>(j)][static_cast<size_t>(pv[static_cast<size_t>(j)])];
            // conditional expectation of V over the suffix, per value of factor i
            double mean = 0.0, mean2 = 0.0;
            for (int v = 0; v < dims[static_cast<size_t>(i)]; ++v) {
                std::vector<int> suffix_dims(dims.begin() + i + 1, dims.end());
                double cond = 0.0;
                for (FlatIndex sfx = 0; sfx < table_size(suffix_dims); ++sfx) {
                    const auto sv = decode_index(sfx, suffix_dims);
                    double sp = 1.0;
                    FactorVec full(pv.begin(), pv.end());
                    full.push_back(v);
                    for (size_t j = 0; j < sv.size(); ++j) {
                        sp *= rows[static_cast<size_t>(i) + 1 + j][static_cast<size_t>(sv[j])];
                        full.push_back(sv[j]);
                    }
                    cond += sp * value[static_cast<size_t>(encode_index(full, dims))];
                }
                const double pi = rows[static_cast<size_t>(i)][static_cast<size_t>(v)];
                mean += pi * cond;
                mean2 += pi * cond * cond;
            }
            out[static_cast<size_t>(i)] += p_prob * (mean2 - mean * mean);
        }
    }
    return out;
}

/// Random spec whose transition rows and Bernoulli means live on the k/Q
/// grid, so integer-count synthetic data can reproduce the model bit-exactly.
inline FmdpSpec grid_spec(const std::vector<int>& state_dims, int actions, int horizon,
                          int grid_q, std::mt19937& gen) {
    const int n = static_cast<int>(state_dims.size());
    FmdpSpec spec;
    spec.dims.state_dims = state_dims;
    spec.dims.action_dims = {actions};
    spec.horizon = horizon;
    std::uniform_int_distribution<int> mean_pick(0, grid_q);
    for (int i = 0; i < n; ++i) {
        const Scope scope({i, n});
        RewardFactor rf;
        rf.scope = scope;
        TransitionFactor tf;
        tf.scope = scope;
        const auto card = static_cast<size_t>(state_dims[static_cast<size_t>(i)] * actions);
        for (size_t c = 0; c < card; ++c) {
            rf.table.push_back(
                RewardDist::bernoulli(static_cast<double>(mean_pick(gen)) / grid_q));
            // random composition of grid_q over the factor's values
            std::vector<int> counts(static_cast<size_t>(state_dims[static_cast<size_t>(i)]), 0);
            for (int u = 0; u < grid_q; ++u) {
                counts[static_cast<size_t>(std::uniform_int_distribution<int>(
                    0, state_dims[static_cast<size_t>(i)] - 1)(gen))] += 1;
            }
            std::vector<double> row;
            for (int cnt : counts) row.push_back(static_cast<double>(cnt) / grid_q);
            tf.rows.push_back(std::move(row));
        }
        spec.rewards.push_back(std::move(rf));
        spec.transitions.push_back(std::move(tf));
    }
    return spec;
}

/// Feeds synthetic batches so the empirical model equals the true model
/// exactly: every joint (s,a) cell is visited grid_q times, with next-state
/// factor multiplicities and Bernoulli reward counts matching the grid
/// numerators.
inline void feed_exact(Estimators& est, const FmdpSpec& spec, int grid_q) {
    const auto sdims = spec.dims.state_dims;
    const auto all = spec.dims.joint_dims();
    for (FlatIndex s = 0; s < spec.dims.state_count(); ++s) {
        for (FlatIndex a = 0; a < spec.dims.action_count(); ++a) {
            FactorVec joint = decode_index(s, sdims);
            const auto av = decode_index(a, spec.dims.action_dims);
            joint.insert(joint.end(), av.begin(), av.end());

            // per-factor next-value sequences with exact multiplicities
            std::vector<std::vector<int>> next_seq(sdims.size());
            for (size_t j = 0; j < sdims.size(); ++j) {
                const auto& row = spec.transition_row(static_cast<int>(j), joint);
                for (size_t v = 0; v < row.size(); ++v) {
                    const int count = static_cast<int>(std::lround(row[v] * grid_q));
                    next_seq[j].insert(next_seq[j].end(), static_cast<size_t>(count),
                                       static_cast<int>(v));
                }
            }
            std::vector<std::vector<double>> reward_seq(spec.rewards.size());
            for (size_t i = 0; i < spec.rewards.size(); ++i) {
                const auto& rf = spec.rewards[i];
                const auto cell = encode_index(project_scope(joint, rf.scope), rf.scope.dims_in(all));
                const int ones = static_cast<int>(
                    std::lround(rf.table[static_cast<size_t>(cell)].mean() * grid_q));
                reward_seq[i].assign(static_cast<size_t>(ones), 1.0);
                reward_seq[i].resize(static_cast<size_t>(grid_q), 0.0);
            }

            Trajectory traj;
            traj.initial_state = decode_index(s, sdims);
            for (int t = 0; t < grid_q; ++t) {
                TrajectoryStep step;
                step.state = decode_index(s, sdims);
                step.action = av;
                for (size_t i = 0; i < reward_seq.size(); ++i) {
                    step.reward_samples.push_back(reward_seq[i][static_cast<size_t>(t)]);
                }
                for (size_t j = 0; j < sdims.size(); ++j) {
                    step.next_state.push_back(next_seq[j][static_cast<size_t>(t)]);
                }
                traj.steps.push_back(std::move(step));
            }
            est.update_from_episode(traj);
        }
    }
}

}  // namespace fmdp::testing
