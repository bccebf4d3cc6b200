#include "fmdp/estimation.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>

namespace fmdp {

Estimators::Estimators(const FmdpSpec& spec) : joint_dims_(spec.dims.joint_dims()) {
    rewards_.reserve(spec.rewards.size());
    for (const auto& rf : spec.rewards) {
        RewardCounter rc;
        rc.scope = rf.scope;
        rc.scope_dims = rf.scope.dims_in(joint_dims_);
        const auto card = static_cast<size_t>(table_size(rc.scope_dims));
        rc.counts.assign(card, 0);
        rc.sum_r.assign(card, 0.0);
        rc.sum_r2.assign(card, 0.0);
        rewards_.push_back(std::move(rc));
    }
    transitions_.reserve(spec.transitions.size());
    for (size_t j = 0; j < spec.transitions.size(); ++j) {
        TransitionCounter tc;
        tc.scope = spec.transitions[j].scope;
        tc.scope_dims = tc.scope.dims_in(joint_dims_);
        tc.next_dim = spec.dims.state_dims[j];
        const auto card = static_cast<size_t>(table_size(tc.scope_dims));
        tc.counts.assign(card, 0);
        tc.joint_counts.assign(card * static_cast<size_t>(tc.next_dim), 0);
        transitions_.push_back(std::move(tc));
    }
}

FlatIndex Estimators::reward_cell(int i, std::span<const int> joint) const {
    const auto& rc = rewards_[static_cast<size_t>(i)];
    return encode_index(project_scope(joint, rc.scope), rc.scope_dims);
}

FlatIndex Estimators::transition_cell(int j, std::span<const int> joint) const {
    const auto& tc = transitions_[static_cast<size_t>(j)];
    return encode_index(project_scope(joint, tc.scope), tc.scope_dims);
}

void Estimators::update_from_episode(const Trajectory& traj) {
    for (const auto& step : traj.steps) {
        if (step.state.size() + step.action.size() != joint_dims_.size()) {
            throw std::invalid_argument("trajectory step factor count does not match spec dims");
        }
        FactorVec joint = step.state;
        joint.insert(joint.end(), step.action.begin(), step.action.end());
        if (step.reward_samples.size() != rewards_.size()) {
            throw std::invalid_argument("trajectory reward sample count does not match spec");
        }
        for (size_t i = 0; i < rewards_.size(); ++i) {
            auto& rc = rewards_[i];
            const auto cell = static_cast<size_t>(reward_cell(static_cast<int>(i), joint));
            const double r = step.reward_samples[i];
            rc.counts[cell] += 1;
            rc.sum_r[cell] += r;
            rc.sum_r2[cell] += r * r;
        }
        for (size_t j = 0; j < transitions_.size(); ++j) {
            auto& tc = transitions_[j];
            const auto cell = static_cast<size_t>(transition_cell(static_cast<int>(j), joint));
            tc.counts[cell] += 1;
            tc.joint_counts[cell * static_cast<size_t>(tc.next_dim) +
                            static_cast<size_t>(step.next_state[j])] += 1;
        }
    }
}

double Estimators::reward_mean(int i, FlatIndex cell) const {
    const auto& rc = rewards_[static_cast<size_t>(i)];
    const auto c = rc.counts[static_cast<size_t>(cell)];
    if (c == 0) return 1.0;  // optimistic default for an unvisited cell
    return rc.sum_r[static_cast<size_t>(cell)] / static_cast<double>(c);
}

double Estimators::reward_variance(int i, FlatIndex cell) const {
    const auto& rc = rewards_[static_cast<size_t>(i)];
    const auto c = rc.counts[static_cast<size_t>(cell)];
    if (c == 0) {
        throw std::domain_error("reward variance undefined for unvisited cell " +
                                std::to_string(cell) + " of factor " + std::to_string(i));
    }
    const double mean = rc.sum_r[static_cast<size_t>(cell)] / static_cast<double>(c);
    const double var = rc.sum_r2[static_cast<size_t>(cell)] / static_cast<double>(c) - mean * mean;
    return std::clamp(var, 0.0, 0.25);
}

std::vector<double> Estimators::transition_row(int j, FlatIndex cell) const {
    const auto& tc = transitions_[static_cast<size_t>(j)];
    const auto c = tc.counts[static_cast<size_t>(cell)];
    if (c == 0) {
        throw std::domain_error("transition row undefined for unvisited cell " +
                                std::to_string(cell) + " of factor " + std::to_string(j));
    }
    std::vector<double> row(static_cast<size_t>(tc.next_dim));
    const size_t base = static_cast<size_t>(cell) * static_cast<size_t>(tc.next_dim);
    for (int v = 0; v < tc.next_dim; ++v) {
        row[static_cast<size_t>(v)] =
            static_cast<double>(tc.joint_counts[base + static_cast<size_t>(v)]) /
            static_cast<double>(c);
    }
    return row;
}

bool Estimators::in_known_set(std::span<const int> joint) const {
    for (size_t j = 0; j < transitions_.size(); ++j) {
        if (transition_count(static_cast<int>(j), transition_cell(static_cast<int>(j), joint)) == 0)
            return false;
    }
    return true;
}

void Estimators::dump_counts_csv(std::ostream& out) const {
    out << "scope_id,cell_index,count\n";
    for (size_t i = 0; i < rewards_.size(); ++i) {
        for (size_t c = 0; c < rewards_[i].counts.size(); ++c) {
            out << "R" << i << "," << c << "," << rewards_[i].counts[c] << "\n";
        }
    }
    for (size_t j = 0; j < transitions_.size(); ++j) {
        for (size_t c = 0; c < transitions_[j].counts.size(); ++c) {
            out << "P" << j << "," << c << "," << transitions_[j].counts[c] << "\n";
        }
    }
}

std::uint64_t Estimators::digest() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto eat = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    };
    auto eat_double = [&eat](double d) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(d));
        __builtin_memcpy(&bits, &d, sizeof(bits));
        eat(bits);
    };
    for (const auto& rc : rewards_) {
        for (auto c : rc.counts) eat(static_cast<std::uint64_t>(c));
        for (auto s : rc.sum_r) eat_double(s);
        for (auto s : rc.sum_r2) eat_double(s);
    }
    for (const auto& tc : transitions_) {
        for (auto c : tc.counts) eat(static_cast<std::uint64_t>(c));
        for (auto c : tc.joint_counts) eat(static_cast<std::uint64_t>(c));
    }
    return h;
}

}  // namespace fmdp
