#include "fmdp/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fmdp {

namespace {

FactorVec joint_of(const FmdpSpec& spec, FlatIndex s, FlatIndex a) {
    FactorVec joint = decode_index(s, spec.dims.state_dims);
    const auto av = decode_index(a, spec.dims.action_dims);
    joint.insert(joint.end(), av.begin(), av.end());
    return joint;
}

RowViews row_views_at(const FmdpSpec& spec, const FactorVec& joint) {
    RowViews views;
    views.reserve(spec.transitions.size());
    for (int j = 0; j < spec.num_transition_factors(); ++j) {
        views.emplace_back(spec.transition_row(j, joint));
    }
    return views;
}

}  // namespace

ExactValues exact_optimal_values(const FmdpSpec& spec) {
    require_valid(spec);
    const FlatIndex S = spec.dims.state_count();
    const FlatIndex A = spec.dims.action_count();
    const int H = spec.horizon;

    ExactValues ev;
    ev.v_star.assign(static_cast<size_t>(H) + 1, std::vector<double>(static_cast<size_t>(S), 0.0));
    ev.q_star.assign(static_cast<size_t>(H), std::vector<double>(static_cast<size_t>(S * A), 0.0));
    ev.pi_star.actions.assign(static_cast<size_t>(H), std::vector<int>(static_cast<size_t>(S), 0));

    for (int h = H - 1; h >= 0; --h) {
        const auto& v_next = ev.v_star[static_cast<size_t>(h) + 1];
        for (FlatIndex s = 0; s < S; ++s) {
            double best = -1.0;
            int best_a = 0;
            for (FlatIndex a = 0; a < A; ++a) {
                const auto joint = joint_of(spec, s, a);
                const double q = spec.mean_reward(joint) +
                                 factored_backup(row_views_at(spec, joint), v_next);
                ev.q_star[static_cast<size_t>(h)][static_cast<size_t>(s * A + a)] = q;
                if (q > best) {
                    best = q;
                    best_a = static_cast<int>(a);
                }
            }
            ev.v_star[static_cast<size_t>(h)][static_cast<size_t>(s)] = best;
            ev.pi_star.actions[static_cast<size_t>(h)][static_cast<size_t>(s)] = best_a;
        }
    }
    return ev;
}

std::vector<std::vector<double>> evaluate_policy(const FmdpSpec& spec, const PolicyTable& policy) {
    require_valid(spec);
    const FlatIndex S = spec.dims.state_count();
    const int H = spec.horizon;
    policy.require_total(H, S, spec.dims.action_count());

    std::vector<std::vector<double>> v(static_cast<size_t>(H) + 1,
                                       std::vector<double>(static_cast<size_t>(S), 0.0));
    for (int h = H - 1; h >= 0; --h) {
        for (FlatIndex s = 0; s < S; ++s) {
            const auto joint = joint_of(spec, s, policy.action_at(h, s));
            v[static_cast<size_t>(h)][static_cast<size_t>(s)] =
                spec.mean_reward(joint) +
                factored_backup(row_views_at(spec, joint), v[static_cast<size_t>(h) + 1]);
        }
    }
    return v;
}

ChainVariance chain_variance_recursive(const FmdpSpec& spec, const PolicyTable& policy) {
    const auto v = evaluate_policy(spec, policy);
    const FlatIndex S = spec.dims.state_count();
    const int H = spec.horizon;
    const int n = spec.num_transition_factors();
    const int m = spec.num_reward_factors();
    const auto all = spec.dims.joint_dims();

    ChainVariance cv;
    cv.omega2.assign(static_cast<size_t>(H) + 1, std::vector<double>(static_cast<size_t>(S), 0.0));
    cv.sigma2_p.assign(static_cast<size_t>(H),
                       std::vector<std::vector<double>>(static_cast<size_t>(S)));
    cv.sigma2_r = cv.sigma2_p;

    for (int h = H - 1; h >= 0; --h) {
        for (FlatIndex s = 0; s < S; ++s) {
            const auto joint = joint_of(spec, s, policy.action_at(h, s));
            const auto rows = row_views_at(spec, joint);

            auto& sig_p = cv.sigma2_p[static_cast<size_t>(h)][static_cast<size_t>(s)];
            sig_p = nested_variance(rows, v[static_cast<size_t>(h) + 1]);

            auto& sig_r = cv.sigma2_r[static_cast<size_t>(h)][static_cast<size_t>(s)];
            sig_r.resize(static_cast<size_t>(m));
            for (int i = 0; i < m; ++i) {
                const auto& rf = spec.rewards[static_cast<size_t>(i)];
                const auto cell = encode_index(project_scope(joint, rf.scope), rf.scope.dims_in(all));
                sig_r[static_cast<size_t>(i)] = rf.table[static_cast<size_t>(cell)].variance();
            }

            double w2 = factored_backup(rows, cv.omega2[static_cast<size_t>(h) + 1]);
            for (double x : sig_p) w2 += x;
            for (double x : sig_r) w2 += x / (static_cast<double>(m) * m);
            cv.omega2[static_cast<size_t>(h)][static_cast<size_t>(s)] = w2;
        }
    }
    return cv;
}

namespace {

// Outcome set of one reward component: (value, probability) atoms.
std::vector<std::pair<double, double>> reward_atoms(const RewardDist& d) {
    if (d.kind == RewardDist::Kind::Deterministic) return {{d.value, 1.0}};
    return {{0.0, 1.0 - d.value}, {1.0, d.value}};
}

struct Enumerator {
    const FmdpSpec& spec;
    const PolicyTable& policy;
    std::int64_t atoms_left;
    double m1 = 0.0;
    double m2 = 0.0;

    void walk(int h, FlatIndex s, double reward_so_far, double prob) {
        if (h == spec.horizon) {
            m1 += prob * reward_so_far;
            m2 += prob * reward_so_far * reward_so_far;
            return;
        }
        const auto joint = [&] {
            FactorVec j = decode_index(s, spec.dims.state_dims);
            const auto av = decode_index(policy.action_at(h, s), spec.dims.action_dims);
            j.insert(j.end(), av.begin(), av.end());
            return j;
        }();
        const auto all = spec.dims.joint_dims();
        const int m = spec.num_reward_factors();

        // all combinations of per-component reward outcomes
        std::vector<std::vector<std::pair<double, double>>> outcome_sets;
        outcome_sets.reserve(static_cast<size_t>(m));
        for (const auto& rf : spec.rewards) {
            const auto cell = encode_index(project_scope(joint, rf.scope), rf.scope.dims_in(all));
            outcome_sets.push_back(reward_atoms(rf.table[static_cast<size_t>(cell)]));
        }
        std::vector<size_t> pick(static_cast<size_t>(m), 0);
        while (true) {
            double r_sum = 0.0, r_prob = 1.0;
            for (int i = 0; i < m; ++i) {
                const auto& [val, p] = outcome_sets[static_cast<size_t>(i)][pick[static_cast<size_t>(i)]];
                r_sum += val;
                r_prob *= p;
            }
            const double step_reward = r_sum / m;

            const FlatIndex S = spec.dims.state_count();
            for (FlatIndex t = 0; t < S; ++t) {
                const auto tv = decode_index(t, spec.dims.state_dims);
                double p_next = 1.0;
                for (int j = 0; j < spec.num_transition_factors(); ++j) {
                    p_next *= spec.transition_row(j, joint)[static_cast<size_t>(tv[static_cast<size_t>(j)])];
                }
                if (p_next == 0.0) continue;
                if (--atoms_left < 0) {
                    throw std::length_error("trajectory enumeration exceeds the atom budget");
                }
                walk(h + 1, t, reward_so_far + step_reward, prob * r_prob * p_next);
            }

            // advance the mixed-radix outcome picker
            int i = m - 1;
            while (i >= 0 && ++pick[static_cast<size_t>(i)] == outcome_sets[static_cast<size_t>(i)].size()) {
                pick[static_cast<size_t>(i)] = 0;
                --i;
            }
            if (i < 0) break;
        }
    }
};

}  // namespace

std::vector<std::vector<double>> chain_variance_bruteforce(const FmdpSpec& spec,
                                                           const PolicyTable& policy,
                                                           std::int64_t max_atoms) {
    require_valid(spec);
    const FlatIndex S = spec.dims.state_count();
    const int H = spec.horizon;
    policy.require_total(H, S, spec.dims.action_count());

    // worst-case atom estimate before enumerating anything
    double per_step = static_cast<double>(S);
    for (const auto& rf : spec.rewards) {
        (void)rf;
        per_step *= 2.0;
    }
    double estimate = 0.0;
    double level = static_cast<double>(S);
    for (int h = H; h >= 1; --h) {
        double branch = 1.0;
        for (int t = 0; t < h; ++t) branch *= per_step;
        estimate += level * branch;
    }
    if (estimate > static_cast<double>(max_atoms)) {
        throw std::length_error("trajectory enumeration needs about " +
                                std::to_string(static_cast<std::int64_t>(estimate)) +
                                " atoms, budget is " + std::to_string(max_atoms));
    }

    std::vector<std::vector<double>> omega2(static_cast<size_t>(H) + 1,
                                            std::vector<double>(static_cast<size_t>(S), 0.0));
    for (int h = 0; h < H; ++h) {
        for (FlatIndex s = 0; s < S; ++s) {
            Enumerator e{spec, policy, max_atoms};
            e.walk(h, s, 0.0, 1.0);
            omega2[static_cast<size_t>(h)][static_cast<size_t>(s)] =
                std::max(0.0, e.m2 - e.m1 * e.m1);
        }
    }
    return omega2;
}

TotalVarianceCheck total_variance_bound_check(const FmdpSpec& spec, const PolicyTable& policy,
                                              const FactorVec& initial_state) {
    const auto cv = chain_variance_recursive(spec, policy);
    const FlatIndex S = spec.dims.state_count();
    const int H = spec.horizon;
    const int m = spec.num_reward_factors();
    const FlatIndex s0 = encode_index(initial_state, spec.dims.state_dims);

    // occupancy of states under the policy, by forward propagation
    std::vector<std::vector<double>> w(static_cast<size_t>(H),
                                       std::vector<double>(static_cast<size_t>(S), 0.0));
    w[0][static_cast<size_t>(s0)] = 1.0;
    for (int h = 0; h + 1 < H; ++h) {
        for (FlatIndex s = 0; s < S; ++s) {
            const double ws = w[static_cast<size_t>(h)][static_cast<size_t>(s)];
            if (ws == 0.0) continue;
            const auto joint = joint_of(spec, s, policy.action_at(h, s));
            for (FlatIndex t = 0; t < S; ++t) {
                const auto tv = decode_index(t, spec.dims.state_dims);
                double p = 1.0;
                for (int j = 0; j < spec.num_transition_factors(); ++j) {
                    p *= spec.transition_row(j, joint)[static_cast<size_t>(tv[static_cast<size_t>(j)])];
                }
                w[static_cast<size_t>(h) + 1][static_cast<size_t>(t)] += ws * p;
            }
        }
    }

    TotalVarianceCheck out;
    out.bound = static_cast<double>(H) * H;
    out.omega2_start = cv.omega2[0][static_cast<size_t>(s0)];
    for (int h = 0; h < H; ++h) {
        for (FlatIndex s = 0; s < S; ++s) {
            const double ws = w[static_cast<size_t>(h)][static_cast<size_t>(s)];
            if (ws == 0.0) continue;
            double contrib = 0.0;
            for (double x : cv.sigma2_p[static_cast<size_t>(h)][static_cast<size_t>(s)]) contrib += x;
            for (double x : cv.sigma2_r[static_cast<size_t>(h)][static_cast<size_t>(s)]) {
                contrib += x / (static_cast<double>(m) * m);
            }
            out.lhs += ws * contrib;
        }
    }
    out.ok = out.lhs <= out.bound + 1e-9;
    return out;
}

namespace {

double product_prob(const std::vector<std::vector<double>>& rows, const FactorVec& outcome) {
    double p = 1.0;
    for (size_t j = 0; j < rows.size(); ++j) p *= rows[j][static_cast<size_t>(outcome[j])];
    return p;
}

}  // namespace

DecompositionCheck decomposition_inequality_check(
    const std::vector<std::vector<double>>& rows_hat,
    const std::vector<std::vector<double>>& rows_true, const std::vector<double>& value) {
    if (rows_hat.size() != rows_true.size()) {
        throw std::invalid_argument("row sets must have the same factor count");
    }
    const int n = static_cast<int>(rows_hat.size());
    std::vector<int> dims(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        if (rows_hat[static_cast<size_t>(j)].size() != rows_true[static_cast<size_t>(j)].size()) {
            throw std::invalid_argument("row " + std::to_string(j) + " sizes differ");
        }
        dims[static_cast<size_t>(j)] = static_cast<int>(rows_hat[static_cast<size_t>(j)].size());
    }
    const FlatIndex S = table_size(dims);
    if (static_cast<FlatIndex>(value.size()) != S) {
        throw std::invalid_argument("value vector length does not match joint outcome count");
    }

    std::vector<double> l1(static_cast<size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        for (size_t v = 0; v < rows_hat[static_cast<size_t>(j)].size(); ++v) {
            l1[static_cast<size_t>(j)] +=
                std::abs(rows_hat[static_cast<size_t>(j)][v] - rows_true[static_cast<size_t>(j)][v]);
        }
    }
    double v_inf = 0.0;
    for (double v : value) v_inf = std::max(v_inf, std::abs(v));

    DecompositionCheck out;
    for (double d : l1) out.l1_rhs += d;

    double signed_gap = 0.0;
    std::vector<double> mixed_terms(static_cast<size_t>(n), 0.0);
    for (FlatIndex x = 0; x < S; ++x) {
        const auto outcome = decode_index(x, dims);
        const double p_hat = product_prob(rows_hat, outcome);
        const double p_true = product_prob(rows_true, outcome);
        out.l1_lhs += std::abs(p_hat - p_true);
        signed_gap += (p_hat - p_true) * value[static_cast<size_t>(x)];
        for (int i = 0; i < n; ++i) {
            // (Phat_i - P_i) with every other factor at its true row
            double p = rows_hat[static_cast<size_t>(i)][static_cast<size_t>(outcome[static_cast<size_t>(i)])] -
                       rows_true[static_cast<size_t>(i)][static_cast<size_t>(outcome[static_cast<size_t>(i)])];
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                p *= rows_true[static_cast<size_t>(j)][static_cast<size_t>(outcome[static_cast<size_t>(j)])];
            }
            mixed_terms[static_cast<size_t>(i)] += p * value[static_cast<size_t>(x)];
        }
    }
    out.value_lhs = std::abs(signed_gap);
    for (double t : mixed_terms) out.value_rhs += std::abs(t);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            out.value_rhs += v_inf * l1[static_cast<size_t>(i)] * l1[static_cast<size_t>(j)];
        }
    }
    out.ok = out.l1_lhs <= out.l1_rhs + 1e-12 && out.value_lhs <= out.value_rhs + 1e-12;
    return out;
}

}  // namespace fmdp
