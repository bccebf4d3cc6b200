#include "fmdp/planner.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace fmdp {

PrefixBackup::PrefixBackup(std::span<const std::span<const double>> rows,
                           std::span<const double> value) {
    const size_t n = rows.size();
    size_t expected = 1;
    for (const auto& row : rows) expected *= row.size();
    if (value.size() != expected) {
        throw std::invalid_argument("value vector length does not match product of row sizes");
    }

    partial.resize(n + 1);
    partial[n].assign(value.begin(), value.end());
    for (size_t i = n; i-- > 0;) {
        const auto& row = rows[i];
        const auto& child = partial[i + 1];
        std::vector<double> level(child.size() / row.size());
        for (size_t p = 0; p < level.size(); ++p) {
            double acc = 0.0;
            const size_t base = p * row.size();
            for (size_t v = 0; v < row.size(); ++v) acc += row[v] * child[base + v];
            level[p] = acc;
        }
        partial[i] = std::move(level);
    }

    prefix_prob.resize(n + 1);
    prefix_prob[0] = {1.0};
    for (size_t i = 0; i < n; ++i) {
        const auto& row = rows[i];
        const auto& parent = prefix_prob[i];
        std::vector<double> level(parent.size() * row.size());
        for (size_t p = 0; p < parent.size(); ++p) {
            for (size_t v = 0; v < row.size(); ++v) level[p * row.size() + v] = parent[p] * row[v];
        }
        prefix_prob[i + 1] = std::move(level);
    }
}

double factored_backup(std::span<const std::span<const double>> rows,
                       std::span<const double> value) {
    return PrefixBackup(rows, value).backup();
}

std::vector<double> nested_variance(std::span<const std::span<const double>> rows,
                                    std::span<const double> value) {
    const PrefixBackup pb(rows, value);
    const size_t n = rows.size();
    std::vector<double> out(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        const auto& row = rows[i];
        const auto& child = pb.partial[i + 1];  // over prefixes of length i+1
        const auto& probs = pb.prefix_prob[i];
        double acc = 0.0;
        for (size_t p = 0; p < probs.size(); ++p) {
            double mean = 0.0, mean2 = 0.0;
            const size_t base = p * row.size();
            for (size_t v = 0; v < row.size(); ++v) {
                const double w = child[base + v];
                mean += row[v] * w;
                mean2 += row[v] * w * w;
            }
            acc += probs[p] * (mean2 - mean * mean);
        }
        out[i] = std::max(acc, 0.0);
    }
    return out;
}

std::vector<double> expected_squared_gap(std::span<const std::span<const double>> rows,
                                         std::span<const double> upper,
                                         std::span<const double> lower) {
    if (upper.size() != lower.size()) {
        throw std::invalid_argument("upper and lower value vectors differ in length");
    }
    std::vector<double> gap(upper.size());
    for (size_t s = 0; s < gap.size(); ++s) {
        gap[s] = upper[s] - lower[s];
        if (gap[s] < -1e-12) {
            throw std::invalid_argument("upper value below lower value at state " +
                                        std::to_string(s));
        }
    }
    const PrefixBackup pb(rows, gap);
    const size_t n = rows.size();
    std::vector<double> out(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        const auto& level = pb.partial[i + 1];
        const auto& probs = pb.prefix_prob[i + 1];
        double acc = 0.0;
        for (size_t p = 0; p < level.size(); ++p) acc += probs[p] * level[p] * level[p];
        out[i] = acc;
    }
    return out;
}

namespace {

// Per-cell view of the empirical model used by both sweeps.
struct CellModel {
    bool known = false;
    double reward_mean = 0.0;
    std::vector<std::int64_t> n_visits;           // per transition factor
    std::vector<std::vector<double>> rows;        // empirical rows, per factor
    std::vector<std::span<const double>> row_views;
};

struct SweepContext {
    FlatIndex num_states = 0;
    FlatIndex num_actions = 0;
    int horizon = 0;
    std::vector<int> next_dims;
    std::vector<CellModel> cells;  // indexed s * A + a
};

SweepContext build_context(const FmdpSpec& spec, const Estimators& est,
                           const std::vector<bool>& known) {
    SweepContext ctx;
    ctx.num_states = spec.dims.state_count();
    ctx.num_actions = spec.dims.action_count();
    ctx.horizon = spec.horizon;
    ctx.next_dims = spec.dims.state_dims;
    if (static_cast<FlatIndex>(known.size()) != ctx.num_states * ctx.num_actions) {
        throw std::invalid_argument("known-cell mask does not cover the state-action space");
    }

    const int m = est.num_reward_factors();
    const int n = est.num_transition_factors();
    ctx.cells.resize(static_cast<size_t>(ctx.num_states * ctx.num_actions));
    for (FlatIndex s = 0; s < ctx.num_states; ++s) {
        const auto sv = decode_index(s, spec.dims.state_dims);
        for (FlatIndex a = 0; a < ctx.num_actions; ++a) {
            const auto av = decode_index(a, spec.dims.action_dims);
            FactorVec joint = sv;
            joint.insert(joint.end(), av.begin(), av.end());

            auto& cell = ctx.cells[static_cast<size_t>(s * ctx.num_actions + a)];
            cell.known = known[static_cast<size_t>(s * ctx.num_actions + a)];
            if (!cell.known) continue;

            double mean = 0.0;
            for (int i = 0; i < m; ++i) {
                mean += est.reward_mean(i, est.reward_cell(i, joint));
            }
            cell.reward_mean = mean / m;

            cell.n_visits.resize(static_cast<size_t>(n));
            cell.rows.resize(static_cast<size_t>(n));
            for (int j = 0; j < n; ++j) {
                const auto c = est.transition_cell(j, joint);
                cell.n_visits[static_cast<size_t>(j)] = est.transition_count(j, c);
                cell.rows[static_cast<size_t>(j)] = est.transition_row(j, c);
            }
            cell.row_views.reserve(static_cast<size_t>(n));
            for (const auto& row : cell.rows) cell.row_views.emplace_back(row);
        }
    }
    return ctx;
}

// (1/m) sum over reward factors; unvisited cells already carry the optimistic
// mean 1 and contribute no bonus.
double reward_bonus_at(const FmdpSpec& spec, const Estimators& est, const LogFactors& lf,
                       const FactorVec& joint, bool bernstein) {
    const int m = est.num_reward_factors();
    double bonus = 0.0;
    for (int i = 0; i < m; ++i) {
        const auto c = est.reward_cell(i, joint);
        const auto n = est.reward_count(i, c);
        if (n == 0) continue;
        bonus += bernstein
                     ? reward_bonus_bernstein(est.reward_variance(i, c), lf.reward[static_cast<size_t>(i)], n)
                     : reward_bonus_hoeffding(lf.reward[static_cast<size_t>(i)], n);
    }
    (void)spec;
    return bonus / m;
}

ValueTables make_tables(const SweepContext& ctx) {
    ValueTables vt;
    vt.v_upper.assign(static_cast<size_t>(ctx.horizon) + 1,
                      std::vector<double>(static_cast<size_t>(ctx.num_states), 0.0));
    vt.v_lower = vt.v_upper;
    vt.q_upper.assign(static_cast<size_t>(ctx.horizon),
                      std::vector<double>(static_cast<size_t>(ctx.num_states * ctx.num_actions), 0.0));
    vt.policy.actions.assign(static_cast<size_t>(ctx.horizon),
                             std::vector<int>(static_cast<size_t>(ctx.num_states), 0));
    return vt;
}

void check_sweep_invariants(const ValueTables& vt, int horizon) {
#ifndef NDEBUG
    for (int h = 0; h <= horizon; ++h) {
        for (size_t s = 0; s < vt.v_upper[static_cast<size_t>(h)].size(); ++s) {
            const double up = vt.v_upper[static_cast<size_t>(h)][s];
            const double lo = vt.v_lower[static_cast<size_t>(h)][s];
            assert(lo >= 0.0 && lo <= up + 1e-9 && up <= horizon + 1e-9);
        }
    }
#else
    (void)vt;
    (void)horizon;
#endif
}

}  // namespace

std::vector<bool> known_cells(const FmdpSpec& spec, const Estimators& est) {
    const FlatIndex S = spec.dims.state_count();
    const FlatIndex A = spec.dims.action_count();
    std::vector<bool> known(static_cast<size_t>(S * A), false);
    for (FlatIndex s = 0; s < S; ++s) {
        const auto sv = decode_index(s, spec.dims.state_dims);
        for (FlatIndex a = 0; a < A; ++a) {
            const auto av = decode_index(a, spec.dims.action_dims);
            FactorVec joint = sv;
            joint.insert(joint.end(), av.begin(), av.end());
            known[static_cast<size_t>(s * A + a)] = est.in_known_set(joint);
        }
    }
    return known;
}

ValueTables sweep_hoeffding(const FmdpSpec& spec, const Estimators& est, const LogFactors& lf,
                            const std::vector<bool>& known, double bonus_scale) {
    auto ctx = build_context(spec, est, known);
    auto vt = make_tables(ctx);
    const double H = ctx.horizon;
    const int n = est.num_transition_factors();

    // Bonuses are step-independent here; cache them per cell.
    std::vector<double> cell_bonus(ctx.cells.size(), 0.0);
    for (FlatIndex s = 0; s < ctx.num_states; ++s) {
        const auto sv = decode_index(s, spec.dims.state_dims);
        for (FlatIndex a = 0; a < ctx.num_actions; ++a) {
            const auto x = static_cast<size_t>(s * ctx.num_actions + a);
            const auto& cell = ctx.cells[x];
            if (!cell.known) continue;
            const auto av = decode_index(a, spec.dims.action_dims);
            FactorVec joint = sv;
            joint.insert(joint.end(), av.begin(), av.end());

            double bonus = reward_bonus_at(spec, est, lf, joint, /*bernstein=*/false);
            std::vector<double> phis(static_cast<size_t>(n));
            for (int j = 0; j < n; ++j) {
                phis[static_cast<size_t>(j)] = phi_term(
                    ctx.next_dims[static_cast<size_t>(j)], lf.transition,
                    cell.n_visits[static_cast<size_t>(j)]);
            }
            for (int i = 0; i < n; ++i) {
                bonus += transition_bonus_hoeffding(ctx.horizon, lf.transition,
                                                    cell.n_visits[static_cast<size_t>(i)], phis, i);
            }
            cell_bonus[x] = bonus_scale * bonus;
        }
    }

    for (int h = ctx.horizon - 1; h >= 0; --h) {
        const auto& v_next = vt.v_upper[static_cast<size_t>(h) + 1];
        for (FlatIndex s = 0; s < ctx.num_states; ++s) {
            double best = -1.0;
            int best_a = 0;
            for (FlatIndex a = 0; a < ctx.num_actions; ++a) {
                const auto x = static_cast<size_t>(s * ctx.num_actions + a);
                const auto& cell = ctx.cells[x];
                double q = H;
                if (cell.known) {
                    const double backup = factored_backup(cell.row_views, v_next);
                    q = std::min(H, cell.reward_mean + cell_bonus[x] + backup);
                }
                vt.q_upper[static_cast<size_t>(h)][x] = q;
                if (q > best) {
                    best = q;
                    best_a = static_cast<int>(a);
                }
            }
            vt.v_upper[static_cast<size_t>(h)][static_cast<size_t>(s)] = best;
            vt.policy.actions[static_cast<size_t>(h)][static_cast<size_t>(s)] = best_a;
        }
    }
    check_sweep_invariants(vt, ctx.horizon);
    return vt;
}

ValueTables sweep_bernstein(const FmdpSpec& spec, const Estimators& est, const LogFactors& lf,
                            const std::vector<bool>& known, double bonus_scale) {
    auto ctx = build_context(spec, est, known);
    auto vt = make_tables(ctx);
    const double H = ctx.horizon;
    const int n = est.num_transition_factors();

    // The reward part of the bonus is step-independent.
    std::vector<double> cell_reward_bonus(ctx.cells.size(), 0.0);
    for (FlatIndex s = 0; s < ctx.num_states; ++s) {
        const auto sv = decode_index(s, spec.dims.state_dims);
        for (FlatIndex a = 0; a < ctx.num_actions; ++a) {
            const auto x = static_cast<size_t>(s * ctx.num_actions + a);
            if (!ctx.cells[x].known) continue;
            const auto av = decode_index(a, spec.dims.action_dims);
            FactorVec joint = sv;
            joint.insert(joint.end(), av.begin(), av.end());
            cell_reward_bonus[x] = reward_bonus_at(spec, est, lf, joint, /*bernstein=*/true);
        }
    }

    std::vector<double> bonus_row(ctx.cells.size(), 0.0);
    for (int h = ctx.horizon - 1; h >= 0; --h) {
        const auto& v_next = vt.v_upper[static_cast<size_t>(h) + 1];
        const auto& v_low_next = vt.v_lower[static_cast<size_t>(h) + 1];
        for (FlatIndex s = 0; s < ctx.num_states; ++s) {
            double best = -1.0;
            int best_a = 0;
            for (FlatIndex a = 0; a < ctx.num_actions; ++a) {
                const auto x = static_cast<size_t>(s * ctx.num_actions + a);
                const auto& cell = ctx.cells[x];
                double q = H;
                if (cell.known) {
                    const auto sig2 = nested_variance(cell.row_views, v_next);
                    const auto gap2 = expected_squared_gap(cell.row_views, v_next, v_low_next);
                    double bonus = cell_reward_bonus[x];
                    for (int i = 0; i < n; ++i) {
                        bonus += transition_bonus_bernstein(
                            sig2[static_cast<size_t>(i)], gap2[static_cast<size_t>(i)],
                            ctx.horizon, lf.transition, i, ctx.next_dims, cell.n_visits);
                    }
                    bonus_row[x] = bonus_scale * bonus;
                    const double backup = factored_backup(cell.row_views, v_next);
                    q = std::min(H, cell.reward_mean + bonus_row[x] + backup);
                }
                vt.q_upper[static_cast<size_t>(h)][x] = q;
                if (q > best) {
                    best = q;
                    best_a = static_cast<int>(a);
                }
            }
            vt.v_upper[static_cast<size_t>(h)][static_cast<size_t>(s)] = best;
            vt.policy.actions[static_cast<size_t>(h)][static_cast<size_t>(s)] = best_a;

            const auto x_pi = static_cast<size_t>(s * ctx.num_actions + best_a);
            const auto& chosen = ctx.cells[x_pi];
            double lower = 0.0;
            if (chosen.known) {
                const double backup = factored_backup(chosen.row_views, v_low_next);
                lower = std::max(0.0, chosen.reward_mean - bonus_row[x_pi] + backup);
            }
            vt.v_lower[static_cast<size_t>(h)][static_cast<size_t>(s)] = lower;
        }
    }
    check_sweep_invariants(vt, ctx.horizon);
    return vt;
}

}  // namespace fmdp
