#include "fmdp/knapsack.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fmdp/bonuses.hpp"
#include "fmdp/planner.hpp"
#include "fmdp/rng.hpp"

namespace fmdp {

namespace {

constexpr double kGridTol = 1e-9;
constexpr double kProbTol = 1e-12;

int to_units(double value, int q, const std::string& what) {
    const double scaled = value * q;
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > kGridTol || value < 0.0) {
        throw std::invalid_argument(what + " " + std::to_string(value) +
                                    " is not a non-negative multiple of 1/" + std::to_string(q));
    }
    return static_cast<int>(rounded);
}

enum Draw : std::uint64_t { kRewardDraw = 11, kCostDraw = 12, kNextDraw = 13 };

}  // namespace

int BudgetGrid::budget_units(int i) const {
    return to_units(budgets[static_cast<size_t>(i)], unit_denominator, "budget");
}

int BudgetedMdp::cost_levels(int i) const {
    int max_units = 0;
    for (const auto& dist : costs[static_cast<size_t>(i)]) {
        for (const auto& atom : dist.support) {
            max_units = std::max(max_units, to_units(atom.value, grid.unit_denominator, "cost"));
        }
    }
    return max_units + 1;
}

FlatIndex BudgetedMdp::augmented_size() const {
    FlatIndex size = num_states;
    for (int i = 0; i < num_constraints(); ++i) size *= budget_factor_size(i);
    return size;
}

FlatIndex BudgetedMdp::augmented_index(int s, std::span<const int> remaining_units) const {
    FlatIndex idx = s;
    for (int i = 0; i < num_constraints(); ++i) {
        const int level = std::max(remaining_units[static_cast<size_t>(i)], -1) + 1;
        idx = idx * budget_factor_size(i) + level;
    }
    return idx;
}

std::vector<int> BudgetedMdp::full_budget_units() const {
    std::vector<int> units(static_cast<size_t>(num_constraints()));
    for (int i = 0; i < num_constraints(); ++i) units[static_cast<size_t>(i)] = grid.budget_units(i);
    return units;
}

BudgetedMdp build_augmented(int num_states, int num_actions, int horizon,
                            std::vector<RewardDist> rewards,
                            std::vector<std::vector<double>> transition, BudgetGrid grid,
                            std::vector<std::vector<CostDist>> costs) {
    if (num_states < 1 || num_actions < 1 || horizon < 1) {
        throw std::invalid_argument("budgeted MDP needs positive states, actions and horizon");
    }
    if (grid.unit_denominator < 1) throw std::invalid_argument("unit denominator must be >= 1");
    const int d = grid.num_constraints();
    if (d > 2) {
        throw std::invalid_argument("at most 2 budget constraints are supported (augmented "
                                    "planning scales exponentially in the constraint count)");
    }
    const size_t cells = static_cast<size_t>(num_states) * static_cast<size_t>(num_actions);
    if (rewards.size() != cells) throw std::invalid_argument("need one reward per (s,a)");
    if (transition.size() != cells) throw std::invalid_argument("need one transition row per (s,a)");
    if (costs.size() != static_cast<size_t>(d)) {
        throw std::invalid_argument("need one cost table per constraint");
    }

    for (const auto& r : rewards) {
        if (!(r.mean() >= 0.0 && r.mean() <= 1.0)) {
            throw std::invalid_argument("reward mean outside [0,1]");
        }
    }
    for (const auto& row : transition) {
        if (row.size() != static_cast<size_t>(num_states)) {
            throw std::invalid_argument("transition row has wrong length");
        }
        double sum = 0.0;
        for (double p : row) {
            if (p < 0.0) throw std::invalid_argument("negative transition probability");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kProbTol) {
            throw std::invalid_argument("transition row sum " + std::to_string(sum) + " != 1");
        }
    }
    for (int i = 0; i < d; ++i) {
        const int bq = to_units(grid.budgets[static_cast<size_t>(i)], grid.unit_denominator,
                                "budget");
        if (bq > 64) {
            throw std::invalid_argument("budget grid of constraint " + std::to_string(i) +
                                        " has " + std::to_string(bq) + " units, limit is 64");
        }
        if (costs[static_cast<size_t>(i)].size() != cells) {
            throw std::invalid_argument("cost table " + std::to_string(i) +
                                        " needs one distribution per (s,a)");
        }
        for (const auto& dist : costs[static_cast<size_t>(i)]) {
            if (dist.support.empty()) throw std::invalid_argument("empty cost support");
            double sum = 0.0;
            for (const auto& atom : dist.support) {
                to_units(atom.value, grid.unit_denominator, "cost");
                if (atom.prob < 0.0) throw std::invalid_argument("negative cost probability");
                sum += atom.prob;
            }
            if (std::abs(sum - 1.0) > kProbTol) {
                throw std::invalid_argument("cost support mass " + std::to_string(sum) + " != 1");
            }
        }
    }

    BudgetedMdp mdp;
    mdp.num_states = num_states;
    mdp.num_actions = num_actions;
    mdp.horizon = horizon;
    mdp.rewards = std::move(rewards);
    mdp.transition = std::move(transition);
    mdp.grid = std::move(grid);
    mdp.costs = std::move(costs);
    return mdp;
}

BudgetStep knapsack_step_semantics(std::span<const int> remaining_units,
                                   std::span<const int> cost_units, double sampled_reward) {
    if (remaining_units.size() != cost_units.size()) {
        throw std::invalid_argument("cost vector does not match the constraint count");
    }
    BudgetStep out;
    out.collected_reward = sampled_reward;  // the step began inside the budget
    out.next_remaining_units.resize(remaining_units.size());
    for (size_t i = 0; i < remaining_units.size(); ++i) {
        const int next = remaining_units[i] - cost_units[i];
        out.next_remaining_units[i] = std::max(next, -1);
        if (next < 0) out.terminated = true;
    }
    return out;
}

namespace {

// Per-(s,a) cost support in grid units.
struct UnitCostDist {
    std::vector<int> units;
    std::vector<double> probs;
};

std::vector<std::vector<UnitCostDist>> unit_costs(const BudgetedMdp& mdp) {
    const int d = mdp.num_constraints();
    std::vector<std::vector<UnitCostDist>> out(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) {
        out[static_cast<size_t>(i)].resize(mdp.costs[static_cast<size_t>(i)].size());
        for (size_t x = 0; x < mdp.costs[static_cast<size_t>(i)].size(); ++x) {
            for (const auto& atom : mdp.costs[static_cast<size_t>(i)][x].support) {
                out[static_cast<size_t>(i)][x].units.push_back(
                    to_units(atom.value, mdp.grid.unit_denominator, "cost"));
                out[static_cast<size_t>(i)][x].probs.push_back(atom.prob);
            }
        }
    }
    return out;
}

// Enumerates the remaining-budget combinations with every coordinate >= 0.
std::vector<std::vector<int>> live_budget_combos(const BudgetedMdp& mdp) {
    std::vector<std::vector<int>> combos{{}};
    for (int i = 0; i < mdp.num_constraints(); ++i) {
        std::vector<std::vector<int>> next;
        for (const auto& prefix : combos) {
            for (int u = 0; u <= mdp.grid.budget_units(i); ++u) {
                auto c = prefix;
                c.push_back(u);
                next.push_back(std::move(c));
            }
        }
        combos = std::move(next);
    }
    return combos;
}

// Expected next value sum_{s'} sum_c P(s') prod_i P(c_i) V(s', rem - c).
double expected_next_value(const BudgetedMdp& mdp,
                           const std::vector<std::vector<UnitCostDist>>& ucosts, int s, int a,
                           std::span<const int> rem, const std::vector<double>& v_next) {
    const size_t x = static_cast<size_t>(s) * static_cast<size_t>(mdp.num_actions) +
                     static_cast<size_t>(a);
    const int d = mdp.num_constraints();
    // enumerate cost combos once, then sweep next states
    std::vector<std::pair<std::vector<int>, double>> combos{{{}, 1.0}};
    for (int i = 0; i < d; ++i) {
        std::vector<std::pair<std::vector<int>, double>> next;
        const auto& dist = ucosts[static_cast<size_t>(i)][x];
        for (const auto& [units, p] : combos) {
            for (size_t k = 0; k < dist.units.size(); ++k) {
                auto u = units;
                u.push_back(dist.units[k]);
                next.emplace_back(std::move(u), p * dist.probs[k]);
            }
        }
        combos = std::move(next);
    }

    double acc = 0.0;
    for (const auto& [cost, p_cost] : combos) {
        std::vector<int> rem_next(static_cast<size_t>(d));
        bool violated = false;
        for (int i = 0; i < d; ++i) {
            rem_next[static_cast<size_t>(i)] = rem[static_cast<size_t>(i)] - cost[static_cast<size_t>(i)];
            if (rem_next[static_cast<size_t>(i)] < 0) violated = true;
        }
        if (violated) continue;  // violated successor states carry value zero
        for (int t = 0; t < mdp.num_states; ++t) {
            const double p = mdp.transition[x][static_cast<size_t>(t)];
            if (p == 0.0) continue;
            acc += p_cost * p * v_next[static_cast<size_t>(mdp.augmented_index(t, rem_next))];
        }
    }
    return acc;
}

}  // namespace

BudgetedValues budgeted_optimal_values(const BudgetedMdp& mdp) {
    const auto ucosts = unit_costs(mdp);
    const auto combos = live_budget_combos(mdp);
    const auto size = static_cast<size_t>(mdp.augmented_size());
    const int H = mdp.horizon;

    BudgetedValues out;
    out.v_star.assign(static_cast<size_t>(H) + 1, std::vector<double>(size, 0.0));
    out.q_star.assign(static_cast<size_t>(H),
                      std::vector<double>(size * static_cast<size_t>(mdp.num_actions), 0.0));
    out.pi_star.actions.assign(static_cast<size_t>(H), std::vector<int>(size, 0));

    for (int h = H - 1; h >= 0; --h) {
        const auto& v_next = out.v_star[static_cast<size_t>(h) + 1];
        for (int s = 0; s < mdp.num_states; ++s) {
            for (const auto& rem : combos) {
                const auto idx = static_cast<size_t>(mdp.augmented_index(s, rem));
                double best = -1.0;
                int best_a = 0;
                for (int a = 0; a < mdp.num_actions; ++a) {
                    const size_t x = static_cast<size_t>(s) * static_cast<size_t>(mdp.num_actions) +
                                     static_cast<size_t>(a);
                    const double q = mdp.rewards[x].mean() +
                                     expected_next_value(mdp, ucosts, s, a, rem, v_next);
                    out.q_star[static_cast<size_t>(h)][idx * static_cast<size_t>(mdp.num_actions) +
                                                       static_cast<size_t>(a)] = q;
                    if (q > best) {
                        best = q;
                        best_a = a;
                    }
                }
                out.v_star[static_cast<size_t>(h)][idx] = best;
                out.pi_star.actions[static_cast<size_t>(h)][idx] = best_a;
            }
        }
    }
    return out;
}

std::vector<std::vector<double>> evaluate_budgeted_policy(const BudgetedMdp& mdp,
                                                          const PolicyTable& policy) {
    const auto ucosts = unit_costs(mdp);
    const auto combos = live_budget_combos(mdp);
    const auto size = static_cast<size_t>(mdp.augmented_size());
    const int H = mdp.horizon;
    policy.require_total(H, mdp.augmented_size(), mdp.num_actions);

    std::vector<std::vector<double>> v(static_cast<size_t>(H) + 1,
                                       std::vector<double>(size, 0.0));
    for (int h = H - 1; h >= 0; --h) {
        for (int s = 0; s < mdp.num_states; ++s) {
            for (const auto& rem : combos) {
                const auto idx = static_cast<size_t>(mdp.augmented_index(s, rem));
                const int a = policy.actions[static_cast<size_t>(h)][idx];
                const size_t x = static_cast<size_t>(s) * static_cast<size_t>(mdp.num_actions) +
                                 static_cast<size_t>(a);
                v[static_cast<size_t>(h)][idx] =
                    mdp.rewards[x].mean() +
                    expected_next_value(mdp, ucosts, s, a, rem, v[static_cast<size_t>(h) + 1]);
            }
        }
    }
    return v;
}

namespace {

// Empirical model keyed by (s,a) only; the budget transition reuses the
// estimated cost offsets (noisy offset model).
struct KnapsackEstimators {
    std::vector<std::int64_t> n;
    std::vector<double> sum_r, sum_r2;
    std::vector<std::vector<std::int64_t>> next_counts;            // [x][s']
    std::vector<std::vector<std::vector<std::int64_t>>> cost_counts;  // [i][x][level]

    KnapsackEstimators(const BudgetedMdp& mdp) {
        const size_t cells = static_cast<size_t>(mdp.num_states) *
                             static_cast<size_t>(mdp.num_actions);
        n.assign(cells, 0);
        sum_r.assign(cells, 0.0);
        sum_r2.assign(cells, 0.0);
        next_counts.assign(cells, std::vector<std::int64_t>(static_cast<size_t>(mdp.num_states), 0));
        cost_counts.resize(static_cast<size_t>(mdp.num_constraints()));
        for (int i = 0; i < mdp.num_constraints(); ++i) {
            cost_counts[static_cast<size_t>(i)].assign(
                cells, std::vector<std::int64_t>(static_cast<size_t>(mdp.cost_levels(i)), 0));
        }
    }

    void observe(size_t x, double r, std::span<const int> cost_units, int next_state) {
        n[x] += 1;
        sum_r[x] += r;
        sum_r2[x] += r * r;
        next_counts[x][static_cast<size_t>(next_state)] += 1;
        for (size_t i = 0; i < cost_counts.size(); ++i) {
            cost_counts[i][x][static_cast<size_t>(cost_units[i])] += 1;
        }
    }

    std::uint64_t digest() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        auto eat = [&h](std::uint64_t v) {
            for (int b = 0; b < 8; ++b) {
                h ^= (v >> (8 * b)) & 0xff;
                h *= 0x100000001b3ULL;
            }
        };
        for (auto v : n) eat(static_cast<std::uint64_t>(v));
        for (const auto& row : next_counts)
            for (auto v : row) eat(static_cast<std::uint64_t>(v));
        for (const auto& table : cost_counts)
            for (const auto& row : table)
                for (auto v : row) eat(static_cast<std::uint64_t>(v));
        return h;
    }
};

// One sweep over the augmented space. Optimistic mode plans with Bernstein
// bonuses, values unknown cells at H and breaks exact Q ties toward the
// less-visited action (clipped values tie exactly, and the tie order decides
// what gets explored). Exploit mode is plain value iteration on the empirical
// model with unknown cells at 0 and lowest-index ties.
enum class SweepMode { Optimistic, Exploit };

struct KnapsackSweep {
    std::vector<std::vector<double>> v_upper, v_lower;
    PolicyTable policy;
};

KnapsackSweep sweep_knapsack(const BudgetedMdp& mdp, const KnapsackEstimators& est,
                             double log_reward, double log_transition,
                             const std::vector<std::vector<int>>& combos, SweepMode mode) {
    const int H = mdp.horizon;
    const int d = mdp.num_constraints();
    const double Hd = static_cast<double>(H);
    const auto size = static_cast<size_t>(mdp.augmented_size());

    std::vector<int> tensor_dims;
    tensor_dims.push_back(mdp.num_states);
    for (int i = 0; i < d; ++i) tensor_dims.push_back(mdp.cost_levels(i));
    const auto tensor_size = static_cast<size_t>(table_size(tensor_dims));

    KnapsackSweep out;
    out.v_upper.assign(static_cast<size_t>(H) + 1, std::vector<double>(size, 0.0));
    out.v_lower = out.v_upper;
    out.policy.actions.assign(static_cast<size_t>(H), std::vector<int>(size, 0));

    std::vector<double> upper_tensor(tensor_size), lower_tensor(tensor_size);
    std::vector<std::vector<double>> rows(static_cast<size_t>(d) + 1);
    std::vector<std::int64_t> visits(static_cast<size_t>(d) + 1);

    for (int h = H - 1; h >= 0; --h) {
        const auto& vu_next = out.v_upper[static_cast<size_t>(h) + 1];
        const auto& vl_next = out.v_lower[static_cast<size_t>(h) + 1];
        for (int s = 0; s < mdp.num_states; ++s) {
            for (const auto& rem : combos) {
                const auto idx = static_cast<size_t>(mdp.augmented_index(s, rem));
                double best = -1.0;
                int best_a = 0;
                double best_lower = 0.0;
                for (int a = 0; a < mdp.num_actions; ++a) {
                    const size_t x = static_cast<size_t>(s) * static_cast<size_t>(mdp.num_actions) +
                                     static_cast<size_t>(a);
                    double q = mode == SweepMode::Optimistic ? Hd : 0.0;
                    double lower = 0.0;
                    if (est.n[x] > 0) {
                        const double nx = static_cast<double>(est.n[x]);
                        rows[0].assign(static_cast<size_t>(mdp.num_states), 0.0);
                        for (int t = 0; t < mdp.num_states; ++t) {
                            rows[0][static_cast<size_t>(t)] =
                                static_cast<double>(est.next_counts[x][static_cast<size_t>(t)]) / nx;
                        }
                        for (int i = 0; i < d; ++i) {
                            const auto& counts = est.cost_counts[static_cast<size_t>(i)][x];
                            rows[static_cast<size_t>(i) + 1].assign(counts.size(), 0.0);
                            for (size_t l = 0; l < counts.size(); ++l) {
                                rows[static_cast<size_t>(i) + 1][l] =
                                    static_cast<double>(counts[l]) / nx;
                            }
                        }
                        std::fill(visits.begin(), visits.end(), est.n[x]);

                        // value over (next state, cost combo) for the fixed rem
                        for (size_t cell = 0; cell < tensor_size; ++cell) {
                            const auto outcome = decode_index(static_cast<FlatIndex>(cell), tensor_dims);
                            std::vector<int> rem_next(static_cast<size_t>(d));
                            bool violated = false;
                            for (int i = 0; i < d; ++i) {
                                rem_next[static_cast<size_t>(i)] =
                                    rem[static_cast<size_t>(i)] - outcome[static_cast<size_t>(i) + 1];
                                if (rem_next[static_cast<size_t>(i)] < 0) violated = true;
                            }
                            if (violated) {
                                upper_tensor[cell] = 0.0;
                                lower_tensor[cell] = 0.0;
                                continue;
                            }
                            const auto next_idx = static_cast<size_t>(
                                mdp.augmented_index(outcome[0], rem_next));
                            upper_tensor[cell] = vu_next[next_idx];
                            lower_tensor[cell] = vl_next[next_idx];
                        }

                        RowViews views;
                        views.reserve(rows.size());
                        for (const auto& row : rows) views.emplace_back(row);

                        const double mean_r = est.sum_r[x] / nx;
                        const double backup = factored_backup(views, upper_tensor);
                        if (mode == SweepMode::Exploit) {
                            q = mean_r + backup;
                        } else {
                            const auto sig2 = nested_variance(views, upper_tensor);
                            const auto gap2 =
                                expected_squared_gap(views, upper_tensor, lower_tensor);
                            const double var_r =
                                std::clamp(est.sum_r2[x] / nx - mean_r * mean_r, 0.0, 0.25);
                            double bonus = reward_bonus_bernstein(var_r, log_reward, est.n[x]);
                            for (int i = 0; i <= d; ++i) {
                                bonus += transition_bonus_bernstein(
                                    sig2[static_cast<size_t>(i)], gap2[static_cast<size_t>(i)], H,
                                    log_transition, i, tensor_dims, visits);
                            }
                            q = std::min(Hd, mean_r + bonus + backup);
                            lower = std::max(
                                0.0, mean_r - bonus + factored_backup(views, lower_tensor));
                        }
                    }
                    const bool tie_explore =
                        mode == SweepMode::Optimistic && q == best &&
                        est.n[x] < est.n[static_cast<size_t>(s) *
                                             static_cast<size_t>(mdp.num_actions) +
                                         static_cast<size_t>(best_a)];
                    if (q > best || tie_explore) {
                        best = q;
                        best_a = a;
                        best_lower = lower;
                    }
                }
                out.v_upper[static_cast<size_t>(h)][idx] = best;
                out.v_lower[static_cast<size_t>(h)][idx] = best_lower;
                out.policy.actions[static_cast<size_t>(h)][idx] = best_a;
            }
        }
    }
    return out;
}

}  // namespace

KnapsackRunRecord run_knapsack_bernstein(const BudgetedMdp& mdp, int initial_state,
                                         const RunConfig& cfg) {
    if (cfg.episodes < 1) throw std::invalid_argument("episode budget must be >= 1");
    if (initial_state < 0 || initial_state >= mdp.num_states) {
        throw std::invalid_argument("initial state out of range");
    }
    const int H = mdp.horizon;
    const int d = mdp.num_constraints();
    const double T = static_cast<double>(cfg.episodes) * H;
    const double SA = static_cast<double>(mdp.num_states) * mdp.num_actions;
    const double log_reward = std::log(2.0 * SA * T);
    double max_bq = 1.0;
    for (int i = 0; i < d; ++i) max_bq = std::max(max_bq, static_cast<double>(mdp.grid.budget_units(i)));
    const double log_transition =
        std::log(2.0 * std::max(d, 1) * SA * T) + d * std::log(max_bq);

    const auto ucosts = unit_costs(mdp);
    const auto combos = live_budget_combos(mdp);
    const auto exact = budgeted_optimal_values(mdp);
    const auto full = mdp.full_budget_units();
    const auto start_idx = static_cast<size_t>(mdp.augmented_index(initial_state, full));
    const double v_star_start = exact.v_star[0][start_idx];
    const CounterRng rng(cfg.seed);

    KnapsackEstimators est(mdp);
    KnapsackRunRecord record;
    record.episodes.reserve(static_cast<size_t>(cfg.episodes));
    double cum = 0.0;

    for (std::int64_t k = 0; k < cfg.episodes; ++k) {
        const auto sweep =
            sweep_knapsack(mdp, est, log_reward, log_transition, combos, SweepMode::Optimistic);

        // execute the greedy budget-aware policy under the hard constraint
        int s = initial_state;
        auto rem = full;
        double realized = 0.0;
        bool terminated = false;
        struct Observation {
            size_t x;
            double r;
            std::vector<int> cost_units;
            int next_state;
        };
        std::vector<Observation> observations;
        for (int h = 0; h < H && !terminated; ++h) {
            for (int i = 0; i < d; ++i) {
                if (rem[static_cast<size_t>(i)] < 0) record.constraint_violations += 1;
            }
            const auto idx = static_cast<size_t>(mdp.augmented_index(s, rem));
            const int a = sweep.policy.actions[static_cast<size_t>(h)][idx];
            const size_t x = static_cast<size_t>(s) * static_cast<size_t>(mdp.num_actions) +
                             static_cast<size_t>(a);

            const auto& rdist = mdp.rewards[x];
            double r = rdist.value;
            if (rdist.kind == RewardDist::Kind::Bernoulli) {
                r = rng.bernoulli(rdist.value,
                                  {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(h),
                                   kRewardDraw})
                        ? 1.0
                        : 0.0;
            }
            std::vector<int> cost(static_cast<size_t>(d));
            for (int i = 0; i < d; ++i) {
                const auto& dist = ucosts[static_cast<size_t>(i)][x];
                const int pick = rng.categorical(
                    dist.probs, {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(h),
                                 kCostDraw, static_cast<std::uint64_t>(i)});
                cost[static_cast<size_t>(i)] = dist.units[static_cast<size_t>(pick)];
            }
            const int next_state = rng.categorical(
                mdp.transition[x],
                {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(h), kNextDraw});

            const auto step = knapsack_step_semantics(rem, cost, r);
            realized += step.collected_reward;
            observations.push_back({x, r, cost, next_state});
            rem = step.next_remaining_units;
            terminated = step.terminated;
            s = next_state;
        }
        for (const auto& obs : observations) {
            est.observe(obs.x, obs.r, obs.cost_units, obs.next_state);
        }

        const auto v_pi = evaluate_budgeted_policy(mdp, sweep.policy);
        const double regret = v_star_start - v_pi[0][start_idx];
        cum += regret;

        EpisodeRecord ep;
        ep.episode = k + 1;
        ep.policy_hash = sweep.policy.hash();
        ep.realized_return = realized;
        ep.regret = regret;
        ep.cum_regret = cum;
        ep.optimistic = sweep.v_upper[0][start_idx] >= v_star_start - 1e-9 ? 1 : 0;
        record.episodes.push_back(ep);
    }

    record.final_policy =
        sweep_knapsack(mdp, est, log_reward, log_transition, combos, SweepMode::Exploit).policy;
    record.estimator_digest = est.digest();
    return record;
}

BudgetedMdp fig1_instance1() {
    // s0 --a0, cost 0.5--> s1 (reward 0.5) --> s3; s0 --a1, cost {0,1}--> s2
    // (reward 0.8) --> s4; s3, s4 absorbing.
    const int S = 5, A = 2, H = 3;
    std::vector<RewardDist> rewards(static_cast<size_t>(S * A), RewardDist::deterministic(0.0));
    rewards[1 * A + 0] = rewards[1 * A + 1] = RewardDist::deterministic(0.5);
    rewards[2 * A + 0] = rewards[2 * A + 1] = RewardDist::deterministic(0.8);

    auto one_hot = [S](int t) {
        std::vector<double> row(static_cast<size_t>(S), 0.0);
        row[static_cast<size_t>(t)] = 1.0;
        return row;
    };
    std::vector<std::vector<double>> transition(static_cast<size_t>(S * A));
    transition[0 * A + 0] = one_hot(1);
    transition[0 * A + 1] = one_hot(2);
    transition[1 * A + 0] = transition[1 * A + 1] = one_hot(3);
    transition[2 * A + 0] = transition[2 * A + 1] = one_hot(4);
    transition[3 * A + 0] = transition[3 * A + 1] = one_hot(3);
    transition[4 * A + 0] = transition[4 * A + 1] = one_hot(4);

    BudgetGrid grid{2, {0.5}};
    std::vector<std::vector<CostDist>> costs(1);
    costs[0].assign(static_cast<size_t>(S * A), CostDist{{{0.0, 1.0}}});
    costs[0][0 * A + 0] = CostDist{{{0.5, 1.0}}};
    costs[0][0 * A + 1] = CostDist{{{0.0, 0.5}, {1.0, 0.5}}};

    return build_augmented(S, A, H, std::move(rewards), std::move(transition), std::move(grid),
                           std::move(costs));
}

BudgetedMdp fig1_instance2() {
    // s0 --a*, cost {0,1}--> s1; s1 --a0, cost 0--> s2 (reward 0.5); s1 --a1,
    // cost 0.5--> s3 (reward 1); s2, s3 --> s4 absorbing.
    const int S = 5, A = 2, H = 3;
    std::vector<RewardDist> rewards(static_cast<size_t>(S * A), RewardDist::deterministic(0.0));
    rewards[2 * A + 0] = rewards[2 * A + 1] = RewardDist::deterministic(0.5);
    rewards[3 * A + 0] = rewards[3 * A + 1] = RewardDist::deterministic(1.0);

    auto one_hot = [S](int t) {
        std::vector<double> row(static_cast<size_t>(S), 0.0);
        row[static_cast<size_t>(t)] = 1.0;
        return row;
    };
    std::vector<std::vector<double>> transition(static_cast<size_t>(S * A));
    transition[0 * A + 0] = transition[0 * A + 1] = one_hot(1);
    transition[1 * A + 0] = one_hot(2);
    transition[1 * A + 1] = one_hot(3);
    transition[2 * A + 0] = transition[2 * A + 1] = one_hot(4);
    transition[3 * A + 0] = transition[3 * A + 1] = one_hot(4);
    transition[4 * A + 0] = transition[4 * A + 1] = one_hot(4);

    BudgetGrid grid{2, {0.5}};
    std::vector<std::vector<CostDist>> costs(1);
    costs[0].assign(static_cast<size_t>(S * A), CostDist{{{0.0, 1.0}}});
    costs[0][0 * A + 0] = costs[0][0 * A + 1] = CostDist{{{0.0, 0.5}, {1.0, 0.5}}};
    costs[0][1 * A + 1] = CostDist{{{0.5, 1.0}}};

    return build_augmented(S, A, H, std::move(rewards), std::move(transition), std::move(grid),
                           std::move(costs));
}

namespace {

using nlohmann::json;

}  // namespace

std::string budgeted_to_json(const BudgetedMdp& mdp, int indent) {
    json j;
    j["states"] = mdp.num_states;
    j["actions"] = mdp.num_actions;
    j["horizon"] = mdp.horizon;
    j["rewards"] = json::array();
    for (const auto& r : mdp.rewards) {
        j["rewards"].push_back(
            {{"type", r.kind == RewardDist::Kind::Bernoulli ? "bernoulli" : "deterministic"},
             {"value", r.value}});
    }
    j["transitions"] = mdp.transition;
    j["unit_denominator"] = mdp.grid.unit_denominator;
    j["budgets"] = mdp.grid.budgets;
    j["costs"] = json::array();
    for (const auto& table : mdp.costs) {
        json rows = json::array();
        for (const auto& dist : table) {
            json atoms = json::array();
            for (const auto& atom : dist.support) {
                atoms.push_back({{"value", atom.value}, {"prob", atom.prob}});
            }
            rows.push_back(std::move(atoms));
        }
        j["costs"].push_back(std::move(rows));
    }
    return j.dump(indent);
}

BudgetedMdp budgeted_from_json(const std::string& text) {
    json j = json::parse(text);
    std::vector<RewardDist> rewards;
    for (const auto& r : j.at("rewards")) {
        const std::string type = r.at("type").get<std::string>();
        const double value = r.at("value").get<double>();
        rewards.push_back(type == "bernoulli" ? RewardDist::bernoulli(value)
                                              : RewardDist::deterministic(value));
    }
    BudgetGrid grid;
    grid.unit_denominator = j.at("unit_denominator").get<int>();
    grid.budgets = j.at("budgets").get<std::vector<double>>();
    std::vector<std::vector<CostDist>> costs;
    for (const auto& table : j.at("costs")) {
        std::vector<CostDist> rows;
        for (const auto& atoms : table) {
            CostDist dist;
            for (const auto& atom : atoms) {
                dist.support.push_back(
                    {atom.at("value").get<double>(), atom.at("prob").get<double>()});
            }
            rows.push_back(std::move(dist));
        }
        costs.push_back(std::move(rows));
    }
    return build_augmented(j.at("states").get<int>(), j.at("actions").get<int>(),
                           j.at("horizon").get<int>(), std::move(rewards),
                           j.at("transitions").get<std::vector<std::vector<double>>>(),
                           std::move(grid), std::move(costs));
}

BudgetedMdp load_budgeted_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return budgeted_from_json(ss.str());
}

void save_budgeted_file(const BudgetedMdp& mdp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write instance file: " + path);
    out << budgeted_to_json(mdp) << "\n";
}

}  // namespace fmdp
