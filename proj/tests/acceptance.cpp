// Acceptance suite: one pass/fail line per criterion, non-zero exit on any
// failure. Heavy learning runs share the worker pool sized by
// FACTORED_RL_THREADS.

#include <chrono>
#include <iomanip>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fmdp/agents.hpp"
#include "fmdp/bonuses.hpp"
#include "fmdp/env.hpp"
#include "fmdp/experiment.hpp"
#include "fmdp/knapsack.hpp"
#include "fmdp/oracle.hpp"
#include "fmdp/planner.hpp"
#include "test_helpers.hpp"

namespace fs = std::filesystem;
using namespace fmdp;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
    std::ostringstream line;
    line << "criterion " << (id < 10 ? "0" : "") << id << " " << (pass ? "[PASS]" : "[FAIL]")
         << " " << name << " (" << detail << ") [" << std::setprecision(1) << std::fixed
         << seconds << "s]";
    std::cout << line.str() << "\n" << std::flush;
    if (!pass) ++g_failures;
}

template <typename Fn>
void criterion(int id, const std::string& name, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        std::tie(pass, detail) = fn();
    } catch (const std::exception& e) {
        pass = false;
        detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(id, name, pass, detail, secs);
}

std::string fmt(double v) { return format_double(v); }

// ---- shared fixtures ------------------------------------------------------

// |S_i| = 2, A = 2, H = 5, per-factor scopes (criteria 7, 8, 13)
FmdpSpec two_factor_bench() {
    FactorDims dims{{2, 2}, {2}};
    const std::vector<Scope> scopes{Scope({0, 2}), Scope({1, 2})};
    return gen_random_fmdp(dims, scopes, scopes, 5, 7);
}

// flat S = 8, A = 2, H = 5 (criterion 9)
FmdpSpec three_factor_bench() {
    FactorDims dims{{2, 2, 2}, {2}};
    const std::vector<Scope> scopes{Scope({0, 3}), Scope({1, 3}), Scope({2, 3})};
    return gen_random_fmdp(dims, scopes, scopes, 5, 2203);
}

FmdpSpec random_chain(std::uint64_t seed) {
    FactorDims dims{{2, 2}, {2}};
    const std::vector<Scope> scopes{Scope({0, 2}), Scope({1, 2})};
    return gen_random_fmdp(dims, scopes, scopes, 3, seed);
}

PolicyTable random_policy(const FmdpSpec& spec, std::uint64_t seed) {
    std::mt19937 gen(static_cast<unsigned>(seed));
    std::uniform_int_distribution<int> pick(0, static_cast<int>(spec.dims.action_count()) - 1);
    PolicyTable pi;
    pi.actions.assign(static_cast<size_t>(spec.horizon),
                      std::vector<int>(static_cast<size_t>(spec.dims.state_count()), 0));
    for (auto& row : pi.actions) {
        for (auto& a : row) a = pick(gen);
    }
    return pi;
}

std::vector<double> cum_regret_column(const std::string& csv_path) {
    std::ifstream in(csv_path);
    std::vector<double> out;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const size_t p1 = line.find(',');
        const size_t p2 = line.find(',', p1 + 1);
        const size_t p3 = line.find(',', p2 + 1);
        out.push_back(std::stod(line.substr(p2 + 1, p3 - p2 - 1)));
    }
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<KnapsackRunRecord> knapsack_batch(const BudgetedMdp& mdp, int seeds,
                                              std::int64_t episodes) {
    std::vector<std::future<KnapsackRunRecord>> futures;
    futures.reserve(static_cast<size_t>(seeds));
    for (int s = 0; s < seeds; ++s) {
        futures.push_back(std::async(std::launch::async, [&mdp, episodes, s] {
            RunConfig cfg;
            cfg.episodes = episodes;
            cfg.delta = 0.1;
            cfg.seed = static_cast<std::uint64_t>(s + 1);
            return run_knapsack_bernstein(mdp, 0, cfg);
        }));
    }
    std::vector<KnapsackRunRecord> records;
    records.reserve(static_cast<size_t>(seeds));
    for (auto& f : futures) records.push_back(f.get());
    return records;
}

std::int64_t g_knapsack_violations = 0;
bool g_knapsack_batches_ran = false;

}  // namespace

int main(int argc, char** argv) {
    std::string data_dir = "data";
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--data-dir") data_dir = argv[i + 1];
    }
    const auto tmp = fs::temp_directory_path() / "fmdp_acceptance";
    fs::remove_all(tmp);
    fs::create_directories(tmp);

    criterion(1, "return-variance Bellman identity", []() -> std::pair<bool, std::string> {
        double max_err = 0.0;
        const int chains = 20;
        for (int t = 0; t < chains; ++t) {
            const auto spec = random_chain(9000 + static_cast<std::uint64_t>(t));
            const auto pi = random_policy(spec, 100 + static_cast<std::uint64_t>(t));
            const auto recursive = chain_variance_recursive(spec, pi);
            const auto brute = chain_variance_bruteforce(spec, pi);
            for (size_t h = 0; h < brute.size(); ++h) {
                for (size_t s = 0; s < brute[h].size(); ++s) {
                    max_err = std::max(max_err, std::abs(brute[h][s] - recursive.omega2[h][s]));
                }
            }
        }
        return {max_err <= 1e-9, std::to_string(chains) + " chains, max err " + fmt(max_err)};
    });

    criterion(2, "per-step variance additivity", []() -> std::pair<bool, std::string> {
        const std::vector<std::vector<double>> wr{{0.5, 0.5}, {0.5, 0.5}};
        const std::vector<double> wv{0, 1, 2, 3};
        RowViews wviews(wr.begin(), wr.end());
        const auto wsig = nested_variance(wviews, wv);
        double max_err = std::max(std::abs(wsig[0] - 1.0), std::abs(wsig[1] - 0.25));
        max_err = std::max(max_err, std::abs(wsig[0] + wsig[1] - 1.25));

        std::mt19937 gen(42);
        std::uniform_int_distribution<int> n_dist(1, 3), dim_dist(2, 4);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const int pairs = 1000;
        for (int t = 0; t < pairs; ++t) {
            const int n = n_dist(gen);
            std::vector<std::vector<double>> rows;
            FlatIndex total = 1;
            for (int j = 0; j < n; ++j) {
                const int d = dim_dist(gen);
                total *= d;
                std::vector<double> row(static_cast<size_t>(d));
                double sum = 0.0;
                for (auto& p : row) sum += (p = u(gen) + 1e-3);
                for (auto& p : row) p /= sum;
                rows.push_back(std::move(row));
            }
            std::vector<double> value(static_cast<size_t>(total));
            for (auto& v : value) v = 5.0 * u(gen);
            RowViews views(rows.begin(), rows.end());
            const auto sig = nested_variance(views, value);
            double sum_sig = 0.0;
            for (double x : sig) sum_sig += x;
            std::vector<double> sq(value.size());
            for (size_t i = 0; i < value.size(); ++i) sq[i] = value[i] * value[i];
            const double mean = factored_backup(views, value);
            const double var = factored_backup(views, sq) - mean * mean;
            max_err = std::max(max_err, std::abs(sum_sig - var));
        }
        return {max_err <= 1e-12,
                std::to_string(pairs) + " pairs + worked case, max err " + fmt(max_err)};
    });

    criterion(3, "occupancy-weighted total variance bound", []() -> std::pair<bool, std::string> {
        double max_identity_err = 0.0;
        bool bound_ok = true;
        const int trials = 100;
        for (int t = 0; t < trials; ++t) {
            const auto spec = random_chain(31000 + static_cast<std::uint64_t>(t));
            const auto pi = random_policy(spec, 500 + static_cast<std::uint64_t>(t));
            const auto check = total_variance_bound_check(spec, pi, {0, 0});
            bound_ok = bound_ok && check.ok;
            max_identity_err =
                std::max(max_identity_err, std::abs(check.lhs - check.omega2_start));
        }
        return {bound_ok && max_identity_err <= 1e-9,
                std::to_string(trials) + " pairs, identity err " + fmt(max_identity_err)};
    });

    criterion(4, "estimation-error decomposition lemma", []() -> std::pair<bool, std::string> {
        std::mt19937 gen(7);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        auto simplex = [&](int size) {
            std::vector<double> row(static_cast<size_t>(size));
            double sum = 0.0;
            for (auto& p : row) sum += (p = -std::log1p(-u(gen) * 0.999999));
            for (auto& p : row) p /= sum;
            return row;
        };
        double min_slack = 1e300;
        const int trials = 1000;
        for (int t = 0; t < trials; ++t) {
            std::vector<std::vector<double>> rows_hat, rows_true;
            for (int j = 0; j < 3; ++j) {
                rows_hat.push_back(simplex(3));
                rows_true.push_back(simplex(3));
            }
            std::vector<double> value(27);
            for (auto& v : value) v = 6.0 * u(gen) - 1.0;
            const auto c = decomposition_inequality_check(rows_hat, rows_true, value);
            min_slack = std::min(min_slack, c.l1_rhs - c.l1_lhs);
            min_slack = std::min(min_slack, c.value_rhs - c.value_lhs);
        }
        return {min_slack >= -1e-12,
                std::to_string(trials) + " triples, min slack " + fmt(min_slack)};
    });

    criterion(5, "zero-bonus planning equals the oracle", []() -> std::pair<bool, std::string> {
        std::mt19937 gen(2718);
        double max_err = 0.0;
        const int specs = 20;
        for (int t = 0; t < specs; ++t) {
            const auto spec = fmdp::testing::grid_spec({2, 2}, 2, 4, 16, gen);
            Estimators est(spec);
            fmdp::testing::feed_exact(est, spec, 16);
            const auto lf = LogFactors::for_spec(spec, 100, 0.1);
            const auto known = known_cells(spec, est);
            const auto exact = exact_optimal_values(spec);
            for (bool bernstein : {false, true}) {
                const auto tables = bernstein ? sweep_bernstein(spec, est, lf, known, 0.0)
                                              : sweep_hoeffding(spec, est, lf, known, 0.0);
                for (int h = 0; h <= spec.horizon; ++h) {
                    for (size_t s = 0; s < tables.v_upper[static_cast<size_t>(h)].size(); ++s) {
                        max_err = std::max(
                            max_err, std::abs(tables.v_upper[static_cast<size_t>(h)][s] -
                                              exact.v_star[static_cast<size_t>(h)][s]));
                    }
                }
            }
        }
        return {max_err <= 1e-10, std::to_string(specs) + " specs, max err " + fmt(max_err)};
    });

    criterion(6, "flat reduction of the Hoeffding learner", []() -> std::pair<bool, std::string> {
        // bonus equality: with one reward and one transition factor the
        // factored bonus equals the flat two-term form
        double max_bonus_err = 0.0;
        const double lr = log_factor_reward(1, 1500, 8, 0.1);
        const double lp = log_factor_transition(1, 1500, 4, 2, 0.1);
        for (std::int64_t n = 1; n <= 512; n *= 2) {
            const std::vector<double> phis{phi_term(4, lp, n)};
            const double factored =
                reward_bonus_hoeffding(lr, n) + transition_bonus_hoeffding(5, lp, n, phis, 0);
            const double flat = std::sqrt(2.0 * lr / static_cast<double>(n)) +
                                std::sqrt(2.0 * 25.0 * lp / static_cast<double>(n));
            max_bonus_err = std::max(max_bonus_err, std::abs(factored - flat));
        }

        // run-level: identical action sequences on an already-flat spec
        FmdpSpec flat_spec;
        flat_spec.dims.state_dims = {4};
        flat_spec.dims.action_dims = {2};
        flat_spec.horizon = 5;
        {
            FactorDims dims{{4}, {2}};
            const std::vector<Scope> scopes{Scope({0, 1})};
            flat_spec = gen_random_fmdp(dims, scopes, scopes, 5, 4242);
        }
        RunConfig cfg;
        cfg.episodes = 300;
        cfg.seed = 77;
        cfg.record_actions = true;
        const auto a = run_fmdp_ch(flat_spec, cfg);
        const auto b = run_flat_ucbvi_ch(flat_spec, cfg);
        bool identical = a.action_log.size() == b.action_log.size();
        for (size_t k = 0; identical && k < a.action_log.size(); ++k) {
            identical = a.action_log[k] == b.action_log[k];
        }
        return {max_bonus_err <= 1e-12 && identical,
                "bonus err " + fmt(max_bonus_err) + ", 300 episodes action-identical: " +
                    (identical ? "yes" : "no")};
    });

    const auto spec2 = two_factor_bench();

    criterion(7, "empirical optimism of the Bernstein learner",
              [&]() -> std::pair<bool, std::string> {
        ExperimentConfig cfg;
        cfg.spec = spec2;
        cfg.algorithms = {Algorithm::Bernstein};
        cfg.episodes = 2000;
        cfg.delta = 0.1;
        cfg.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
        const auto dir = fs::temp_directory_path() / "fmdp_acceptance" / "optimism";
        run_experiment(cfg, dir.string());
        std::int64_t optimistic = 0, total = 0;
        for (auto seed : cfg.seeds) {
            std::ifstream in((dir / ("bf_seed" + std::to_string(seed) + ".csv")).string());
            std::string line;
            std::getline(in, line);
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                ++total;
                if (line.back() == '1') ++optimistic;
            }
        }
        const double fraction = static_cast<double>(optimistic) / static_cast<double>(total);
        return {fraction >= 0.95,
                "optimistic fraction " + fmt(fraction) + " over " + std::to_string(total) +
                    " episodes"};
    });

    // criterion 8's experiment doubles as criterion 13's determinism probe
    ExperimentConfig growth_cfg;
    growth_cfg.spec = spec2;
    growth_cfg.algorithms = {Algorithm::Bernstein};
    growth_cfg.episodes = 4000;
    growth_cfg.delta = 0.1;
    growth_cfg.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const auto growth_dir_a = (fs::temp_directory_path() / "fmdp_acceptance" / "growth_a").string();
    const auto growth_dir_b = (fs::temp_directory_path() / "fmdp_acceptance" / "growth_b").string();
    std::vector<std::string> growth_files_a, growth_files_b;

    criterion(8, "sublinear cumulative regret growth", [&]() -> std::pair<bool, std::string> {
        growth_files_a = run_experiment(growth_cfg, growth_dir_a);
        double cum_1000 = 0.0, cum_4000 = 0.0;
        for (auto seed : growth_cfg.seeds) {
            const auto cum = cum_regret_column(
                (fs::path(growth_dir_a) / ("bf_seed" + std::to_string(seed) + ".csv")).string());
            cum_1000 += cum[999];
            cum_4000 += cum[3999];
        }
        cum_1000 /= static_cast<double>(growth_cfg.seeds.size());
        cum_4000 /= static_cast<double>(growth_cfg.seeds.size());
        const double ratio = cum_4000 / cum_1000;
        return {ratio < 2.4, "CumReg(4000)/CumReg(1000) = " + fmt(cum_4000) + "/" + fmt(cum_1000) +
                                 " = " + fmt(ratio) + " (< 2.4)"};
    });

    criterion(9, "factored learner beats the flat baseline",
              [&]() -> std::pair<bool, std::string> {
        ExperimentConfig cfg;
        cfg.spec = three_factor_bench();
        cfg.algorithms = {Algorithm::Bernstein, Algorithm::FlatHoeffding};
        cfg.episodes = 4000;
        cfg.delta = 0.1;
        cfg.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
        const auto dir = fs::temp_directory_path() / "fmdp_acceptance" / "advantage";
        run_experiment(cfg, dir.string());
        double mean_bf = 0.0, mean_flat = 0.0;
        for (auto seed : cfg.seeds) {
            mean_bf += cum_regret_column(
                           (dir / ("bf_seed" + std::to_string(seed) + ".csv")).string())
                           .back();
            mean_flat += cum_regret_column(
                             (dir / ("flat-ch_seed" + std::to_string(seed) + ".csv")).string())
                             .back();
        }
        mean_bf /= static_cast<double>(cfg.seeds.size());
        mean_flat /= static_cast<double>(cfg.seeds.size());
        return {mean_bf < mean_flat,
                "mean CumReg factored " + fmt(mean_bf) + " vs flat " + fmt(mean_flat)};
    });

    criterion(10, "budgeted instance 1: exact values and learned action",
              [&]() -> std::pair<bool, std::string> {
        auto mdp = fig1_instance1();
        const auto fixture = fs::path(data_dir) / "fig1_instance1.json";
        if (fs::exists(fixture)) {
            const auto loaded = load_budgeted_file(fixture.string());
            if (!(loaded == mdp)) return {false, "fixture differs from builder"};
            mdp = loaded;
        }
        const auto values = budgeted_optimal_values(mdp);
        const auto idx = static_cast<size_t>(mdp.augmented_index(0, std::vector<int>{1}));
        const double v_safe = values.v_star[0][idx];
        const double q_risky = values.q_star[0][idx * 2 + 1];
        if (v_safe != 0.5 || q_risky != 0.4) {
            return {false, "exact DP: safe " + fmt(v_safe) + " risky " + fmt(q_risky)};
        }
        const auto records = knapsack_batch(mdp, 10, 5000);
        g_knapsack_batches_ran = true;
        int correct = 0;
        for (const auto& r : records) {
            g_knapsack_violations += r.constraint_violations;
            if (r.final_policy.actions[0][idx] == 0) ++correct;
        }
        return {correct >= 9, "exact DP 0.5/0.4, learned safe action in " +
                                  std::to_string(correct) + "/10 seeds"};
    });

    criterion(11, "budgeted instance 2: budget-dependent optimal actions",
              [&]() -> std::pair<bool, std::string> {
        auto mdp = fig1_instance2();
        const auto fixture = fs::path(data_dir) / "fig1_instance2.json";
        if (fs::exists(fixture)) {
            const auto loaded = load_budgeted_file(fixture.string());
            if (!(loaded == mdp)) return {false, "fixture differs from builder"};
            mdp = loaded;
        }
        const auto values = budgeted_optimal_values(mdp);
        const auto at_half = static_cast<size_t>(mdp.augmented_index(1, std::vector<int>{1}));
        const auto at_zero = static_cast<size_t>(mdp.augmented_index(1, std::vector<int>{0}));
        if (values.pi_star.actions[1][at_half] != 1 || values.pi_star.actions[1][at_zero] != 0) {
            return {false, "exact DP picked the wrong budget-dependent actions"};
        }
        const auto records = knapsack_batch(mdp, 10, 5000);
        int correct = 0;
        for (const auto& r : records) {
            g_knapsack_violations += r.constraint_violations;
            if (r.final_policy.actions[1][at_half] == 1 &&
                r.final_policy.actions[1][at_zero] == 0) {
                ++correct;
            }
        }
        return {correct >= 9,
                "exact DP budget-dependent, learner matched in " + std::to_string(correct) +
                    "/10 seeds"};
    });

    criterion(12, "hard budget constraint never violated",
              [&]() -> std::pair<bool, std::string> {
        if (!g_knapsack_batches_ran) return {false, "budgeted runs did not execute"};
        return {g_knapsack_violations == 0,
                std::to_string(g_knapsack_violations) + " violations across all budgeted runs"};
    });

    criterion(13, "experiment reruns are byte-identical",
              [&]() -> std::pair<bool, std::string> {
        if (growth_files_a.empty()) growth_files_a = run_experiment(growth_cfg, growth_dir_a);
        growth_files_b = run_experiment(growth_cfg, growth_dir_b);
        if (growth_files_a.size() != growth_files_b.size()) return {false, "file count differs"};
        for (size_t i = 0; i < growth_files_a.size(); ++i) {
            if (slurp(growth_files_a[i]) != slurp(growth_files_b[i])) {
                return {false, "byte mismatch in " + growth_files_b[i]};
            }
        }
        return {true, std::to_string(growth_files_a.size()) + " files byte-identical"};
    });

    fs::remove_all(tmp);
    if (g_failures == 0) {
        std::cout << "all 13 criteria passed\n";
        return 0;
    }
    std::cout << g_failures << " criteria failed\n";
    return 1;
}
