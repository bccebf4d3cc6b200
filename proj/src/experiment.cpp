#include "fmdp/experiment.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fmdp/env.hpp"
#include "fmdp/oracle.hpp"
#include "fmdp/rng.hpp"

namespace fmdp {

namespace fs = std::filesystem;
using nlohmann::json;

int worker_pool_size() {
    if (const char* env = std::getenv("FACTORED_RL_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace {

void parallel_tasks(size_t count, const std::function<void(size_t)>& fn) {
    const size_t workers =
        std::min<size_t>(count, static_cast<size_t>(worker_pool_size()));
    if (workers <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

FmdpSpec spec_from_generator(const json& j) {
    const std::string name = j.at("generator").get<std::string>();
    const json params = j.value("params", json::object());
    if (name == "production-line") {
        return gen_production_line(params.at("d").get<int>(),
                                   params.at("per_machine_states").get<int>(),
                                   params.at("actions").get<int>(),
                                   params.value("seed", std::uint64_t{0}));
    }
    if (name == "tree-bandit") {
        return gen_tree_bandit_instance(params.at("num_factors").get<int>(),
                                        params.at("states_per_factor").get<int>(),
                                        params.at("actions_per_factor").get<int>(),
                                        params.at("gap").get<double>(),
                                        params.at("horizon").get<int>());
    }
    if (name == "parallel-hard") {
        return gen_parallel_hard_mdps(params.at("num_factors").get<int>(),
                                      params.at("states").get<int>(),
                                      params.at("actions").get<int>(),
                                      params.at("epsilon").get<double>(),
                                      params.at("horizon").get<int>(),
                                      params.value("seed", std::uint64_t{0}));
    }
    if (name == "random") {
        FactorDims dims;
        dims.state_dims = params.at("state_dims").get<std::vector<int>>();
        dims.action_dims = params.at("action_dims").get<std::vector<int>>();
        std::vector<Scope> reward_scopes, transition_scopes;
        for (const auto& s : params.at("reward_scopes")) {
            reward_scopes.emplace_back(s.get<std::vector<int>>());
        }
        for (const auto& s : params.at("transition_scopes")) {
            transition_scopes.emplace_back(s.get<std::vector<int>>());
        }
        return gen_random_fmdp(dims, reward_scopes, transition_scopes,
                               params.at("horizon").get<int>(),
                               params.value("seed", std::uint64_t{0}));
    }
    throw std::invalid_argument("unknown generator: " + name +
                                " (expected production-line, tree-bandit, parallel-hard, random)");
}

FmdpSpec resolve_spec(const json& source, const std::string& base_dir) {
    if (source.contains("file")) {
        fs::path p = source.at("file").get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
        return load_spec_file(p.string());
    }
    if (source.contains("generator")) return spec_from_generator(source);
    throw std::invalid_argument("spec source needs a \"file\" or \"generator\" key");
}

}  // namespace

FmdpSpec spec_from_generator_json(const std::string& text) {
    return spec_from_generator(json::parse(text));
}

namespace {

ExperimentConfig parse_experiment(const json& j, const std::string& base_dir) {
    ExperimentConfig cfg;
    cfg.spec = resolve_spec(j.at("spec"), base_dir);
    for (const auto& tag : j.at("algorithms")) {
        cfg.algorithms.push_back(algorithm_from_tag(tag.get<std::string>()));
    }
    cfg.episodes = j.at("episodes").get<std::int64_t>();
    cfg.delta = j.value("delta", 0.1);
    cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (cfg.seeds.empty()) throw std::invalid_argument("seed list must not be empty");
    if (j.contains("initial_state")) {
        cfg.initial_state = j.at("initial_state").get<FactorVec>();
    }
    cfg.out_dir = j.value("out", std::string{});
    return cfg;
}

}  // namespace

ExperimentConfig experiment_config_from_json(const std::string& text) {
    return parse_experiment(json::parse(text), "");
}

ExperimentConfig load_experiment_config(const std::string& path) {
    return parse_experiment(json::parse(read_file(path)),
                            fs::path(path).parent_path().string());
}

namespace {

void write_run_csv(const std::string& path, const RunRecord& record) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "episode,k_regret,cum_regret,optimism_flag\n";
    for (const auto& ep : record.episodes) {
        out << ep.episode << ',' << format_double(ep.regret) << ','
            << format_double(ep.cum_regret) << ',' << ep.optimistic << '\n';
    }
}

void write_run_csv(const std::string& path, const std::vector<EpisodeRecord>& episodes) {
    RunRecord r;
    r.episodes = episodes;
    write_run_csv(path, r);
}

void check_run_invariants(const std::vector<EpisodeRecord>& episodes) {
    double prev = 0.0;
    for (const auto& ep : episodes) {
        if (ep.regret < -1e-9) {
            throw RunInvariantError("episode " + std::to_string(ep.episode) +
                                    " has negative oracle regret " + format_double(ep.regret));
        }
        if (ep.cum_regret + 1e-12 < prev) {
            throw RunInvariantError("cumulative regret decreased at episode " +
                                    std::to_string(ep.episode));
        }
        prev = ep.cum_regret;
    }
}

std::vector<std::int64_t> checkpoints_of(std::int64_t episodes) {
    std::vector<std::int64_t> cps{std::max<std::int64_t>(1, episodes / 4),
                                  std::max<std::int64_t>(1, episodes / 2), episodes};
    return cps;
}

void write_summary_csv(const std::string& path, const std::vector<std::string>& algo_names,
                       const std::vector<std::vector<const std::vector<EpisodeRecord>*>>& runs,
                       std::int64_t episodes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "algorithm,checkpoint,mean_cum_regret,stddev_cum_regret\n";
    for (size_t a = 0; a < algo_names.size(); ++a) {
        for (const auto cp : checkpoints_of(episodes)) {
            std::vector<double> values;
            for (const auto* eps : runs[a]) {
                values.push_back((*eps)[static_cast<size_t>(cp - 1)].cum_regret);
            }
            double mean = 0.0;
            for (double v : values) mean += v;
            mean /= static_cast<double>(values.size());
            double var = 0.0;
            for (double v : values) var += (v - mean) * (v - mean);
            const double stddev =
                values.size() > 1 ? std::sqrt(var / static_cast<double>(values.size() - 1)) : 0.0;
            out << algo_names[a] << ',' << cp << ',' << format_double(mean) << ','
                << format_double(stddev) << '\n';
        }
    }
}

}  // namespace

std::vector<std::string> run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    require_valid(cfg.spec);
    fs::create_directories(out_dir);

    struct Task {
        Algorithm algo;
        std::uint64_t seed;
        RunRecord record;
    };
    std::vector<Task> tasks;
    for (auto algo : cfg.algorithms) {
        for (auto seed : cfg.seeds) tasks.push_back({algo, seed, {}});
    }

    parallel_tasks(tasks.size(), [&](size_t i) {
        RunConfig rc;
        rc.episodes = cfg.episodes;
        rc.delta = cfg.delta;
        rc.seed = tasks[i].seed;
        rc.initial_state = cfg.initial_state;
        tasks[i].record = run_algorithm(cfg.spec, tasks[i].algo, rc);
    });

    std::vector<std::string> written;
    for (const auto& task : tasks) {
        check_run_invariants(task.record.episodes);
        const std::string path = (fs::path(out_dir) / (algorithm_tag(task.algo) + "_seed" +
                                                       std::to_string(task.seed) + ".csv"))
                                     .string();
        write_run_csv(path, task.record);
        written.push_back(path);
    }

    std::vector<std::string> algo_names;
    std::vector<std::vector<const std::vector<EpisodeRecord>*>> grouped;
    for (auto algo : cfg.algorithms) {
        algo_names.push_back(algorithm_tag(algo));
        grouped.emplace_back();
        for (const auto& task : tasks) {
            if (task.algo == algo) grouped.back().push_back(&task.record.episodes);
        }
    }
    const std::string summary = (fs::path(out_dir) / "summary.csv").string();
    write_summary_csv(summary, algo_names, grouped, cfg.episodes);
    written.push_back(summary);
    return written;
}

KnapsackExperimentConfig knapsack_config_from_json(const std::string& text,
                                                   const std::string& base_dir) {
    const json j = json::parse(text);
    KnapsackExperimentConfig cfg;
    const auto& source = j.at("instance");
    if (source.contains("builtin")) {
        const std::string name = source.at("builtin").get<std::string>();
        if (name == "fig1-instance1") {
            cfg.instance = fig1_instance1();
        } else if (name == "fig1-instance2") {
            cfg.instance = fig1_instance2();
        } else {
            throw std::invalid_argument("unknown builtin instance: " + name);
        }
    } else if (source.contains("file")) {
        fs::path p = source.at("file").get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
        cfg.instance = load_budgeted_file(p.string());
    } else {
        throw std::invalid_argument("instance needs a \"builtin\" or \"file\" key");
    }
    cfg.episodes = j.at("episodes").get<std::int64_t>();
    cfg.delta = j.value("delta", 0.1);
    cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (cfg.seeds.empty()) throw std::invalid_argument("seed list must not be empty");
    cfg.initial_state = j.value("initial_state", 0);
    cfg.out_dir = j.value("out", std::string{});
    return cfg;
}

KnapsackExperimentConfig load_knapsack_config(const std::string& path) {
    return knapsack_config_from_json(read_file(path), fs::path(path).parent_path().string());
}

std::vector<std::string> run_knapsack_experiment(const KnapsackExperimentConfig& cfg,
                                                 const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::vector<KnapsackRunRecord> records(cfg.seeds.size());
    parallel_tasks(cfg.seeds.size(), [&](size_t i) {
        RunConfig rc;
        rc.episodes = cfg.episodes;
        rc.delta = cfg.delta;
        rc.seed = cfg.seeds[i];
        records[i] = run_knapsack_bernstein(cfg.instance, cfg.initial_state, rc);
    });

    std::vector<std::string> written;
    std::vector<std::vector<const std::vector<EpisodeRecord>*>> grouped(1);
    for (size_t i = 0; i < cfg.seeds.size(); ++i) {
        if (records[i].constraint_violations != 0) {
            throw RunInvariantError("budget constraint violated " +
                                    std::to_string(records[i].constraint_violations) +
                                    " times under seed " + std::to_string(cfg.seeds[i]));
        }
        check_run_invariants(records[i].episodes);
        const std::string path =
            (fs::path(out_dir) / ("rlwk-bf_seed" + std::to_string(cfg.seeds[i]) + ".csv"))
                .string();
        write_run_csv(path, records[i].episodes);
        written.push_back(path);
        grouped[0].push_back(&records[i].episodes);
    }
    const std::string summary = (fs::path(out_dir) / "summary.csv").string();
    write_summary_csv(summary, {"rlwk-bf"}, grouped, cfg.episodes);
    written.push_back(summary);
    return written;
}

namespace {

// Random fixture helpers shared by the verification suites.
FmdpSpec random_two_factor_chain(std::uint64_t seed) {
    FactorDims dims;
    dims.state_dims = {2, 2};
    dims.action_dims = {2};
    const std::vector<Scope> reward_scopes{Scope({0, 2}), Scope({1, 2})};
    const std::vector<Scope> transition_scopes{Scope({0, 2}), Scope({1, 2})};
    return gen_random_fmdp(dims, reward_scopes, transition_scopes, /*horizon=*/3, seed);
}

PolicyTable random_policy(const FmdpSpec& spec, std::uint64_t seed) {
    const CounterRng rng(seed);
    PolicyTable pi;
    pi.actions.assign(static_cast<size_t>(spec.horizon),
                      std::vector<int>(static_cast<size_t>(spec.dims.state_count()), 0));
    const auto A = spec.dims.action_count();
    for (int h = 0; h < spec.horizon; ++h) {
        for (FlatIndex s = 0; s < spec.dims.state_count(); ++s) {
            pi.actions[static_cast<size_t>(h)][static_cast<size_t>(s)] = static_cast<int>(
                rng.uniform({static_cast<std::uint64_t>(h), static_cast<std::uint64_t>(s)}) *
                static_cast<double>(A));
        }
    }
    return pi;
}

std::vector<double> random_simplex(const CounterRng& rng, std::uint64_t a, std::uint64_t b,
                                   int size) {
    std::vector<double> row(static_cast<size_t>(size));
    double sum = 0.0;
    for (int v = 0; v < size; ++v) {
        row[static_cast<size_t>(v)] =
            -std::log1p(-rng.uniform({a, b, static_cast<std::uint64_t>(v)}));
        sum += row[static_cast<size_t>(v)];
    }
    for (double& p : row) p /= sum;
    return row;
}

}  // namespace

std::vector<SuiteResult> run_verification_suites(std::int64_t lemma_trials, std::uint64_t seed) {
    std::vector<SuiteResult> out;

    {
        SuiteResult suite{"variance-bellman", 0, 0, 0.0};
        const int trials = static_cast<int>(std::max<std::int64_t>(5, lemma_trials / 50));
        for (int t = 0; t < trials; ++t) {
            const auto spec = random_two_factor_chain(seed + static_cast<std::uint64_t>(t));
            const auto policy = random_policy(spec, seed + 1000 + static_cast<std::uint64_t>(t));
            const auto recursive = chain_variance_recursive(spec, policy);
            const auto brute = chain_variance_bruteforce(spec, policy);
            double err = 0.0;
            for (size_t h = 0; h < brute.size(); ++h) {
                for (size_t s = 0; s < brute[h].size(); ++s) {
                    err = std::max(err, std::abs(brute[h][s] - recursive.omega2[h][s]));
                }
            }
            suite.total += 1;
            suite.max_error = std::max(suite.max_error, err);
            if (err <= 1e-9) suite.passed += 1;
        }
        out.push_back(suite);
    }

    {
        SuiteResult suite{"total-variance-bound", 0, 0, 0.0};
        const int trials = static_cast<int>(std::max<std::int64_t>(5, lemma_trials / 10));
        for (int t = 0; t < trials; ++t) {
            const auto spec = random_two_factor_chain(seed + 5000 + static_cast<std::uint64_t>(t));
            const auto policy = random_policy(spec, seed + 6000 + static_cast<std::uint64_t>(t));
            const auto check = total_variance_bound_check(spec, policy, {0, 0});
            suite.total += 1;
            const double identity_err = std::abs(check.lhs - check.omega2_start);
            suite.max_error = std::max(suite.max_error, identity_err);
            if (check.ok && identity_err <= 1e-9) suite.passed += 1;
        }
        out.push_back(suite);
    }

    {
        SuiteResult suite{"decomposition-lemma", 0, 0, 0.0};
        const CounterRng rng(seed + 99);
        const int n = 3, sz = 3;
        for (std::int64_t t = 0; t < std::max<std::int64_t>(1, lemma_trials); ++t) {
            std::vector<std::vector<double>> rows_hat, rows_true;
            for (int j = 0; j < n; ++j) {
                rows_hat.push_back(random_simplex(rng, static_cast<std::uint64_t>(2 * t),
                                                  static_cast<std::uint64_t>(j), sz));
                rows_true.push_back(random_simplex(rng, static_cast<std::uint64_t>(2 * t + 1),
                                                   static_cast<std::uint64_t>(j), sz));
            }
            std::vector<double> value(static_cast<size_t>(sz * sz * sz));
            for (size_t v = 0; v < value.size(); ++v) {
                value[v] = 5.0 * rng.uniform({static_cast<std::uint64_t>(t), 77, v});
            }
            const auto check = decomposition_inequality_check(rows_hat, rows_true, value);
            suite.total += 1;
            const double slack = std::max(check.l1_lhs - check.l1_rhs,
                                          check.value_lhs - check.value_rhs);
            suite.max_error = std::max(suite.max_error, slack);
            if (check.ok) suite.passed += 1;
        }
        out.push_back(suite);
    }
    return out;
}

}  // namespace fmdp
