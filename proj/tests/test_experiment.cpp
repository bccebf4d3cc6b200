#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fmdp/experiment.hpp"

using namespace fmdp;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig tiny_config() {
    return experiment_config_from_json(R"({
        "spec": {"generator": "random", "params": {
            "state_dims": [2, 2], "action_dims": [2],
            "reward_scopes": [[0, 2], [1, 2]],
            "transition_scopes": [[0, 2], [1, 2]],
            "horizon": 3, "seed": 5}},
        "algorithms": ["ch", "bf"],
        "episodes": 10,
        "delta": 0.1,
        "seeds": [1, 2, 3]
    })");
}

}  // namespace

TEST_CASE("experiment writes one CSV per run plus a summary") {
    const auto cfg = tiny_config();
    const auto dir = fs::temp_directory_path() / "fmdp_test_run";
    fs::remove_all(dir);
    const auto written = run_experiment(cfg, dir.string());
    CHECK(written.size() == 2 * 3 + 1);  // algorithms x seeds + summary

    const auto run_csv = slurp((dir / "ch_seed1.csv").string());
    std::istringstream lines(run_csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "episode,k_regret,cum_regret,optimism_flag");
    int rows = 0;
    for (std::string line; std::getline(lines, line);) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 10);

    const auto summary = slurp((dir / "summary.csv").string());
    CHECK(summary.find("algorithm,checkpoint,mean_cum_regret,stddev_cum_regret") == 0);
    CHECK(summary.find("\nch,2,") != std::string::npos);
    CHECK(summary.find("\nbf,10,") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("reruns are byte-identical") {
    const auto cfg = tiny_config();
    const auto dir1 = fs::temp_directory_path() / "fmdp_rerun_a";
    const auto dir2 = fs::temp_directory_path() / "fmdp_rerun_b";
    fs::remove_all(dir1);
    fs::remove_all(dir2);
    const auto w1 = run_experiment(cfg, dir1.string());
    const auto w2 = run_experiment(cfg, dir2.string());
    REQUIRE(w1.size() == w2.size());
    for (size_t i = 0; i < w1.size(); ++i) {
        CHECK(slurp(w1[i]) == slurp(w2[i]));
    }
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("config parsing validates its inputs") {
    CHECK_THROWS(experiment_config_from_json("{"));
    CHECK_THROWS_AS(experiment_config_from_json(R"({
        "spec": {"generator": "warp-drive", "params": {}},
        "algorithms": ["ch"], "episodes": 5, "seeds": [1]
    })"),
                    std::invalid_argument);
    CHECK_THROWS_AS(experiment_config_from_json(R"({
        "spec": {}, "algorithms": ["ch"], "episodes": 5, "seeds": [1]
    })"),
                    std::invalid_argument);
    CHECK_THROWS_AS(experiment_config_from_json(R"({
        "spec": {"generator": "random", "params": {
            "state_dims": [2], "action_dims": [2],
            "reward_scopes": [[0, 1]], "transition_scopes": [[0, 1]],
            "horizon": 2, "seed": 1}},
        "algorithms": ["ch"], "episodes": 5, "seeds": []
    })"),
                    std::invalid_argument);
}

TEST_CASE("generator config produces a loadable spec") {
    const auto spec = spec_from_generator_json(R"({
        "generator": "production-line",
        "params": {"d": 3, "per_machine_states": 2, "actions": 2, "seed": 4}
    })");
    CHECK(spec.dims.state_dims.size() == 3);
    CHECK(validate_spec(spec).ok());
}

TEST_CASE("verification suites pass at small trial counts") {
    const auto suites = run_verification_suites(100, 7);
    REQUIRE(suites.size() == 3);
    for (const auto& s : suites) {
        CHECK(s.ok());
        CHECK(s.total > 0);
    }
}

TEST_CASE("knapsack experiment writes runs without violations") {
    const auto cfg = knapsack_config_from_json(R"({
        "instance": {"builtin": "fig1-instance1"},
        "episodes": 30, "delta": 0.1, "seeds": [4, 5]
    })");
    const auto dir = fs::temp_directory_path() / "fmdp_rlwk_run";
    fs::remove_all(dir);
    const auto written = run_knapsack_experiment(cfg, dir.string());
    CHECK(written.size() == 3);
    CHECK(slurp((dir / "rlwk-bf_seed4.csv").string())
              .find("episode,k_regret,cum_regret,optimism_flag") == 0);
    fs::remove_all(dir);
}

TEST_CASE("double formatting is locale-free and round-trips") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(-1.25) == "-1.25");
    const double tricky = 0.1 + 0.2;
    CHECK(std::stod(format_double(tricky)) == tricky);
}

TEST_CASE("worker pool size respects the environment cap") {
    CHECK(worker_pool_size() >= 1);
}
