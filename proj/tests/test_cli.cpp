#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rsep/experiment.hpp"
#include "rsep/graph_io.hpp"
#include "rsep/keyval.hpp"
#include "rsep/manifest.hpp"

#include <cmath>

using namespace rsep;

TEST_CASE("keyval parsing") {
    auto kv = parse_keyval("a = 1\n# comment\n  b=two \n\nc = 3 # trailing\n");
    CHECK(kv.size() == 3);
    CHECK(kv.at("a") == "1");
    CHECK(kv.at("b") == "two");
    CHECK(kv.at("c") == "3");

    CHECK_THROWS_AS(parse_keyval("a = 1\na = 2\n"), Error); // duplicate
    CHECK_THROWS_AS(parse_keyval("nonsense line\n"), Error);
    CHECK_THROWS_AS(parse_keyval("= 3\n"), Error);

    try {
        parse_keyval("x = 1\nx = 2\n");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ParseError);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("experiment config from keyval with defaults") {
    auto kv = parse_keyval("graph = g.json\nradii = 1,2,4\nhorizon = 2.0\n");
    auto exp = experiment_from_keyval(kv);
    CHECK(exp.graph == "g.json");
    CHECK(exp.config.alpha == 0.5);         // documented default
    CHECK(exp.config.delta == 0.1);         // documented default
    CHECK(exp.config.trajectories == 1000); // documented default
    CHECK(exp.config.horizon == 2.0);
    CHECK(exp.config.radii == std::vector<int>{1, 2, 4});

    auto bad_eps = parse_keyval("graph = g.json\nradii = 1,2\nepsilon = 1.5\n");
    CHECK_THROWS_AS(experiment_from_keyval(bad_eps), Error);
    try {
        experiment_from_keyval(bad_eps);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ValidationError);
        CHECK(std::string(e.what()).find("epsilon") != std::string::npos);
    }

    auto unknown = parse_keyval("graph = g.json\nradii = 1,2\nwat = 7\n");
    CHECK_THROWS_AS(experiment_from_keyval(unknown), Error);

    auto no_graph = parse_keyval("radii = 1,2\n");
    CHECK_THROWS_AS(experiment_from_keyval(no_graph), Error);

    // minimal file: graph + horizon only, everything else defaulted
    auto minimal = experiment_from_keyval(parse_keyval("graph = g.json\nhorizon = 1\n"));
    CHECK(minimal.config.radii == std::vector<int>{1, 3, 4, 8});
    CHECK(minimal.config.levels.empty()); // auto
}

TEST_CASE("minimal experiment config runs with auto level selection") {
    auto p = make_path(24).graph;
    ExperimentConfig cfg; // defaults: radii {1,3,4,8}, levels auto, eps 0.5
    cfg.trajectories = 20;
    cfg.horizon = 0.2;
    cfg.seed = 4;
    auto rep = run_experiment(p, nullptr, 0, cfg);
    // level 4 (radius 8, probe radius r_2 = 3) is the only feasible one
    REQUIRE(!rep.levels.empty());
    for (int lvl : rep.levels) CHECK(lvl == 4);
    CHECK(!rep.cells.empty());
}

TEST_CASE("interval helpers") {
    auto w = wilson_interval(50, 100, 0.95);
    CHECK(w.low > 0.40);
    CHECK(w.high < 0.60);
    CHECK(w.low < 0.5);
    CHECK(w.high > 0.5);

    auto w0 = wilson_interval(0, 100, 0.95);
    CHECK(w0.low == 0.0);
    CHECK(w0.high > 0.0);

    // x = 0: closed form 1 - alpha^{1/n}
    double cp0 = clopper_pearson_upper(0, 200, 0.95);
    CHECK(cp0 == doctest::Approx(1.0 - std::pow(0.05, 1.0 / 200)).epsilon(1e-12));
    // upper bound honors the defining inequality
    for (int x : {1, 3, 10}) {
        double cp = clopper_pearson_upper(x, 100, 0.95);
        CHECK(cp > static_cast<double>(x) / 100);
        CHECK(cp < 1.0);
    }
    CHECK(clopper_pearson_upper(100, 100, 0.95) == 1.0);
}

TEST_CASE("manifest json is deterministic and timestamp-free") {
    RunManifest m;
    m.version = "test";
    m.command_line = "resistor-sep verify --suite mpl";
    m.seed = 42;
    m.graph_hash = "fnv1a64:0123456789abcdef";
    m.tolerances["tol"] = 1e-10;
    m.outputs = {"a.json"};
    auto one = m.to_json();
    auto two = m.to_json();
    CHECK(one == two);
    CHECK(one.find("time") == std::string::npos);
    CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("experiment runs deterministically on a small conservative instance") {
    auto p = make_path(30).graph;
    ExperimentConfig cfg;
    cfg.radii = {1, 3, 4, 8};
    cfg.levels = {3, 4};
    cfg.epsilons = {0.75};
    cfg.block_radius = 2;
    cfg.delta = 0.05;
    cfg.horizon = 0.5;
    cfg.trajectories = 60;
    cfg.seed = 9;
    cfg.threads = 2;
    cfg.volume_mode = VolumeMode::Count;

    auto a = run_experiment(p, nullptr, 0, cfg);
    auto b = run_experiment(p, nullptr, 0, cfg);
    REQUIRE(a.cells.size() == b.cells.size());
    CHECK(!a.cells.empty());
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        CHECK(a.cells[i].exceed == b.cells[i].exceed);
        CHECK(a.cells[i].p_hat == b.cells[i].p_hat); // bitwise
        CHECK(a.cells[i].trials == 60);
    }
    CHECK(a.sup_cells.size() == 2); // one per level
}

TEST_CASE("experiment boundary statistic on a symmetric instance") {
    auto p = make_path(8).graph;
    BoundarySpec spec;
    spec.vertices = {0, 8};
    spec.lambda_plus = {1.0, 1.0};
    spec.lambda_minus = {1.0, 1.0};

    ExperimentConfig cfg;
    cfg.radii = {1, 3, 6};
    cfg.levels = {3};
    cfg.epsilons = {1.0};
    cfg.block_radius = 2;
    cfg.delta = 0.2;
    cfg.horizon = 1.0;
    cfg.trajectories = 400;
    cfg.seed = 31;
    cfg.boundary_driven = true;
    cfg.initial = "nu-lambda";
    cfg.volume_mode = VolumeMode::Count;

    auto report = run_experiment(p, &spec, 0, cfg);
    REQUIRE(!report.boundary.empty());
    for (const auto& bc : report.boundary) {
        CHECK(bc.target == 0.5);
        CHECK(std::abs(bc.mean) <= 4.0 * bc.std_error + 1e-12);
    }
}

TEST_CASE("threshold beyond the integrand bound gives zero exceedances") {
    // |∫ U dt| <= T·sup|U| <= T for the occupancy bundle; δ = 10 T cannot
    // be exceeded.
    auto p = make_path(24).graph;
    ExperimentConfig cfg;
    cfg.radii = {1, 3, 4, 8};
    cfg.levels = {4};
    cfg.epsilons = {0.5};
    cfg.block_radius = 2;
    cfg.horizon = 0.4;
    cfg.delta = 4.0;
    cfg.trajectories = 50;
    cfg.seed = 77;
    cfg.volume_mode = VolumeMode::Count;
    auto rep = run_experiment(p, nullptr, 0, cfg);
    for (const auto& cell : rep.cells) {
        CHECK(cell.exceed == 0);
        CHECK(cell.p_hat == 0.0);
        CHECK(cell.cp_upper > 0.0); // one-sided bound replaces the point estimate
    }
}

TEST_CASE("experiment rejects a block that does not fit the probe ball") {
    auto p = make_path(30).graph;
    ExperimentConfig cfg;
    cfg.radii = {1, 2, 4};
    cfg.levels = {2}; // probe index floor(0.5*2) = 1 -> radius-1 ball cannot hold a radius-2 block
    cfg.epsilons = {0.5};
    cfg.block_radius = 2;
    cfg.trajectories = 5;
    CHECK_THROWS_AS(run_experiment(p, nullptr, 0, cfg), Error);
}
