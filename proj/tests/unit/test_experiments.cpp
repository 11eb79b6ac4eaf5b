#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vblob/errors.hpp"
#include "vblob/experiments.hpp"

using namespace vblob;
namespace ex = vblob::experiments;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ex::Common small_grid() {
    ex::Common c;
    c.cells = 4;
    c.steps = 3;
    c.tau = 0.5;
    return c;
}

}  // namespace

TEST(Csv, ManifestHeaderAndRows) {
    ex::Table t{"demo", {"a", "b", "c"}, {}};
    t.add_row({std::int64_t{3}, 0.1, std::string("x")});
    const auto ls = lines(ex::to_csv(t, {{"command", std::string("demo")}, {"n", std::int64_t{2}}}));
    ASSERT_EQ(ls.size(), 3u);
    EXPECT_EQ(ls[0].rfind("# manifest: ", 0), 0u);
    const auto j = nlohmann::json::parse(ls[0].substr(12));
    EXPECT_EQ(j["command"], "demo");
    EXPECT_EQ(j["n"], 2);
    EXPECT_EQ(ls[1], "a,b,c");
    EXPECT_EQ(ls[2], "3,1.0000000000000001e-01,x");
}

TEST(Csv, DoublesRoundTrip) {
    ex::Table t{"demo", {"v"}, {}};
    const double v = 1.0 / 3.0;
    t.add_row({v});
    const auto ls = lines(ex::to_csv(t, {}));
    EXPECT_EQ(std::stod(ls[2]), v);
}

TEST(Csv, RowWidthMustMatchColumns) {
    ex::Table t{"demo", {"a", "b"}, {}};
    EXPECT_THROW(t.add_row({0.0}), ConfigError);
}

TEST(Csv, ManifestKeepsInsertionOrder) {
    const auto s = ex::manifest_json({{"zeta", std::int64_t{1}}, {"alpha", std::int64_t{2}}});
    EXPECT_LT(s.find("zeta"), s.find("alpha"));
}

TEST(Outputs, WritesEveryTableAndManifest) {
    const fs::path dir = fs::temp_directory_path() / "vblob_test_outputs";
    fs::remove_all(dir);
    ex::Table a{"first", {"x"}, {}};
    a.add_row({1.5});
    ex::Table b{"second", {"y"}, {}};
    ex::write_outputs(dir, {a, b}, {{"command", std::string("t")}});
    EXPECT_TRUE(fs::exists(dir / "first.csv"));
    EXPECT_TRUE(fs::exists(dir / "second.csv"));
    const auto j = nlohmann::json::parse(slurp(dir / "manifest.json"));
    EXPECT_EQ(j["command"], "t");
    for (const auto& e : fs::directory_iterator(dir)) EXPECT_EQ(e.path().extension() != ".tmp", true);
    fs::remove_all(dir);
}

TEST(Problems, RandomSystemIsSeededAndBounded) {
    const auto a = ex::random_system(5, Order::second, 42);
    const auto b = ex::random_system(5, Order::second, 42);
    const auto c = ex::random_system(5, Order::second, 43);
    EXPECT_EQ(a.state.x, b.state.x);
    EXPECT_NE(a.state.x, c.state.x);
    EXPECT_EQ(a.system.h(), 1.0);
    EXPECT_EQ(a.system.delta(), 1.0);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_LE(std::abs(a.system.kappa(i)), 1.0);
        EXPECT_LE(std::abs(a.state.x[i]), 1.0);
        EXPECT_LE(std::abs(a.state.y[i]), 1.0);
    }
}

TEST(Problems, NamesRoundTrip) {
    for (auto p : {ex::Problem::grid, ex::Problem::ring, ex::Problem::random})
        EXPECT_EQ(ex::problem_from_string(ex::to_string(p)), p);
    EXPECT_THROW(ex::problem_from_string("torus"), ConfigError);
}

TEST(Common, ManifestRecordsConfiguration) {
    auto c = small_grid();
    const auto j = nlohmann::json::parse(ex::manifest_json(c.manifest("simulate")));
    EXPECT_EQ(j["command"], "simulate");
    EXPECT_EQ(j["cells"], 4);
    EXPECT_EQ(j["method"], "dmm");
    EXPECT_EQ(j["deterministic"], "on");
}

TEST(Common, SetupMatchesProblem) {
    auto c = small_grid();
    EXPECT_EQ(c.setup().state.size(), 16u);
    c.problem = ex::Problem::ring;
    EXPECT_EQ(c.setup().state.size(), 4u);
    c.problem = ex::Problem::random;
    c.vortices = 7;
    EXPECT_EQ(c.setup().state.size(), 7u);
    c.m = 3;
    EXPECT_THROW(c.setup(), ConfigError);
}

TEST(Simulate, DeterministicRunsAreBitIdentical) {
    const auto c = small_grid();
    const auto a = ex::simulate_tables(ex::simulate(c));
    const auto b = ex::simulate_tables(ex::simulate(c));
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(ex::to_csv(a[i], {}), ex::to_csv(b[i], {}));
}

TEST(Simulate, TrajectoryHasOneRowPerSample) {
    auto c = small_grid();
    c.steps = 5;
    c.stride = 2;
    const auto r = ex::simulate(c);
    const auto tables = ex::simulate_tables(r);
    EXPECT_EQ(tables[0].name, "trajectory");
    EXPECT_EQ(tables[0].rows.size(), 4u);  // steps 0, 2, 4, 5
    EXPECT_EQ(tables[1].name, "solver");
    EXPECT_EQ(tables[1].rows.size(), 5u);
    EXPECT_LE(r.drift.max_ham(), 1e-13);
}

TEST(Conservation, DmmBeatsExplicitOnSmallGrid) {
    auto c = small_grid();
    c.steps = 20;
    const auto res = ex::conservation(c, {MethodKind::dmm, MethodKind::rm2});
    ASSERT_EQ(res.size(), 2u);
    EXPECT_LT(res[0].drift.max_ham(), 1e-13);
    EXPECT_GT(res[1].drift.max_ham(), 1e-10);
    EXPECT_GT(res[0].mean_iterations, 1.0);
    EXPECT_EQ(res[1].mean_iterations, 0.0);
    const auto tables = ex::conservation_tables(res);
    EXPECT_EQ(tables.size(), 2u);
}

TEST(Conservation, ConvergenceAgainstContinuum) {
    auto c = small_grid();
    c.steps = 2;
    const auto pts = ex::conserved_convergence(c, {5, 10, 20}, {MethodKind::dmm});
    ASSERT_EQ(pts.size(), 3u);
    EXPECT_GT(pts[0].ell_error, pts[2].ell_error);
    EXPECT_EQ(ex::convergence_table(pts).rows.size(), 3u);
}

TEST(Temporal, SlopesAndTables) {
    ex::Common c;
    ex::TemporalConfig tc;
    tc.orders = {4};
    tc.final_time = 2.0;
    tc.kappa = 1.0;
    tc.taus = {0.1, 0.05, 0.025};
    const auto r = ex::temporal_order(c, tc);
    ASSERT_EQ(r.points.size(), 3u);
    ASSERT_EQ(r.fits.size(), 1u);
    EXPECT_NEAR(r.fits[0].fit.slope, 2.0, 0.1);
    EXPECT_EQ(ex::temporal_tables(r).size(), 2u);
}

TEST(Temporal, TwoStepSizesGiveNoFit) {
    ex::Common c;
    ex::TemporalConfig tc;
    tc.orders = {2};
    tc.taus = {0.5, 0.25};
    tc.final_time = 1.0;
    EXPECT_TRUE(ex::temporal_order(c, tc).fits.empty());
}

TEST(Spatial, DefaultGridsPerOrder) {
    EXPECT_EQ(ex::default_spatial_cells(2), (std::vector<int>{10, 20, 40, 80}));
    EXPECT_EQ(ex::default_spatial_cells(4), (std::vector<int>{20, 40, 80, 160}));
    EXPECT_EQ(ex::default_spatial_cells(6), (std::vector<int>{40, 80, 160, 320}));
    ex::SpatialConfig sc;
    sc.cells = {{4, {5, 10, 20}}};
    EXPECT_EQ(sc.cells_for(4), (std::vector<int>{5, 10, 20}));
    EXPECT_EQ(sc.cells_for(2), ex::default_spatial_cells(2));
}

TEST(Spatial, SmallSweepDecreases) {
    ex::Common c;
    ex::SpatialConfig sc;
    sc.orders = {2};
    sc.cells = {{2, {5, 10, 20}}};
    sc.radial_panels = 4;
    sc.angular_nodes = 32;
    const auto r = ex::spatial_order(c, sc);
    ASSERT_EQ(r.points.size(), 3u);
    EXPECT_GT(r.points[0].error, r.points[2].error);
    EXPECT_EQ(r.points[0].p, 3);
    EXPECT_EQ(ex::spatial_tables(r).size(), 2u);
}

TEST(Timing, FixedModeRows) {
    ex::Common c;
    c.m = 2;
    c.steps = 50;
    ex::TimingConfig tc;
    tc.seeds = {1, 2};
    tc.methods = {MethodKind::rm2, MethodKind::dmm};
    const auto rows = ex::timing(c, tc);
    ASSERT_EQ(rows.size(), 4u);
    for (const auto& r : rows) {
        EXPECT_EQ(r.steps, 50u);
        if (r.method == MethodKind::dmm) EXPECT_LT(r.ham, 1e-13);
    }
    EXPECT_EQ(ex::timing_table(rows).rows.size(), 4u);
}

TEST(Timing, MatchedModeGivesReferenceItsSteps) {
    ex::Common c;
    c.m = 2;
    c.steps = 40;
    ex::TimingConfig tc;
    tc.seeds = {3};
    tc.methods = {MethodKind::rm4, MethodKind::dmm};
    tc.mode = ex::TimingMode::matched_time;
    const auto rows = ex::timing(c, tc);
    ASSERT_EQ(rows.size(), 2u);
    for (const auto& r : rows) {
        if (r.method == MethodKind::dmm) EXPECT_EQ(r.steps, 40u);
        if (r.method == MethodKind::rm4) EXPECT_GE(r.steps, 1u);
    }
}

TEST(E1Table, EndpointsAndRegimes) {
    const auto rows = ex::e1_table(1e-12, 34.0, 5);
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(rows.front().x, 1e-12);
    EXPECT_EQ(rows.back().x, 34.0);
    for (const auto& r : rows) EXPECT_LE(r.rel_error, 5e-15);
    EXPECT_EQ(ex::e1_table(2.0, 3.0, 1).size(), 1u);
    EXPECT_THROW(ex::e1_table(0.0, 1.0, 3), ConfigError);
    EXPECT_EQ(ex::e1_rows_table(rows).columns.size(), 5u);
}
