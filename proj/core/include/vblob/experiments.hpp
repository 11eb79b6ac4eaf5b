#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "vblob/analysis.hpp"
#include "vblob/blob_model.hpp"
#include "vblob/integrators.hpp"

namespace vblob::experiments {

// ---------------------------------------------------------------------------
// Tabular output

using Value = std::variant<std::int64_t, double, std::string>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Value>> rows;

    void add_row(std::vector<Value> row);
};

/// Ordered configuration snapshot, serialized as a JSON object.
using Manifest = std::vector<std::pair<std::string, Value>>;

std::string manifest_json(const Manifest& manifest);

/// "# manifest: {...}" line, header row, then one line per row. Doubles are
/// written with 17 significant digits in scientific notation.
std::string to_csv(const Table& table, const Manifest& manifest);

/// Writes <dir>/<table.name>.csv for each table plus <dir>/manifest.json.
/// Each file is written to a temporary name and renamed into place.
void write_outputs(const std::filesystem::path& dir, const std::vector<Table>& tables,
                   const Manifest& manifest);

// ---------------------------------------------------------------------------
// Problem setup

enum class Problem { grid, ring, random };

Problem problem_from_string(const std::string& name);
std::string to_string(Problem problem);

/// M vortices with h = 1, delta = 1, strengths and coordinates drawn
/// uniformly from [-1, 1] with a 64-bit Mersenne Twister.
GridSetup random_system(std::size_t count, Order m, std::uint64_t seed);

/// Settings shared by every subcommand.
struct Common {
    int cells = 10;
    int m = 4;
    double q = 0.75;
    int p = 3;
    double tau = 1.0;
    std::size_t steps = 1000;
    MethodKind method = MethodKind::dmm;
    double tol = 1e-13;
    int max_iters = 200;
    std::uint64_t seed = 1;
    bool deterministic = true;

    Problem problem = Problem::grid;
    std::size_t vortices = 3;  ///< count for the random problem
    std::size_t stride = 1;

    SolverConfig solver() const;
    Method make_method(MethodKind kind) const;
    GridSetup setup() const;
    Manifest manifest(const std::string& command) const;
};

// ---------------------------------------------------------------------------
// simulate

struct SimulateResult {
    RunRecord record;
    DriftSeries drift;
};

SimulateResult simulate(const Common& cfg);
std::vector<Table> simulate_tables(const SimulateResult& result);

// ---------------------------------------------------------------------------
// conservation

struct MethodDrift {
    MethodKind method;
    DriftSeries drift;
    double wall_seconds;
    double mean_iterations;
};

/// Runs every method on the same initial problem.
std::vector<MethodDrift> conservation(const Common& cfg, const std::vector<MethodKind>& methods);
std::vector<Table> conservation_tables(const std::vector<MethodDrift>& result);

struct ConvergencePoint {
    MethodKind method;
    int cells;
    double h;
    double ell_error;  ///< |L^{h,N} - L|
    double ham_error;  ///< |H^{h,N} - H|
};

/// Distance of the final discrete invariants from the continuum values over
/// a grid sweep, at fixed tau and step count.
std::vector<ConvergencePoint> conserved_convergence(const Common& cfg, const std::vector<int>& cells,
                                                    const std::vector<MethodKind>& methods);
Table convergence_table(const std::vector<ConvergencePoint>& points);

// ---------------------------------------------------------------------------
// temporal-order

struct TemporalConfig {
    std::vector<int> orders = {2, 4, 6};
    std::vector<double> taus = {0.5, 0.25, 0.125, 0.0625};
    double final_time = 10.0;
    double kappa = 0.125;
    double delta = 1.0;
};

struct TemporalPoint {
    int m;
    MethodKind method;
    double tau;
    std::size_t steps;
    double error;
};

struct FitRow {
    int m;
    std::string label;
    OrderFit fit;
};

struct TemporalResult {
    std::vector<TemporalPoint> points;
    std::vector<FitRow> fits;  ///< empty when fewer than three step sizes
};

TemporalResult temporal_order(const Common& cfg, const TemporalConfig& tc);
std::vector<Table> temporal_tables(const TemporalResult& result);

// ---------------------------------------------------------------------------
// spatial-order

struct SpatialConfig {
    std::vector<int> orders = {2, 4, 6};
    /// Grid sweep per order; the default for an order is used when absent.
    std::vector<std::pair<int, std::vector<int>>> cells;
    /// Vorticity exponent for m = 6 (smoother data for the higher order).
    int p_sixth = 15;
    double final_time = 0.001;
    double tau = 0.001;
    int radial_panels = 16;
    int angular_nodes = 64;

    std::vector<int> cells_for(int m) const;
};

struct SpatialPoint {
    int m;
    int p;
    int cells;
    double h;
    double delta;
    std::size_t vortices;
    double error;
};

struct SpatialResult {
    std::vector<SpatialPoint> points;
    std::vector<FitRow> fits;
};

/// Default grid sweeps, chosen so each order is measured in its asymptotic range.
std::vector<int> default_spatial_cells(int m);

SpatialResult spatial_order(const Common& cfg, const SpatialConfig& sc);
std::vector<Table> spatial_tables(const SpatialResult& result);

// ---------------------------------------------------------------------------
// timing

enum class TimingMode { fixed_steps, matched_time };

struct TimingConfig {
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::vector<MethodKind> methods = {MethodKind::rm2, MethodKind::rm4, MethodKind::imm,
                                       MethodKind::dmm};
    TimingMode mode = TimingMode::fixed_steps;
    /// Reference method whose wall time the others are matched to.
    MethodKind reference = MethodKind::dmm;
};

struct TimingRow {
    std::uint64_t seed;
    MethodKind method;
    std::size_t steps;
    double wall_seconds;
    double px;
    double py;
    double ell;
    double ham;
};

std::vector<TimingRow> timing(const Common& cfg, const TimingConfig& tc);
Table timing_table(const std::vector<TimingRow>& rows);

// ---------------------------------------------------------------------------
// e1-table

struct E1Row {
    double x;
    double value;
    double reference;
    double rel_error;
};

/// count log-uniform samples on [lo, hi]; count = 1 gives lo only.
std::vector<E1Row> e1_table(double lo, double hi, std::size_t count);
Table e1_rows_table(const std::vector<E1Row>& rows);

}  // namespace vblob::experiments
