#include "vblob/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vblob/errors.hpp"
#include "vblob/specfun.hpp"

namespace vblob::experiments {
namespace {

using nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

std::string format_value(const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&v)) return format_double(*d);
    return std::get<std::string>(v);
}

Value int_value(std::size_t v) { return static_cast<std::int64_t>(v); }
Value str(std::string_view s) { return std::string(s); }

void write_atomic(const std::filesystem::path& path, const std::string& text) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << text;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::size_t steps_for(double final_time, double tau) {
    if (!(tau > 0.0)) throw ConfigError("time step must be positive");
    if (final_time < 0.0) throw ConfigError("final time must be nonnegative");
    return static_cast<std::size_t>(std::llround(final_time / tau));
}

double mean(const std::vector<int>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (int x : v) s += x;
    return s / static_cast<double>(v.size());
}

OrderFit fit_points(const std::vector<std::pair<double, double>>& pts) {
    return fit_order(std::span<const std::pair<double, double>>(pts));
}

Table fits_table(const std::vector<FitRow>& fits) {
    Table t{"fits", {"m", "label", "slope", "intercept", "r_squared"}, {}};
    for (const auto& f : fits)
        t.add_row({Value{std::int64_t{f.m}}, str(f.label), f.fit.slope, f.fit.intercept, f.fit.r_squared});
    return t;
}

IntegrateOptions sampling(std::size_t stride) {
    IntegrateOptions opts;
    opts.stride = stride;
    return opts;
}

}  // namespace

void Table::add_row(std::vector<Value> row) {
    if (row.size() != columns.size()) throw ConfigError("table row width does not match header");
    rows.push_back(std::move(row));
}

std::string manifest_json(const Manifest& manifest) {
    ordered_json j = ordered_json::object();
    for (const auto& [key, value] : manifest) {
        if (const auto* i = std::get_if<std::int64_t>(&value)) j[key] = *i;
        else if (const auto* d = std::get_if<double>(&value)) j[key] = format_double(*d);
        else j[key] = std::get<std::string>(value);
    }
    return j.dump();
}

std::string to_csv(const Table& table, const Manifest& manifest) {
    std::ostringstream out;
    out << "# manifest: " << manifest_json(manifest) << '\n';
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_value(row[c]);
        out << '\n';
    }
    return out.str();
}

void write_outputs(const std::filesystem::path& dir, const std::vector<Table>& tables,
                   const Manifest& manifest) {
    std::filesystem::create_directories(dir);
    for (const auto& t : tables) write_atomic(dir / (t.name + ".csv"), to_csv(t, manifest));
    write_atomic(dir / "manifest.json", manifest_json(manifest) + "\n");
}

Problem problem_from_string(const std::string& name) {
    if (name == "grid") return Problem::grid;
    if (name == "ring") return Problem::ring;
    if (name == "random") return Problem::random;
    throw ConfigError("unknown problem '" + name + "' (expected grid, ring or random)");
}

std::string to_string(Problem problem) {
    switch (problem) {
        case Problem::grid: return "grid";
        case Problem::ring: return "ring";
        case Problem::random: return "random";
    }
    return "?";
}

GridSetup random_system(std::size_t count, Order m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> kappa(count);
    std::vector<double> xs(count);
    std::vector<double> ys(count);
    for (std::size_t i = 0; i < count; ++i) {
        kappa[i] = u(rng);
        xs[i] = u(rng);
        ys[i] = u(rng);
    }
    return {BlobSystem(m, 1.0, 1.0, std::move(kappa)), State(std::move(xs), std::move(ys))};
}

SolverConfig Common::solver() const {
    SolverConfig s;
    s.tol = tol;
    s.max_iters = max_iters;
    s.summation = deterministic ? Summation::sequential : Summation::parallel;
    s.validate();
    return s;
}

Method Common::make_method(MethodKind kind) const { return Method::make(kind, solver()); }

GridSetup Common::setup() const {
    const Order order = order_from_int(m);
    switch (problem) {
        case Problem::grid: return init_grid(cells, p, q, order, false);
        case Problem::ring: return {four_vortex_system(order), four_vortex_exact(0.0, order, 1.0)};
        case Problem::random: return random_system(vortices, order, seed);
    }
    throw ConfigError("unknown problem");
}

Manifest Common::manifest(const std::string& command) const {
    return {
        {"command", command},
        {"problem", to_string(problem)},
        {"cells", std::int64_t{cells}},
        {"m", std::int64_t{m}},
        {"q", q},
        {"p", std::int64_t{p}},
        {"tau", tau},
        {"steps", int_value(steps)},
        {"method", std::string(vblob::to_string(method))},
        {"tol", tol},
        {"max_iters", std::int64_t{max_iters}},
        {"seed", static_cast<std::int64_t>(seed)},
        {"deterministic", std::string(deterministic ? "on" : "off")},
        {"vortices", int_value(vortices)},
        {"stride", int_value(stride)},
    };
}

// ---------------------------------------------------------------------------

SimulateResult simulate(const Common& cfg) {
    const GridSetup g = cfg.setup();
    RunRecord rec = integrate(g.system, g.state, cfg.tau, cfg.steps, cfg.make_method(cfg.method),
                              sampling(cfg.stride));
    DriftSeries d = drift_series(rec);
    return {std::move(rec), std::move(d)};
}

std::vector<Table> simulate_tables(const SimulateResult& r) {
    Table t{"trajectory",
            {"step", "t", "gamma", "px", "py", "ell", "ham", "d_gamma", "d_px", "d_py", "d_ell", "d_ham"},
            {}};
    for (std::size_t k = 0; k < r.record.samples.size(); ++k) {
        const auto& s = r.record.samples[k];
        t.add_row({int_value(s.step), s.t, s.psi.gamma, s.psi.px, s.psi.py, s.psi.ell, s.psi.ham,
                   r.drift.gamma[k], r.drift.px[k], r.drift.py[k], r.drift.ell[k], r.drift.ham[k]});
    }
    Table solver{"solver", {"step", "iterations", "residual"}, {}};
    for (std::size_t k = 0; k < r.record.iterations.size(); ++k)
        solver.add_row({int_value(k + 1), Value{std::int64_t{r.record.iterations[k]}}, r.record.residuals[k]});
    return {t, solver};
}

// ---------------------------------------------------------------------------

std::vector<MethodDrift> conservation(const Common& cfg, const std::vector<MethodKind>& methods) {
    const GridSetup g = cfg.setup();
    std::vector<MethodDrift> out;
    for (MethodKind k : methods) {
        const RunRecord rec =
            integrate(g.system, g.state, cfg.tau, cfg.steps, cfg.make_method(k), sampling(cfg.stride));
        out.push_back({k, drift_series(rec), rec.wall_seconds, mean(rec.iterations)});
    }
    return out;
}

std::vector<Table> conservation_tables(const std::vector<MethodDrift>& result) {
    Table drift{"drift", {"method", "step", "t", "d_px", "d_py", "d_ell", "d_ham"}, {}};
    Table summary{"summary",
                  {"method", "max_d_px", "max_d_py", "max_d_ell", "max_d_ham", "wall_seconds",
                   "mean_iterations"},
                  {}};
    for (const auto& r : result) {
        const std::string name(vblob::to_string(r.method));
        for (std::size_t k = 0; k < r.drift.steps.size(); ++k)
            drift.add_row({name, int_value(r.drift.steps[k]), r.drift.times[k], r.drift.px[k],
                           r.drift.py[k], r.drift.ell[k], r.drift.ham[k]});
        summary.add_row({name, r.drift.max_px(), r.drift.max_py(), r.drift.max_ell(), r.drift.max_ham(),
                         r.wall_seconds, r.mean_iterations});
    }
    return {drift, summary};
}

std::vector<ConvergencePoint> conserved_convergence(const Common& cfg, const std::vector<int>& cells,
                                                    const std::vector<MethodKind>& methods) {
    const ExactIntegrals exact = exact_conserved_integrals(cfg.p);
    IntegrateOptions opts;
    opts.sample_conserved = false;
    std::vector<ConvergencePoint> out;
    for (MethodKind k : methods) {
        for (int c : cells) {
            const GridSetup g = init_grid(c, cfg.p, cfg.q, order_from_int(cfg.m), true);
            const RunRecord rec = integrate(g.system, g.state, cfg.tau, cfg.steps, cfg.make_method(k), opts);
            const ConservedSet fin = conserved(g.system, rec.final_state);
            out.push_back({k, c, g.system.h(), std::abs(fin.ell - exact.ell), std::abs(fin.ham - exact.ham)});
        }
    }
    return out;
}

Table convergence_table(const std::vector<ConvergencePoint>& points) {
    Table t{"convergence", {"method", "cells", "h", "ell_error", "ham_error"}, {}};
    for (const auto& p : points)
        t.add_row({str(vblob::to_string(p.method)), Value{std::int64_t{p.cells}}, p.h, p.ell_error, p.ham_error});
    return t;
}

// ---------------------------------------------------------------------------

TemporalResult temporal_order(const Common& cfg, const TemporalConfig& tc) {
    TemporalResult res;
    const Method method = cfg.make_method(cfg.method);
    IntegrateOptions opts;
    opts.sample_conserved = false;
    for (int mi : tc.orders) {
        const Order m = order_from_int(mi);
        const BlobSystem sys = four_vortex_system(m, tc.delta, tc.kappa);
        const State exact = four_vortex_exact(tc.final_time, m, tc.delta, tc.kappa);
        std::vector<std::pair<double, double>> pts;
        for (double tau : tc.taus) {
            const std::size_t n = steps_for(tc.final_time, tau);
            const RunRecord rec =
                integrate(sys, four_vortex_exact(0.0, m, tc.delta, tc.kappa), tau, n, method, opts);
            const double err = temporal_error(rec.final_state, exact);
            res.points.push_back({mi, cfg.method, tau, n, err});
            if (err > 0.0) pts.emplace_back(tau, err);
        }
        if (pts.size() >= 3) res.fits.push_back({mi, "tau", fit_points(pts)});
    }
    return res;
}

std::vector<Table> temporal_tables(const TemporalResult& r) {
    Table t{"temporal", {"m", "method", "tau", "steps", "error"}, {}};
    for (const auto& p : r.points)
        t.add_row({Value{std::int64_t{p.m}}, str(vblob::to_string(p.method)), p.tau, int_value(p.steps), p.error});
    return {t, fits_table(r.fits)};
}

// ---------------------------------------------------------------------------

std::vector<int> default_spatial_cells(int m) {
    switch (m) {
        case 2: return {10, 20, 40, 80};
        case 4: return {20, 40, 80, 160};
        case 6: return {40, 80, 160, 320};
        default: throw ConfigError("order m must be 2, 4 or 6");
    }
}

std::vector<int> SpatialConfig::cells_for(int m) const {
    for (const auto& [order, list] : cells)
        if (order == m) return list;
    return default_spatial_cells(m);
}

SpatialResult spatial_order(const Common& cfg, const SpatialConfig& sc) {
    SpatialResult res;
    const Method method = cfg.make_method(cfg.method);
    const QuadratureRule rule = QuadratureRule::polar(1.0, sc.radial_panels, sc.angular_nodes);
    const std::size_t n = steps_for(sc.final_time, sc.tau);
    IntegrateOptions opts;
    opts.sample_conserved = false;
    for (int mi : sc.orders) {
        const int p = mi == 6 ? sc.p_sixth : cfg.p;
        std::vector<std::pair<double, double>> pts;
        for (int c : sc.cells_for(mi)) {
            const GridSetup g = init_grid(c, p, cfg.q, order_from_int(mi), true);
            const RunRecord rec = integrate(g.system, g.state, sc.tau, n, method, opts);
            const double err = spatial_error(g.system, rec.final_state, p, rule);
            res.points.push_back({mi, p, c, g.system.h(), g.system.delta(), g.system.size(), err});
            if (err > 0.0) pts.emplace_back(g.system.h(), err);
        }
        if (pts.size() >= 3) res.fits.push_back({mi, "h", fit_points(pts)});
    }
    return res;
}

std::vector<Table> spatial_tables(const SpatialResult& r) {
    Table t{"spatial", {"m", "p", "cells", "h", "delta", "vortices", "error"}, {}};
    for (const auto& p : r.points)
        t.add_row({Value{std::int64_t{p.m}}, Value{std::int64_t{p.p}}, Value{std::int64_t{p.cells}}, p.h,
                   p.delta, int_value(p.vortices), p.error});
    return {t, fits_table(r.fits)};
}

// ---------------------------------------------------------------------------

std::vector<TimingRow> timing(const Common& cfg, const TimingConfig& tc) {
    std::vector<TimingRow> rows;
    for (std::uint64_t seed : tc.seeds) {
        const GridSetup g = random_system(cfg.vortices, order_from_int(cfg.m), seed);
        std::map<MethodKind, std::size_t> steps;
        for (MethodKind k : tc.methods) steps[k] = cfg.steps;

        if (tc.mode == TimingMode::matched_time && cfg.steps > 0) {
            // Per-step cost from a short calibration run of each method.
            const std::size_t calib = std::max<std::size_t>(1, std::min<std::size_t>(cfg.steps, 1000));
            IntegrateOptions quiet;
            quiet.sample_conserved = false;
            auto per_step = [&](MethodKind k) {
                const RunRecord r = integrate(g.system, g.state, cfg.tau, calib, cfg.make_method(k), quiet);
                return std::max(r.wall_seconds, 1e-9) / static_cast<double>(calib);
            };
            const double budget = per_step(tc.reference) * static_cast<double>(cfg.steps);
            for (MethodKind k : tc.methods) {
                if (k == tc.reference) continue;
                steps[k] = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(budget / per_step(k))));
            }
        }

        for (MethodKind k : tc.methods) {
            const RunRecord rec = integrate(g.system, g.state, cfg.tau, steps[k], cfg.make_method(k), sampling(1));
            const DriftSeries d = drift_series(rec);
            rows.push_back({seed, k, steps[k], rec.wall_seconds, d.max_px(), d.max_py(), d.max_ell(), d.max_ham()});
        }
    }
    return rows;
}

Table timing_table(const std::vector<TimingRow>& rows) {
    Table t{"timing", {"seed", "method", "steps", "wall_seconds", "max_d_px", "max_d_py", "max_d_ell", "max_d_ham"}, {}};
    for (const auto& r : rows)
        t.add_row({static_cast<std::int64_t>(r.seed), str(vblob::to_string(r.method)), int_value(r.steps),
                   r.wall_seconds, r.px, r.py, r.ell, r.ham});
    return t;
}

// ---------------------------------------------------------------------------

std::vector<E1Row> e1_table(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi >= lo)) throw ConfigError("e1 range needs 0 < lo <= hi");
    std::vector<E1Row> rows;
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t k = 0; k < count; ++k) {
        double x = lo;
        if (k + 1 == count && count > 1)
            x = hi;
        else if (k > 0)
            x = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1));
        const double v = exp_integral_e1(x);
        const double r = e1_reference(x);
        rows.push_back({x, v, r, std::abs(v - r) / r});
    }
    return rows;
}

Table e1_rows_table(const std::vector<E1Row>& rows) {
    Table t{"e1", {"x", "regime", "value", "reference", "rel_error"}, {}};
    for (const auto& r : rows) {
        std::string regime;
        switch (e1_regime(r.x).kind) {
            case E1Kind::series: regime = "series"; break;
            case E1Kind::rational: regime = "rational"; break;
            case E1Kind::asymptotic_cutoff: regime = "cutoff"; break;
        }
        t.add_row({r.x, regime, r.value, r.reference, r.rel_error});
    }
    return t;
}

}  // namespace vblob::experiments
