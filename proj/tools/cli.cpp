#include "cli.hpp"

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vblob/errors.hpp"
#include "vblob/experiments.hpp"

namespace vblob::cli {

namespace ex = vblob::experiments;

namespace {

template <class T>
std::vector<T> parse_list(const std::string& text) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::stringstream conv(item);
        T v;
        if (!(conv >> v) || !conv.eof()) throw ConfigError("bad list entry '" + item + "'");
        out.push_back(v);
    }
    return out;
}

std::vector<vblob::MethodKind> parse_methods(const std::string& text) {
    std::vector<vblob::MethodKind> out;
    for (const auto& name : parse_list<std::string>(text)) out.push_back(method_from_string(name));
    return out;
}

struct Options {
    ex::Common common;
    std::string method = "dmm";
    std::string deterministic = "on";
    std::string problem = "grid";
    std::string out_dir;

    std::string methods = "rm2,rm4,imm,dmm";
    std::string cells_list;
    std::string orders = "2,4,6";
    std::string taus;
    std::optional<double> final_time;
    double kappa = 0.125;
    double delta = 1.0;
    int p_sixth = 15;
    int radial_panels = 16;
    int angular_nodes = 64;
    std::string seeds = "1,2,3,4,5";
    std::string mode = "fixed";
    double lo = 1e-12;
    double hi = 34.0;
    std::size_t count = 1000;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--cells", o.common.cells, "Cells per side of the [-1,1]^2 grid")->check(CLI::PositiveNumber);
    cmd->add_option("--m", o.common.m, "Kernel order")->check(CLI::IsMember({2, 4, 6}));
    cmd->add_option("--q", o.common.q, "Smoothing exponent, delta = h^q")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--p", o.common.p, "Vorticity exponent")->check(CLI::PositiveNumber);
    cmd->add_option("--tau", o.common.tau, "Time step")->check(CLI::PositiveNumber);
    cmd->add_option("--steps", o.common.steps, "Number of time steps");
    cmd->add_option("--method", o.method, "Integrator")->check(CLI::IsMember({"dmm", "imm", "rm2", "rm4", "rk4"}));
    cmd->add_option("--tol", o.common.tol, "Fixed-point tolerance (max-norm update)")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iters", o.common.max_iters, "Fixed-point iteration cap")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.common.seed, "Seed for random problems");
    cmd->add_option("--out", o.out_dir, "Output directory (default: print tables to stdout)");
    cmd->add_option("--deterministic", o.deterministic, "Sequential pair summation")->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--problem", o.problem, "Initial configuration")->check(CLI::IsMember({"grid", "ring", "random"}));
    cmd->add_option("--vortices", o.common.vortices, "Vortex count for --problem random")->check(CLI::PositiveNumber);
    cmd->add_option("--stride", o.common.stride, "Sampling stride in steps")->check(CLI::PositiveNumber);
}

void finalize(Options& o) {
    o.common.method = method_from_string(o.method);
    o.common.deterministic = o.deterministic == "on";
    o.common.problem = ex::problem_from_string(o.problem);
}

void emit(std::ostream& out, const Options& o, const std::vector<ex::Table>& tables,
          const ex::Manifest& manifest) {
    if (!o.out_dir.empty()) {
        ex::write_outputs(o.out_dir, tables, manifest);
        return;
    }
    for (std::size_t i = 0; i < tables.size(); ++i) {
        if (i) out << '\n';
        out << ex::to_csv(tables[i], manifest);
    }
}

}  // namespace

int exit_code_for(std::exception_ptr error, std::ostream& err) {
    try {
        std::rethrow_exception(error);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const SolverFailure& e) {
        err << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    } catch (const PairDegeneracyError& e) {
        err << "degeneracy: " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitOther;
    } catch (...) {
        err << "error: unknown exception\n";
        return kExitOther;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Vortex-blob experiments"};
    app.require_subcommand(1);
    Options o;

    auto* simulate = app.add_subcommand("simulate", "Run one trajectory and tabulate invariant drift");
    auto* conservation = app.add_subcommand("conservation", "Invariant drift for several methods");
    auto* temporal = app.add_subcommand("temporal-order", "Time-step sweep on the four-vortex ring");
    auto* spatial = app.add_subcommand("spatial-order", "Grid sweep of the L2 velocity error");
    auto* timing = app.add_subcommand("timing", "Wall time and drift on random systems");
    auto* e1 = app.add_subcommand("e1-table", "Audit the exponential integral");

    for (auto* cmd : {simulate, conservation, temporal, spatial, timing, e1}) add_common(cmd, o);

    conservation->add_option("--methods", o.methods, "Comma-separated methods");
    conservation->add_option("--cells-list", o.cells_list,
                             "Comma-separated grid sweep: report |L^N - L| and |H^N - H| instead of drift");

    temporal->add_option("--orders", o.orders, "Comma-separated kernel orders");
    temporal->add_option("--taus", o.taus, "Comma-separated time steps")->default_str("0.5,0.25,0.125,0.0625");
    temporal->add_option("--T", o.final_time, "Final time")->default_str("10");
    temporal->add_option("--kappa", o.kappa, "Ring vortex strength");
    temporal->add_option("--delta", o.delta, "Ring smoothing parameter")->check(CLI::PositiveNumber);

    spatial->add_option("--orders", o.orders, "Comma-separated kernel orders");
    spatial->add_option("--cells-list", o.cells_list, "Grid sweep applied to every order (default per order)");
    spatial->add_option("--T", o.final_time, "Final time")->default_str("0.001");
    spatial->add_option("--p-sixth", o.p_sixth, "Vorticity exponent used for m = 6")->check(CLI::PositiveNumber);
    spatial->add_option("--radial-panels", o.radial_panels, "Gauss-Legendre panels")->check(CLI::PositiveNumber);
    spatial->add_option("--angular-nodes", o.angular_nodes, "Angular nodes")->check(CLI::PositiveNumber);

    timing->add_option("--methods", o.methods, "Comma-separated methods");
    timing->add_option("--seeds", o.seeds, "Comma-separated seeds");
    timing->add_option("--mode", o.mode, "fixed: same step count; matched: equalize wall time")
        ->check(CLI::IsMember({"fixed", "matched"}));

    e1->add_option("--lo", o.lo, "Smallest x")->check(CLI::PositiveNumber);
    e1->add_option("--hi", o.hi, "Largest x")->check(CLI::PositiveNumber);
    e1->add_option("--count", o.count, "Number of log-uniform samples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        finalize(o);
        ex::Common& c = o.common;

        if (simulate->parsed()) {
            const auto r = ex::simulate(c);
            emit(out, o, ex::simulate_tables(r), c.manifest("simulate"));
        } else if (conservation->parsed()) {
            const auto methods = parse_methods(o.methods);
            auto manifest = c.manifest("conservation");
            manifest.emplace_back("methods", o.methods);
            if (!o.cells_list.empty()) {
                manifest.emplace_back("cells_list", o.cells_list);
                const auto pts = ex::conserved_convergence(c, parse_list<int>(o.cells_list), methods);
                emit(out, o, {ex::convergence_table(pts)}, manifest);
            } else {
                emit(out, o, ex::conservation_tables(ex::conservation(c, methods)), manifest);
            }
        } else if (temporal->parsed()) {
            ex::TemporalConfig tc;
            tc.orders = parse_list<int>(o.orders);
            if (!o.taus.empty()) tc.taus = parse_list<double>(o.taus);
            if (o.final_time) tc.final_time = *o.final_time;
            tc.kappa = o.kappa;
            tc.delta = o.delta;
            auto manifest = c.manifest("temporal-order");
            manifest.emplace_back("orders", o.orders);
            manifest.emplace_back("taus", o.taus.empty() ? "0.5,0.25,0.125,0.0625" : o.taus);
            manifest.emplace_back("T", tc.final_time);
            manifest.emplace_back("kappa", tc.kappa);
            manifest.emplace_back("delta", tc.delta);
            emit(out, o, ex::temporal_tables(ex::temporal_order(c, tc)), manifest);
        } else if (spatial->parsed()) {
            ex::SpatialConfig sc;
            sc.orders = parse_list<int>(o.orders);
            if (!o.cells_list.empty())
                for (int m : sc.orders) sc.cells.emplace_back(m, parse_list<int>(o.cells_list));
            if (o.final_time) sc.final_time = *o.final_time;
            if (spatial->count("--tau")) sc.tau = c.tau;
            sc.p_sixth = o.p_sixth;
            sc.radial_panels = o.radial_panels;
            sc.angular_nodes = o.angular_nodes;
            auto manifest = c.manifest("spatial-order");
            manifest.emplace_back("orders", o.orders);
            manifest.emplace_back("cells_list", o.cells_list.empty() ? "default" : o.cells_list);
            manifest.emplace_back("T", sc.final_time);
            manifest.emplace_back("spatial_tau", sc.tau);
            manifest.emplace_back("p_sixth", std::int64_t{sc.p_sixth});
            manifest.emplace_back("radial_panels", std::int64_t{sc.radial_panels});
            manifest.emplace_back("angular_nodes", std::int64_t{sc.angular_nodes});
            emit(out, o, ex::spatial_tables(ex::spatial_order(c, sc)), manifest);
        } else if (timing->parsed()) {
            ex::TimingConfig tc;
            tc.methods = parse_methods(o.methods);
            tc.seeds = parse_list<std::uint64_t>(o.seeds);
            tc.mode = o.mode == "matched" ? ex::TimingMode::matched_time : ex::TimingMode::fixed_steps;
            if (!timing->count("--m")) c.m = 2;
            auto manifest = c.manifest("timing");
            manifest.emplace_back("methods", o.methods);
            manifest.emplace_back("seeds", o.seeds);
            manifest.emplace_back("mode", o.mode);
            emit(out, o, {ex::timing_table(ex::timing(c, tc))}, manifest);
        } else if (e1->parsed()) {
            auto manifest = ex::Manifest{{"command", std::string("e1-table")},
                                         {"lo", o.lo},
                                         {"hi", o.hi},
                                         {"count", static_cast<std::int64_t>(o.count)}};
            if (o.hi < o.lo) throw ConfigError("--hi must not be below --lo");
            emit(out, o, {ex::e1_rows_table(ex::e1_table(o.lo, o.hi, o.count))}, manifest);
        }
    } catch (...) {
        return exit_code_for(std::current_exception(), err);
    }
    return kExitOk;
}

}  // namespace vblob::cli
