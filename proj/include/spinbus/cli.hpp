#pragma once

// Command-line front end. Exit codes: 0 success, 1 I/O failure, 2 invalid
// input. Data outputs are deterministic; wall time goes to a sidecar
// "<output>.meta.json" when --output is given.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinbus/dynamics.hpp"
#include "spinbus/entanglement.hpp"
#include "spinbus/graph_io.hpp"
#include "spinbus/optimizer.hpp"
#include "spinbus/report.hpp"
#include "spinbus/symmetry.hpp"

namespace spinbus::cli {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Format { Json, Csv };

struct Options {
    std::string output;
    std::string format;  // empty: the command's default

    std::string graph;
    std::vector<std::string> pairs;
    std::string pair;
    double t_max = 10.0;
    std::size_t steps = 1000;

    SiteId mu = 0;
    std::optional<SiteId> nu;
    double alpha = 1.0;
    double phase = 0.0;
    double horizon = 40.0;
    std::string method = "closed-form";

    std::size_t ring = 5;
    double coupling = 1.0;
    SiteId source = 0;
    SiteId target = 1;
    std::size_t flux_points = 512;
    std::size_t time_points = 4096;
    std::size_t refine_points = 64;
    std::optional<double> flux_horizon;
    bool keep_flux = false;
    bool mu_given = false;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline SitePair parse_pair(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw Error(ErrorKind::InvalidInput, "pair \"" + text + "\" must look like i:j");
    try {
        std::size_t used_a = 0, used_b = 0;
        const auto a = std::stoul(text.substr(0, colon), &used_a);
        const auto b = std::stoul(text.substr(colon + 1), &used_b);
        if (used_a != colon || used_b != text.size() - colon - 1) throw std::invalid_argument(text);
        return {a, b};
    } catch (const std::logic_error&) {
        throw Error(ErrorKind::InvalidInput, "pair \"" + text + "\" must look like i:j");
    }
}

inline Format parse_format(const std::string& f, Format fallback) {
    if (f.empty()) return fallback;
    if (f == "json") return Format::Json;
    if (f == "csv") return Format::Csv;
    throw Error(ErrorKind::InvalidInput, "format must be json or csv");
}

inline void require_json(Format f, const char* cmd) {
    if (f != Format::Json) throw Error(ErrorKind::InvalidInput, std::string(cmd) + " only writes json");
}

inline void check_horizon(double horizon, std::size_t steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw Error(ErrorKind::InvalidInput, "time horizon must be > 0");
    if (steps < 2) throw Error(ErrorKind::InvalidInput, "steps must be >= 2");
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Subcommands --------------------------------------------------------------

inline std::string cmd_amplitudes(const Options& o, Format fmt) {
    const auto g = parse_graph(read_file(o.graph));
    check_horizon(o.t_max, o.steps);
    std::vector<SitePair> pairs;
    for (const auto& p : o.pairs) pairs.push_back(parse_pair(p));
    if (pairs.empty()) throw Error(ErrorKind::InvalidInput, "--pairs needs at least one i:j");
    const auto p = diagonalize(g);
    const auto times = uniform_grid(0.0, o.t_max, o.steps);
    const auto rows = amplitude_series(p, times, pairs);
    if (fmt == Format::Csv) {
        std::ostringstream os;
        write_amplitude_csv(os, rows);
        return os.str();
    }
    auto arr = json::array();
    for (const auto& r : rows) {
        arr.push_back({{"t", real_json(r.t)}, {"i", r.i}, {"j", r.j}, {"f", complex_json(r.f)}, {"abs2", real_json(r.abs2)}});
    }
    return dump({{"n_sites", g.n_sites()}, {"rows", std::move(arr)}});
}

inline std::string cmd_simulate(const Options& o, Format fmt) {
    const auto g = parse_graph(read_file(o.graph));
    check_horizon(o.t_max, o.steps);
    const auto target = parse_pair(o.pair);
    const auto e = o.nu ? Encoding::from_polar(o.mu, *o.nu, o.alpha, o.phase) : Encoding::single(o.mu);
    const auto p = diagonalize(g);
    const auto times = uniform_grid(0.0, o.t_max, o.steps);
    std::vector<PairAmplitudes> rows(times.size());
    parallel_for(times.size(), [&](std::size_t k) { rows[k] = pair_amplitudes(p.amplitudes(times[k]), e, target.i, target.j); });
    if (fmt == Format::Csv) {
        std::ostringstream os;
        os << "t,m,n,re_A,im_A,re_B,im_B,concurrence\n";
        for (const auto& r : rows) {
            os << format_real(r.t) << ',' << r.m << ',' << r.n << ',' << format_real(r.A.real()) << ','
               << format_real(r.A.imag()) << ',' << format_real(r.B.real()) << ',' << format_real(r.B.imag()) << ','
               << format_real(concurrence_closed_form(r)) << '\n';
        }
        return os.str();
    }
    auto arr = json::array();
    for (const auto& r : rows) {
        arr.push_back({{"t", real_json(r.t)}, {"A", complex_json(r.A)}, {"B", complex_json(r.B)},
                       {"concurrence", real_json(concurrence_closed_form(r))}});
    }
    return dump({{"encoding", {{"mu", e.mu()}, {"nu", e.nu()}, {"alpha", complex_json(e.alpha())}, {"beta", complex_json(e.beta())}}},
                 {"target", {target.i, target.j}},
                 {"rows", std::move(arr)}});
}

inline std::string cmd_optimize(const Options& o, Format fmt) {
    require_json(fmt, "optimize");
    const auto g = parse_graph(read_file(o.graph));
    check_horizon(o.horizon, o.steps);
    if (!o.nu) throw Error(ErrorKind::InvalidInput, "optimize needs --nu");
    const auto target = parse_pair(o.pair);
    const auto p = diagonalize(g);
    EncodingOptimum best;
    if (o.method == "closed-form") {
        best = optimize_over_time(p, o.mu, *o.nu, target.i, target.j, o.horizon, o.steps);
    } else if (o.method == "grid") {
        const auto times = uniform_grid(0.0, o.horizon, o.steps);
        std::vector<EncodingOptimum> results(times.size());
        parallel_for(times.size(), [&](std::size_t k) {
            results[k] = optimal_encoding_grid(p.amplitudes(times[k]), o.mu, *o.nu, target.i, target.j);
        });
        best = results.front();
        for (const auto& r : results) {
            if (r.C > best.C + kTieTolerance) best = r;
        }
    } else {
        throw Error(ErrorKind::InvalidInput, "method must be closed-form or grid");
    }
    const Encoding e(o.mu, *o.nu, best.alpha, best.beta);
    const auto terms = four_term_decomposition(p.amplitudes(best.t), e, target.i, target.j);
    return dump({{"inputs", {{"graph", graph_to_json(g)}, {"mu", o.mu}, {"nu", *o.nu}, {"target", {target.i, target.j}}}},
                 {"budgets", {{"horizon", real_json(o.horizon)}, {"steps", o.steps}, {"method", o.method}}},
                 {"best", best},
                 {"initial_concurrence", real_json(e.initial_concurrence())},
                 {"four_terms", terms}});
}

inline FluxSearchBudget flux_budget(const Options& o) {
    if (o.flux_points < 1 || o.time_points < 2) throw Error(ErrorKind::InvalidInput, "flux/time grids too small");
    return {o.flux_points, o.time_points, o.refine_points};
}

inline double flux_horizon(const Options& o) {
    if (o.coupling == 0.0 || !std::isfinite(o.coupling)) throw Error(ErrorKind::InvalidInput, "coupling must be nonzero");
    const double h = o.flux_horizon.value_or(40.0 / std::abs(o.coupling));
    if (!(h > 0.0)) throw Error(ErrorKind::InvalidInput, "time horizon must be > 0");
    return h;
}

inline std::string cmd_scan_flux(const Options& o, Format fmt) {
    require_json(fmt, "scan-flux");
    const auto budget = flux_budget(o);
    const double horizon = flux_horizon(o);
    const auto r = flux_transfer_search(o.ring, o.coupling, o.source, o.target, budget, horizon);
    return dump({{"inputs", {{"n", o.ring}, {"J", real_json(o.coupling)}, {"source", o.source}, {"target", o.target}}},
                 {"budgets", {{"flux_points", budget.flux_points}, {"time_points", budget.time_points},
                              {"refine_points", budget.refine_points}, {"time_horizon", real_json(horizon)}}},
                 {"result", r}});
}

inline std::string cmd_plan(const Options& o, Format fmt) {
    require_json(fmt, "plan");
    const auto target = parse_pair(o.pair);
    PlanBudget b;
    b.transfer = flux_budget(o);
    b.transfer_horizon = flux_horizon(o);
    b.evolution_points = o.time_points;
    b.evolution_horizon = b.transfer_horizon;
    b.keep_flux = o.keep_flux;
    const auto plan = plan_targeting(o.ring, o.coupling, o.mu, target.i, target.j, b);
    return dump({{"budgets", {{"flux_points", b.transfer.flux_points}, {"time_points", b.transfer.time_points},
                              {"refine_points", b.transfer.refine_points}, {"time_horizon", real_json(*b.transfer_horizon)},
                              {"keep_flux", b.keep_flux}}},
                 {"plan", plan}});
}

inline std::string cmd_symmetry(const Options& o, Format fmt) {
    require_json(fmt, "symmetry");
    const auto g = parse_graph(read_file(o.graph));
    const auto involutions = find_involutions(g);
    auto listed = json::array();
    for (const auto& inv : involutions) {
        if (!inv.is_identity()) listed.push_back(inv);
    }
    json report = {{"n_sites", g.n_sites()}, {"involutions", std::move(listed)}};
    if (o.mu_given) {
        auto cov = json::array();
        for (const auto& [a, b] : counterpart_coverage(involutions, o.mu)) cov.push_back({a, b});
        report["coverage"] = {{"mu", o.mu}, {"pairs", std::move(cov)}};
    }
    if (!o.pair.empty()) {
        if (!o.mu_given) throw Error(ErrorKind::InvalidInput, "classification needs --mu");
        check_horizon(o.horizon, o.steps);
        const auto target = parse_pair(o.pair);
        const auto cls = classify(g, o.mu, o.nu, target.i, target.j, involutions);
        report["classification"] = cls;
        if (cls.kind != SymmetryClass::None) {
            const auto p = diagonalize(g);
            const auto tmax = max_amplitude_over_time(p, target.i, o.mu, o.horizon, o.steps);
            report["prediction"] = predicted_cmax(cls, p, tmax.x);
        } else {
            report["prediction"] = nullptr;
        }
    }
    return dump(report);
}

// Entry point --------------------------------------------------------------

inline int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Entanglement distribution through unmodulated spin graphs", "spinbus"};
    app.require_subcommand(1);
    Options o;
    std::optional<SiteId> nu;
    std::optional<SiteId> mu;

    auto common = [&](CLI::App* sub) {
        sub->add_option("-o,--output", o.output, "Output file (default stdout)");
        sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    };
    auto flux_opts = [&](CLI::App* sub) {
        sub->add_option("--n", o.ring, "Ring size")->required();
        sub->add_option("--J", o.coupling, "Coupling");
        sub->add_option("--flux-points", o.flux_points, "Flux grid points over [0,1)");
        sub->add_option("--time-points", o.time_points, "Time grid points");
        sub->add_option("--refine-points", o.refine_points, "Local refinement points per axis");
        sub->add_option("--horizon", o.flux_horizon, "Time horizon (default 40/|J|)");
    };

    auto* amplitudes = app.add_subcommand("amplitudes", "Transition amplitude traces f_ij(t)");
    common(amplitudes);
    amplitudes->add_option("--graph", o.graph, "Graph JSON")->required();
    amplitudes->add_option("--pairs", o.pairs, "Site pairs i:j")->required()->delimiter(',');
    amplitudes->add_option("--t-max", o.t_max, "Last time");
    amplitudes->add_option("--steps", o.steps, "Number of time points");

    auto* simulate = app.add_subcommand("simulate", "Pair concurrence C_mn(t) for an encoding");
    common(simulate);
    simulate->add_option("--graph", o.graph, "Graph JSON")->required();
    simulate->add_option("--mu", mu, "Encoded site")->required();
    simulate->add_option("--nu", nu, "Second encoded site");
    simulate->add_option("--alpha", o.alpha, "|alpha| (beta = sqrt(1-|alpha|^2) e^{i phase})");
    simulate->add_option("--phase", o.phase, "Relative phase of beta");
    simulate->add_option("--pair", o.pair, "Target pair m:n")->required();
    simulate->add_option("--t-max", o.t_max, "Last time");
    simulate->add_option("--steps", o.steps, "Number of time points");

    auto* optimize = app.add_subcommand("optimize", "Best encoding and time for a target pair");
    common(optimize);
    optimize->add_option("--graph", o.graph, "Graph JSON")->required();
    optimize->add_option("--mu", mu, "First encoded site")->required();
    optimize->add_option("--nu", nu, "Second encoded site")->required();
    optimize->add_option("--pair", o.pair, "Target pair m:n")->required();
    optimize->add_option("--horizon", o.horizon, "Time horizon");
    optimize->add_option("--steps", o.steps, "Number of time points");
    optimize->add_option("--method", o.method, "closed-form or grid");

    auto* scan = app.add_subcommand("scan-flux", "Flux and time for excitation transfer on a ring");
    common(scan);
    flux_opts(scan);
    scan->add_option("--source", o.source, "Source site")->required();
    scan->add_option("--target", o.target, "Target site")->required();

    auto* plan = app.add_subcommand("plan", "Two-stage fixed-site targeting plan on a ring");
    common(plan);
    flux_opts(plan);
    plan->add_option("--mu", mu, "Excited site")->required();
    plan->add_option("--pair", o.pair, "Target pair m:n")->required();
    plan->add_flag("--keep-flux", o.keep_flux, "Keep the transfer flux on during stage 2");

    auto* symmetry = app.add_subcommand("symmetry", "Mirror involutions, coverage and class I/II");
    common(symmetry);
    symmetry->add_option("--graph", o.graph, "Graph JSON")->required();
    symmetry->add_option("--mu", mu, "Encoded site");
    symmetry->add_option("--nu", nu, "Second encoded site");
    symmetry->add_option("--pair", o.pair, "Target pair m:n");
    symmetry->add_option("--horizon", o.horizon, "Horizon for t*");
    symmetry->add_option("--steps", o.steps, "Time points for t*");

    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "spinbus: " << e.what() << "\n";
        return 2;
    }
    o.nu = nu;
    o.mu_given = mu.has_value();
    if (mu) o.mu = *mu;

    const auto start = std::chrono::steady_clock::now();
    std::string payload;
    std::string command;
    try {
        const Format fmt = parse_format(o.format, Format::Json);
        if (amplitudes->parsed()) {
            command = "amplitudes";
            payload = cmd_amplitudes(o, parse_format(o.format, Format::Csv));
        } else if (simulate->parsed()) {
            command = "simulate";
            payload = cmd_simulate(o, parse_format(o.format, Format::Csv));
        } else if (optimize->parsed()) {
            command = "optimize";
            payload = cmd_optimize(o, fmt);
        } else if (scan->parsed()) {
            command = "scan-flux";
            payload = cmd_scan_flux(o, fmt);
        } else if (plan->parsed()) {
            command = "plan";
            payload = cmd_plan(o, fmt);
        } else if (symmetry->parsed()) {
            command = "symmetry";
            payload = cmd_symmetry(o, fmt);
        }
    } catch (const IoError& e) {
        err << "spinbus: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        err << "spinbus: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "spinbus: " << e.what() << "\n";
        return 1;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (o.output.empty()) {
        out << payload;
        return 0;
    }
    std::ofstream file(o.output, std::ios::binary);
    if (!file || !(file << payload)) {
        err << "spinbus: cannot write " << o.output << "\n";
        return 1;
    }
    std::ofstream meta(o.output + ".meta.json", std::ios::binary);
    if (!meta || !(meta << json{{"command", command}, {"wall_time_s", wall}, {"threads", sweep_threads()}}.dump(2) << "\n")) {
        err << "spinbus: cannot write " << o.output << ".meta.json\n";
        return 1;
    }
    return 0;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace spinbus::cli
