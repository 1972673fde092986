#include "nldp/cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "nldp/config.hpp"
#include "nldp/energy.hpp"
#include "nldp/errors.hpp"
#include "nldp/grid.hpp"
#include "nldp/regularity.hpp"
#include "nldp/solver.hpp"

namespace nldp {

namespace {

std::string fmt_d(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string resolve_out_dir(const ExperimentConfig& cfg,
                            const std::optional<std::string>& override_dir) {
    if (override_dir) return *override_dir;
    if (const char* env = std::getenv("NLDP_OUT"); env && *env) return env;
    return cfg.out_dir;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write \"" + path + "\"");
    return out;
}

// ctx and datum point at grid, so the struct must stay put once built.
struct Runtime {
    ExperimentConfig cfg;
    Grid grid;
    EnergyContext ctx;
    DiscreteFunction datum;
    std::string out_dir;

    Runtime(const std::string& config_path,
            const std::optional<std::string>& out_override,
            std::optional<std::uint64_t> seed_override)
        : cfg(load_config(config_path)) {
        if (seed_override) {
            cfg.seed = *seed_override;
            cfg.solver.seed = *seed_override;
        }
        // the override relocates files without entering the echo: reruns into
        // different directories stay byte-identical
        out_dir = resolve_out_dir(cfg, out_override);
        grid = make_grid(cfg.problem);
        auto ec = make_exponents(cfg.problem);
        ctx = make_context(grid, ec, make_coefficient(cfg.problem.coefficient),
                           make_kernels(cfg.problem.kernel, ec));
        datum = make_datum(cfg.problem.datum, grid);
        std::filesystem::create_directories(out_dir);
        auto echo = open_out(out_dir + "/config_echo.json");
        echo << echo_config(cfg);
    }
    Runtime(const Runtime&) = delete;
    Runtime& operator=(const Runtime&) = delete;
};

// One verify_report.jsonl line. Every check type fills the same fields; the
// reading per type is documented in docs/formats.md.
struct CheckLine {
    std::string check;
    bool passed = false;
    double lhs = 0, rhs = 0, implied_constant = 0, ceiling = 0;
    bool advisory = false;
    std::string error;
};

void write_line(std::ostream& out, const CheckLine& l) {
    out << "{\"check\": \"" << l.check << "\", \"passed\": "
        << (l.passed ? "true" : "false") << ", \"lhs\": " << fmt_d(l.lhs)
        << ", \"rhs\": " << fmt_d(l.rhs)
        << ", \"implied_constant\": " << fmt_d(l.implied_constant)
        << ", \"ceiling\": " << fmt_d(l.ceiling)
        << ", \"advisory\": " << (l.advisory ? "true" : "false") << ", \"error\": \"";
    for (char c : l.error) {
        if (c == '"' || c == '\\') out << '\\';
        if (c == '\n') {
            out << "\\n";
            continue;
        }
        out << c;
    }
    out << "\"}\n";
}

CheckLine ratio_line(const CheckSpec& spec, const InequalityReport& rep) {
    CheckLine l;
    l.check = spec.type;
    l.lhs = rep.lhs;
    l.rhs = rep.rhs;
    l.implied_constant = rep.implied_constant;
    l.ceiling = spec.ceiling;
    l.advisory = rep.advisory;
    l.passed = rep.lhs <= spec.ceiling * rep.rhs;
    return l;
}

CheckLine run_check(const Runtime& rt, const CheckSpec& spec,
                    const DiscreteFunction& u, std::size_t index) {
    const Grid& g = rt.grid;
    if (spec.type == "maximum-principle") {
        auto rep = maximum_principle_check(u, rt.datum);
        double lo = 0, hi = 0;
        bool any = false;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!g.interior[i]) continue;
            lo = any ? std::min(lo, u.values[i]) : u.values[i];
            hi = any ? std::max(hi, u.values[i]) : u.values[i];
            any = true;
        }
        CheckLine l;
        l.check = spec.type;
        l.lhs = any ? std::max({0.0, rep.inf_datum - lo, hi - rep.sup_datum}) : 0.0;
        l.rhs = rep.tol;
        l.implied_constant = l.rhs == 0 ? 0 : l.lhs / l.rhs;
        l.ceiling = 1.0;
        l.passed = rep.min_ok && rep.max_ok;
        return l;
    }
    if (spec.type == "caccioppoli") {
        const Point c = spec.x0;
        const double w = spec.cutoff_half_width;
        auto phi = sample_function(
            g,
            [c, w, &g](const Point& x) {
                return std::max(0.0, 1.0 - distance(g.n, x, c) / w);
            },
            0.0);
        auto rep = caccioppoli_check(rt.ctx, u, spec.x0, spec.r, spec.level,
                                     spec.sign == "plus" ? TruncationSign::Plus
                                                         : TruncationSign::Minus,
                                     phi);
        return ratio_line(spec, rep);
    }
    if (spec.type == "levelset") {
        auto ys = levelset_sequence(rt.ctx, u, spec.x0, spec.r, spec.level, spec.imax);
        auto csv = open_out(rt.out_dir + "/levelset_" + std::to_string(index) + ".csv");
        csv << "i,y\n";
        for (std::size_t i = 0; i < ys.size(); ++i)
            csv << i << "," << fmt_d(ys[i]) << "\n";
        CheckLine l;
        l.check = spec.type;
        l.lhs = ys.back();
        l.rhs = ys.front();
        l.implied_constant = l.rhs == 0 ? 0 : l.lhs / l.rhs;
        l.ceiling = spec.ceiling;
        l.passed = true;
        for (std::size_t i = 1; i < ys.size(); ++i)
            if (ys[i] > ys[i - 1]) l.passed = false;
        return l;
    }
    if (spec.type == "log-estimate") {
        auto rep = log_estimate_check(rt.ctx, u, spec.x0, spec.outer_radius, spec.r,
                                      spec.lift);
        return ratio_line(spec, rep);
    }
    if (spec.type == "log-excess") {
        auto rep = log_excess_check(rt.ctx, u, spec.x0, spec.outer_radius, spec.r,
                                    spec.lift, spec.level, spec.cap_base);
        return ratio_line(spec, rep);
    }
    if (spec.type == "oscillation") {
        auto tr = oscillation_sequence(u, spec.x0, spec.r, spec.sigma, spec.imax);
        auto csv =
            open_out(rt.out_dir + "/oscillation_" + std::to_string(index) + ".csv");
        csv << "j,radius,omega\n";
        for (std::size_t j = 0; j < tr.radii.size(); ++j)
            csv << j << "," << fmt_d(tr.radii[j]) << "," << fmt_d(tr.omega[j]) << "\n";
        CheckLine l;
        l.check = spec.type;
        l.lhs = tr.gamma_fit;
        l.rhs = spec.min_gamma;
        l.implied_constant = tr.gamma_fit;
        l.ceiling = spec.ceiling;
        l.passed = tr.gamma_fit >= spec.min_gamma;
        return l;
    }
    if (spec.type == "k0-bound") {
        const double v = k0_quantity(rt.ctx, u, spec.x0, spec.r);
        CheckLine l;
        l.check = spec.type;
        l.lhs = v;
        l.rhs = spec.ceiling;
        l.implied_constant = spec.ceiling == 0 ? 0 : v / spec.ceiling;
        l.ceiling = spec.ceiling;
        l.passed = std::isfinite(v) && (spec.ceiling <= 0 || v <= spec.ceiling);
        return l;
    }
    if (spec.type == "sobolev-poincare") {
        auto rep = sobolev_poincare_check(rt.ctx, u, spec.x0, spec.r,
                                          spec.variant == "sp" ? SPVariant::SP
                                                               : SPVariant::TQ);
        return ratio_line(spec, rep);
    }
    if (spec.type == "inclusion") {
        auto rep = inclusion_check(rt.ctx, u, ball_nodes(g, spec.x0, spec.r));
        return ratio_line(spec, rep);
    }
    if (spec.type == "support-mean") {
        auto rep = ineq1_check(rt.ctx, u, spec.x0, spec.r, spec.weight);
        return ratio_line(spec, rep);
    }
    // extrema-mean
    auto rep = ineq2_check(rt.ctx, u, spec.x0, spec.r, spec.outer_radius);
    return ratio_line(spec, rep);
}

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

int cmd_solve(const std::string& config_path,
              const std::optional<std::string>& out_override,
              std::optional<std::uint64_t> seed_override) {
    try {
        Runtime rt(config_path, out_override, seed_override);
        auto [u, rep] = minimize(rt.ctx, rt.datum, rt.cfg.solver);

        save_solution_csv(rt.grid, u, rt.out_dir + "/solution.csv");
        auto json = open_out(rt.out_dir + "/solve_report.json");
        json << "{\n  \"energy\": " << fmt_d(rep.energy)
             << ",\n  \"iters\": " << rep.iters
             << ",\n  \"grad_norm\": " << fmt_d(rep.grad_norm)
             << ",\n  \"converged\": " << (rep.converged ? "true" : "false") << "\n}\n";
        auto trace = open_out(rt.out_dir + "/energy_trace.csv");
        trace << "iter,energy\n";
        for (std::size_t i = 0; i < rep.energy_trace.size(); ++i)
            trace << i << "," << fmt_d(rep.energy_trace[i]) << "\n";

        if (!rep.converged) {
            std::cerr << "iteration cap reached before the gradient tolerance\n";
            return 2;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}

int cmd_verify(const std::string& config_path, const std::string& solution_path,
               const std::optional<std::string>& out_override,
               std::optional<std::uint64_t> seed_override) {
    try {
        Runtime rt(config_path, out_override, seed_override);
        auto u = load_solution_csv(rt.grid, solution_path);
        // the csv carries node values only; the exterior declaration is part
        // of the problem statement
        u.exterior_frozen = true;
        u.beyond_box = rt.datum.beyond_box;

        auto report = open_out(rt.out_dir + "/verify_report.jsonl");
        bool all_passed = true;
        for (std::size_t i = 0; i < rt.cfg.checks.size(); ++i) {
            CheckLine line;
            try {
                line = run_check(rt, rt.cfg.checks[i], u, i);
            } catch (const Error& e) {
                line.check = rt.cfg.checks[i].type;
                line.ceiling = rt.cfg.checks[i].ceiling;
                line.passed = false;
                line.error = e.what();
            }
            if (!line.passed) all_passed = false;
            write_line(report, line);
        }
        return all_passed ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}

int cmd_sweep(const std::string& config_path,
              const std::optional<std::string>& out_override,
              std::optional<std::uint64_t> seed_override) {
    try {
        ExperimentConfig cfg = load_config(config_path);
        if (!cfg.sweep) throw ConfigError("the config carries no sweep block");
        if (seed_override) {
            cfg.seed = *seed_override;
            cfg.solver.seed = *seed_override;
        }
        const std::string out_dir = resolve_out_dir(cfg, out_override);
        std::filesystem::create_directories(out_dir);
        auto echo = open_out(out_dir + "/config_echo.json");
        echo << echo_config(cfg);

        auto csv = open_out(out_dir + "/sweep.csv");
        csv << "parameter,value,bounded_growth,holder_compatible,solved,converged,"
               "iters,energy,grad_norm,gamma_fit,error\n";
        const SweepConfig& sw = *cfg.sweep;
        std::size_t completed = 0;
        for (double v : sw.values) {
            // parameter,value,bounded_growth,holder_compatible,solved,converged,
            // iters,energy,grad_norm,gamma_fit,error
            std::array<std::string, 11> f{};
            f[0] = sw.parameter;
            f[1] = fmt_d(v);
            try {
                ProblemConfig pc = cfg.problem;
                if (sw.parameter == "q")
                    pc.q = v;
                else if (sw.parameter == "alpha")
                    pc.alpha = v;
                else
                    pc.h = v;
                auto ec = make_exponents(pc);
                f[2] = check_boundedness_assumption(ec) ? "1" : "0";
                auto coeff = make_coefficient(pc.coefficient);
                std::optional<double> alpha = pc.alpha;
                if (!alpha && coeff.holder) alpha = coeff.holder->alpha;
                if (alpha) f[3] = check_holder_assumption(ec, *alpha) ? "1" : "0";

                f[4] = "0";
                if (sw.solve) {
                    Grid g = make_grid(pc);
                    auto ctx = make_context(g, ec, coeff, make_kernels(pc.kernel, ec));
                    auto datum = make_datum(pc.datum, g);
                    auto [u, rep] = minimize(ctx, datum, cfg.solver);
                    f[4] = "1";
                    f[5] = rep.converged ? "1" : "0";
                    f[6] = std::to_string(rep.iters);
                    f[7] = fmt_d(rep.energy);
                    f[8] = fmt_d(rep.grad_norm);
                    if (sw.r > 0) {
                        auto tr = oscillation_sequence(u, sw.x0, sw.r, sw.sigma, sw.jmax);
                        f[9] = fmt_d(tr.gamma_fit);
                    }
                }
                ++completed;
            } catch (const Error& e) {
                if (f[4].empty()) f[4] = "0";
                f[10] = csv_quote(e.what());
            }
            for (std::size_t k = 0; k < f.size(); ++k)
                csv << f[k] << (k + 1 < f.size() ? "," : "\n");
        }
        return completed > 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}

int cmd_iterate_demo(double y0, double b1, double b2, double beta, std::size_t imax) {
    try {
        auto rep = degiorgi_iteration(y0, b1, b2, beta, imax);
        std::printf("i,y,threshold\n");
        for (std::size_t i = 0; i < rep.trace.size(); ++i)
            std::printf("%zu,%s,%s\n", i, fmt_d(rep.trace[i]).c_str(),
                        fmt_d(rep.threshold).c_str());
        return 0;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}

} // namespace nldp
