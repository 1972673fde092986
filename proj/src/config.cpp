#include "nldp/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"

#include "nldp/errors.hpp"

namespace nldp {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void require_object(const json& j, const std::string& block) {
    if (!j.is_object()) fail("\"" + block + "\" must be an object");
}

void require_keys(const json& j, const std::string& block,
                  std::initializer_list<const char*> allowed) {
    require_object(j, block);
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) fail("unknown key \"" + it.key() + "\" in " + block);
    }
}

double get_num(const json& j, const char* key, const std::string& block,
               std::optional<double> def = {}) {
    if (!j.contains(key)) {
        if (def) return *def;
        fail("missing key \"" + std::string(key) + "\" in " + block);
    }
    if (!j.at(key).is_number())
        fail("key \"" + std::string(key) + "\" in " + block + " must be a number");
    return j.at(key).get<double>();
}

std::size_t get_count(const json& j, const char* key, const std::string& block,
                      std::optional<std::size_t> def = {}) {
    if (!j.contains(key)) {
        if (def) return *def;
        fail("missing key \"" + std::string(key) + "\" in " + block);
    }
    const json& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        fail("key \"" + std::string(key) + "\" in " + block +
             " must be a nonnegative integer");
    return v.get<std::size_t>();
}

bool get_bool(const json& j, const char* key, const std::string& block, bool def) {
    if (!j.contains(key)) return def;
    if (!j.at(key).is_boolean())
        fail("key \"" + std::string(key) + "\" in " + block + " must be a boolean");
    return j.at(key).get<bool>();
}

std::string get_str(const json& j, const char* key, const std::string& block,
                    std::optional<std::string> def = {}) {
    if (!j.contains(key)) {
        if (def) return *def;
        fail("missing key \"" + std::string(key) + "\" in " + block);
    }
    if (!j.at(key).is_string())
        fail("key \"" + std::string(key) + "\" in " + block + " must be a string");
    return j.at(key).get<std::string>();
}

Point get_point(const json& j, const char* key, const std::string& block,
                std::optional<Point> def = {}) {
    if (!j.contains(key)) {
        if (def) return *def;
        fail("missing key \"" + std::string(key) + "\" in " + block);
    }
    const json& v = j.at(key);
    if (!v.is_array() || v.empty() || v.size() > 2)
        fail("key \"" + std::string(key) + "\" in " + block +
             " must be an array of 1 or 2 numbers");
    Point p{0, 0};
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number())
            fail("key \"" + std::string(key) + "\" in " + block +
                 " must hold numbers only");
        p[i] = v[i].get<double>();
    }
    return p;
}

std::array<double, 2> get_pair(const json& j, const char* key, const std::string& block) {
    const Point p = get_point(j, key, block);
    if (!j.at(key).is_array() || j.at(key).size() != 2)
        fail("key \"" + std::string(key) + "\" in " + block + " must have 2 entries");
    return {p[0], p[1]};
}

void check_kind(const std::string& kind, const std::string& block,
                std::initializer_list<const char*> allowed) {
    for (const char* k : allowed)
        if (kind == k) return;
    fail("unknown kind \"" + kind + "\" in " + block);
}

OmegaConfig parse_omega(const json& j, int n) {
    require_object(j, "problem.omega");
    OmegaConfig oc;
    oc.kind = get_str(j, "kind", "problem.omega");
    check_kind(oc.kind, "problem.omega", {"interval", "box", "disk"});
    if (oc.kind == "disk")
        require_keys(j, "problem.omega", {"kind", "center", "radius"});
    else
        require_keys(j, "problem.omega", {"kind", "lo", "hi"});
    if (oc.kind == "interval") {
        if (n != 1) fail("omega kind \"interval\" needs dimension 1");
        oc.lo = get_num(j, "lo", "problem.omega");
        oc.hi = get_num(j, "hi", "problem.omega");
        if (!(oc.lo < oc.hi)) fail("omega interval needs lo < hi");
    } else if (oc.kind == "box") {
        if (n != 2) fail("omega kind \"box\" needs dimension 2");
        oc.lo2 = get_pair(j, "lo", "problem.omega");
        oc.hi2 = get_pair(j, "hi", "problem.omega");
        if (!(oc.lo2[0] < oc.hi2[0]) || !(oc.lo2[1] < oc.hi2[1]))
            fail("omega box needs lo < hi in each coordinate");
    } else {
        if (n != 2) fail("omega kind \"disk\" needs dimension 2");
        oc.center = get_pair(j, "center", "problem.omega");
        oc.radius = get_num(j, "radius", "problem.omega");
        if (!(oc.radius > 0)) fail("omega disk needs a positive radius");
    }
    return oc;
}

DatumSpec parse_datum(const json& j) {
    require_keys(j, "problem.datum",
                 {"kind", "value", "offset", "amplitude", "frequency", "phase",
                  "center", "half_width", "scale", "beyond"});
    DatumSpec d;
    d.kind = get_str(j, "kind", "problem.datum");
    check_kind(d.kind, "problem.datum", {"constant", "cosine", "tent", "runge"});
    d.value = get_num(j, "value", "problem.datum", 0.0);
    d.offset = get_num(j, "offset", "problem.datum", 0.0);
    d.amplitude = get_num(j, "amplitude", "problem.datum", 0.0);
    d.frequency = get_num(j, "frequency", "problem.datum", 1.0);
    d.phase = get_num(j, "phase", "problem.datum", 0.0);
    d.center = get_num(j, "center", "problem.datum", 0.0);
    d.half_width = get_num(j, "half_width", "problem.datum", 1.0);
    d.scale = get_num(j, "scale", "problem.datum", 1.0);
    d.beyond = get_num(j, "beyond", "problem.datum", 0.0);
    if (d.kind == "tent" && !(d.half_width > 0)) fail("tent datum needs half_width > 0");
    return d;
}

CoefficientSpec parse_coefficient(const json& j) {
    require_keys(j, "problem.coefficient", {"kind", "value", "alpha", "cap"});
    CoefficientSpec c;
    c.kind = get_str(j, "kind", "problem.coefficient");
    check_kind(c.kind, "problem.coefficient",
               {"constant", "zero", "cosine-product", "distance-power"});
    c.value = get_num(j, "value", "problem.coefficient", 0.0);
    c.alpha = get_num(j, "alpha", "problem.coefficient", 1.0);
    c.cap = get_num(j, "cap", "problem.coefficient", 1.0);
    if (c.kind == "constant" && !(c.value >= 0))
        fail("constant coefficient needs a nonnegative value");
    if (c.kind == "distance-power" && (!(c.alpha > 0) || c.alpha > 1 || !(c.cap > 0)))
        fail("distance-power coefficient needs alpha in (0,1] and cap > 0");
    return c;
}

KernelSpec parse_kernel(const json& j) {
    require_keys(j, "problem.kernel", {"kind", "lambda"});
    KernelSpec k;
    k.kind = get_str(j, "kind", "problem.kernel", std::string("model"));
    check_kind(k.kind, "problem.kernel", {"model", "perturbed"});
    k.lambda = get_num(j, "lambda", "problem.kernel", 1.0);
    if (k.kind == "perturbed" && !(k.lambda >= 1))
        fail("perturbed kernels need lambda >= 1");
    return k;
}

ProblemConfig parse_problem(const json& j) {
    require_keys(j, "problem",
                 {"n", "box_radius", "h", "omega", "exponents", "alpha",
                  "coefficient", "kernel", "datum"});
    ProblemConfig pc;
    const double nd = get_num(j, "n", "problem");
    if (nd != 1 && nd != 2) fail("problem.n must be 1 or 2");
    pc.n = int(nd);
    pc.box_radius = get_num(j, "box_radius", "problem");
    pc.h = get_num(j, "h", "problem");
    if (!(pc.box_radius > 0) || !(pc.h > 0))
        fail("problem needs box_radius > 0 and h > 0");
    if (!j.contains("omega")) fail("missing key \"omega\" in problem");
    pc.omega = parse_omega(j.at("omega"), pc.n);

    if (!j.contains("exponents")) fail("missing key \"exponents\" in problem");
    const json& e = j.at("exponents");
    require_keys(e, "problem.exponents", {"s", "t", "p", "q", "p_star_override"});
    pc.s = get_num(e, "s", "problem.exponents");
    pc.t = get_num(e, "t", "problem.exponents");
    pc.p = get_num(e, "p", "problem.exponents");
    pc.q = get_num(e, "q", "problem.exponents");
    if (e.contains("p_star_override"))
        pc.p_star_override = get_num(e, "p_star_override", "problem.exponents");

    if (j.contains("alpha")) pc.alpha = get_num(j, "alpha", "problem");
    pc.coefficient = j.contains("coefficient") ? parse_coefficient(j.at("coefficient"))
                                               : CoefficientSpec{};
    pc.kernel = j.contains("kernel") ? parse_kernel(j.at("kernel")) : KernelSpec{};
    if (!j.contains("datum")) fail("missing key \"datum\" in problem");
    pc.datum = parse_datum(j.at("datum"));
    return pc;
}

SolveOptions parse_solver(const json& j) {
    require_keys(j, "solver",
                 {"max_iters", "grad_tol", "initial_step", "shrink",
                  "sufficient_decrease", "precondition", "init", "initial_values"});
    SolveOptions o;
    o.max_iters = get_count(j, "max_iters", "solver", o.max_iters);
    o.grad_tol = get_num(j, "grad_tol", "solver", o.grad_tol);
    o.initial_step = get_num(j, "initial_step", "solver", o.initial_step);
    o.shrink = get_num(j, "shrink", "solver", o.shrink);
    o.sufficient_decrease = get_num(j, "sufficient_decrease", "solver",
                                    o.sufficient_decrease);
    o.precondition = get_bool(j, "precondition", "solver", o.precondition);
    const std::string init = get_str(j, "init", "solver", std::string("default"));
    if (init == "default")
        o.init = InitMode::Default;
    else if (init == "extend-datum")
        o.init = InitMode::ExtendDatum;
    else if (init == "zero-interior")
        o.init = InitMode::ZeroInterior;
    else if (init == "datum-mean")
        o.init = InitMode::DatumMean;
    else if (init == "random")
        o.init = InitMode::Random;
    else if (init == "given")
        o.init = InitMode::Given;
    else
        fail("unknown init mode \"" + init + "\" in solver");
    if (j.contains("initial_values")) {
        const json& v = j.at("initial_values");
        if (!v.is_array()) fail("solver.initial_values must be an array");
        for (const auto& x : v) {
            if (!x.is_number()) fail("solver.initial_values must hold numbers only");
            o.initial_values.push_back(x.get<double>());
        }
    }
    if (!(o.initial_step > 0) || !(o.shrink > 0) || o.shrink >= 1 ||
        !(o.sufficient_decrease > 0))
        fail("solver needs initial_step > 0, 0 < shrink < 1, sufficient_decrease > 0");
    return o;
}

CheckSpec parse_check(const json& j, std::size_t index) {
    const std::string block = "verify[" + std::to_string(index) + "]";
    require_keys(j, block,
                 {"check", "x0", "r", "outer_radius", "level", "sign",
                  "cutoff_half_width", "lift", "cap_base", "sigma", "imax", "weight",
                  "variant", "ceiling", "min_gamma"});
    CheckSpec c;
    c.type = get_str(j, "check", block);
    check_kind(c.type, block,
               {"maximum-principle", "caccioppoli", "levelset", "log-estimate",
                "log-excess", "oscillation", "k0-bound", "sobolev-poincare",
                "inclusion", "support-mean", "extrema-mean"});
    c.x0 = get_point(j, "x0", block, Point{0, 0});
    c.r = get_num(j, "r", block, 0.0);
    c.outer_radius = get_num(j, "outer_radius", block, 0.0);
    c.level = get_num(j, "level", block, 0.0);
    c.sign = get_str(j, "sign", block, std::string("plus"));
    check_kind(c.sign, block, {"plus", "minus"});
    c.cutoff_half_width = get_num(j, "cutoff_half_width", block, 0.0);
    c.lift = get_num(j, "lift", block, 0.0);
    c.cap_base = get_num(j, "cap_base", block, 0.0);
    c.sigma = get_num(j, "sigma", block, 0.25);
    c.imax = get_count(j, "imax", block, std::size_t{0});
    c.weight = get_num(j, "weight", block, 0.0);
    c.variant = get_str(j, "variant", block, std::string("sp"));
    check_kind(c.variant, block, {"sp", "tq"});
    c.ceiling = get_num(j, "ceiling", block, 1.0);
    c.min_gamma = get_num(j, "min_gamma", block, 0.0);
    return c;
}

SweepConfig parse_sweep(const json& j) {
    require_keys(j, "sweep",
                 {"parameter", "values", "solve", "x0", "r", "sigma", "jmax"});
    SweepConfig s;
    s.parameter = get_str(j, "parameter", "sweep");
    check_kind(s.parameter, "sweep", {"q", "alpha", "h"});
    if (!j.contains("values") || !j.at("values").is_array() || j.at("values").empty())
        fail("sweep.values must be a nonempty array of numbers");
    for (const auto& v : j.at("values")) {
        if (!v.is_number()) fail("sweep.values must hold numbers only");
        s.values.push_back(v.get<double>());
    }
    s.solve = get_bool(j, "solve", "sweep", false);
    s.x0 = get_point(j, "x0", "sweep", Point{0, 0});
    s.r = get_num(j, "r", "sweep", 0.0);
    s.sigma = get_num(j, "sigma", "sweep", 0.25);
    s.jmax = get_count(j, "jmax", "sweep", std::size_t{0});
    return s;
}

// ---- canonical emission -------------------------------------------------

void emit_d(std::string& out, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

void emit_str(std::string& out, const std::string& s) {
    out += '"';
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        if (ch == '\n') {
            out += "\\n";
            continue;
        }
        out += ch;
    }
    out += '"';
}

void emit_kv(std::string& out, int indent, const char* key, const std::string& raw,
             bool last = false) {
    out.append(std::size_t(indent), ' ');
    emit_str(out, key);
    out += ": ";
    out += raw;
    if (!last) out += ',';
    out += '\n';
}

std::string d_str(double v) {
    std::string s;
    emit_d(s, v);
    return s;
}

std::string point_str(const Point& p) {
    return "[" + d_str(p[0]) + ", " + d_str(p[1]) + "]";
}

std::string str_str(const std::string& s) {
    std::string out;
    emit_str(out, s);
    return out;
}

const char* init_name(InitMode m) {
    switch (m) {
        case InitMode::Default: return "default";
        case InitMode::ExtendDatum: return "extend-datum";
        case InitMode::ZeroInterior: return "zero-interior";
        case InitMode::DatumMean: return "datum-mean";
        case InitMode::Random: return "random";
        case InitMode::Given: return "given";
    }
    return "default";
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        fail(std::string("config is not valid JSON: ") + e.what());
    }
    require_keys(j, "top level", {"problem", "solver", "verify", "sweep", "output", "seed"});

    ExperimentConfig cfg;
    if (!j.contains("problem")) fail("missing key \"problem\" at top level");
    cfg.problem = parse_problem(j.at("problem"));
    if (j.contains("solver")) cfg.solver = parse_solver(j.at("solver"));
    if (j.contains("verify")) {
        if (!j.at("verify").is_array()) fail("\"verify\" must be an array");
        std::size_t i = 0;
        for (const auto& c : j.at("verify")) cfg.checks.push_back(parse_check(c, i++));
    }
    if (j.contains("sweep")) cfg.sweep = parse_sweep(j.at("sweep"));
    if (j.contains("output")) {
        require_keys(j.at("output"), "output", {"dir"});
        cfg.out_dir = get_str(j.at("output"), "dir", "output", std::string("."));
    }
    if (j.contains("seed")) {
        const json& s = j.at("seed");
        if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() &&
                                       s.get<long long>() < 0))
            fail("\"seed\" must be a nonnegative integer");
        cfg.seed = s.get<std::uint64_t>();
    }

    // exponent tuple must already be admissible; this throws with a message
    // naming the violated hypothesis
    (void)make_exponents(cfg.problem);
    cfg.solver.seed = cfg.seed;
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot read config file \"" + path + "\"");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string echo_config(const ExperimentConfig& cfg) {
    std::string o;
    o += "{\n";
    o += "  \"problem\": {\n";
    emit_kv(o, 4, "n", d_str(double(cfg.problem.n)));
    emit_kv(o, 4, "box_radius", d_str(cfg.problem.box_radius));
    emit_kv(o, 4, "h", d_str(cfg.problem.h));
    o += "    \"omega\": {\n";
    const OmegaConfig& om = cfg.problem.omega;
    if (om.kind == "interval") {
        emit_kv(o, 6, "kind", str_str(om.kind));
        emit_kv(o, 6, "lo", d_str(om.lo));
        emit_kv(o, 6, "hi", d_str(om.hi), true);
    } else if (om.kind == "box") {
        emit_kv(o, 6, "kind", str_str(om.kind));
        emit_kv(o, 6, "lo", point_str({om.lo2[0], om.lo2[1]}));
        emit_kv(o, 6, "hi", point_str({om.hi2[0], om.hi2[1]}), true);
    } else {
        emit_kv(o, 6, "kind", str_str(om.kind));
        emit_kv(o, 6, "center", point_str({om.center[0], om.center[1]}));
        emit_kv(o, 6, "radius", d_str(om.radius), true);
    }
    o += "    },\n";
    o += "    \"exponents\": {\n";
    emit_kv(o, 6, "s", d_str(cfg.problem.s));
    emit_kv(o, 6, "t", d_str(cfg.problem.t));
    emit_kv(o, 6, "p", d_str(cfg.problem.p));
    if (cfg.problem.p_star_override) {
        emit_kv(o, 6, "q", d_str(cfg.problem.q));
        emit_kv(o, 6, "p_star_override", d_str(*cfg.problem.p_star_override), true);
    } else {
        emit_kv(o, 6, "q", d_str(cfg.problem.q), true);
    }
    o += "    },\n";
    if (cfg.problem.alpha) emit_kv(o, 4, "alpha", d_str(*cfg.problem.alpha));
    o += "    \"coefficient\": {\n";
    emit_kv(o, 6, "kind", str_str(cfg.problem.coefficient.kind));
    emit_kv(o, 6, "value", d_str(cfg.problem.coefficient.value));
    emit_kv(o, 6, "alpha", d_str(cfg.problem.coefficient.alpha));
    emit_kv(o, 6, "cap", d_str(cfg.problem.coefficient.cap), true);
    o += "    },\n";
    o += "    \"kernel\": {\n";
    emit_kv(o, 6, "kind", str_str(cfg.problem.kernel.kind));
    emit_kv(o, 6, "lambda", d_str(cfg.problem.kernel.lambda), true);
    o += "    },\n";
    o += "    \"datum\": {\n";
    const DatumSpec& d = cfg.problem.datum;
    emit_kv(o, 6, "kind", str_str(d.kind));
    emit_kv(o, 6, "value", d_str(d.value));
    emit_kv(o, 6, "offset", d_str(d.offset));
    emit_kv(o, 6, "amplitude", d_str(d.amplitude));
    emit_kv(o, 6, "frequency", d_str(d.frequency));
    emit_kv(o, 6, "phase", d_str(d.phase));
    emit_kv(o, 6, "center", d_str(d.center));
    emit_kv(o, 6, "half_width", d_str(d.half_width));
    emit_kv(o, 6, "scale", d_str(d.scale));
    emit_kv(o, 6, "beyond", d_str(d.beyond), true);
    o += "    }\n";
    o += "  },\n";

    o += "  \"solver\": {\n";
    emit_kv(o, 4, "max_iters", std::to_string(cfg.solver.max_iters));
    emit_kv(o, 4, "grad_tol", d_str(cfg.solver.grad_tol));
    emit_kv(o, 4, "initial_step", d_str(cfg.solver.initial_step));
    emit_kv(o, 4, "shrink", d_str(cfg.solver.shrink));
    emit_kv(o, 4, "sufficient_decrease", d_str(cfg.solver.sufficient_decrease));
    emit_kv(o, 4, "precondition", cfg.solver.precondition ? "true" : "false");
    if (cfg.solver.initial_values.empty()) {
        emit_kv(o, 4, "init", str_str(init_name(cfg.solver.init)), true);
    } else {
        emit_kv(o, 4, "init", str_str(init_name(cfg.solver.init)));
        std::string arr = "[";
        for (std::size_t i = 0; i < cfg.solver.initial_values.size(); ++i) {
            if (i) arr += ", ";
            arr += d_str(cfg.solver.initial_values[i]);
        }
        arr += "]";
        emit_kv(o, 4, "initial_values", arr, true);
    }
    o += "  },\n";

    o += "  \"verify\": [";
    for (std::size_t i = 0; i < cfg.checks.size(); ++i) {
        const CheckSpec& c = cfg.checks[i];
        o += i ? ",\n    {\n" : "\n    {\n";
        emit_kv(o, 6, "check", str_str(c.type));
        emit_kv(o, 6, "x0", point_str(c.x0));
        emit_kv(o, 6, "r", d_str(c.r));
        emit_kv(o, 6, "outer_radius", d_str(c.outer_radius));
        emit_kv(o, 6, "level", d_str(c.level));
        emit_kv(o, 6, "sign", str_str(c.sign));
        emit_kv(o, 6, "cutoff_half_width", d_str(c.cutoff_half_width));
        emit_kv(o, 6, "lift", d_str(c.lift));
        emit_kv(o, 6, "cap_base", d_str(c.cap_base));
        emit_kv(o, 6, "sigma", d_str(c.sigma));
        emit_kv(o, 6, "imax", std::to_string(c.imax));
        emit_kv(o, 6, "weight", d_str(c.weight));
        emit_kv(o, 6, "variant", str_str(c.variant));
        emit_kv(o, 6, "ceiling", d_str(c.ceiling));
        emit_kv(o, 6, "min_gamma", d_str(c.min_gamma), true);
        o += "    }";
    }
    o += cfg.checks.empty() ? "],\n" : "\n  ],\n";

    if (cfg.sweep) {
        const SweepConfig& s = *cfg.sweep;
        o += "  \"sweep\": {\n";
        emit_kv(o, 4, "parameter", str_str(s.parameter));
        std::string arr = "[";
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            if (i) arr += ", ";
            arr += d_str(s.values[i]);
        }
        arr += "]";
        emit_kv(o, 4, "values", arr);
        emit_kv(o, 4, "solve", s.solve ? "true" : "false");
        emit_kv(o, 4, "x0", point_str(s.x0));
        emit_kv(o, 4, "r", d_str(s.r));
        emit_kv(o, 4, "sigma", d_str(s.sigma));
        emit_kv(o, 4, "jmax", std::to_string(s.jmax), true);
        o += "  },\n";
    }

    o += "  \"output\": {\n";
    emit_kv(o, 4, "dir", str_str(cfg.out_dir), true);
    o += "  },\n";
    o += "  \"seed\": " + std::to_string(cfg.seed) + "\n";
    o += "}\n";
    return o;
}

ExponentConfig make_exponents(const ProblemConfig& pc) {
    return validate_exponents(pc.n, pc.s, pc.t, pc.p, pc.q, pc.p_star_override);
}

Grid make_grid(const ProblemConfig& pc) {
    const OmegaConfig om = pc.omega;
    OmegaSpec spec;
    if (om.kind == "interval") {
        spec = [om](const Point& x) { return om.lo < x[0] && x[0] < om.hi; };
    } else if (om.kind == "box") {
        spec = [om](const Point& x) {
            return om.lo2[0] < x[0] && x[0] < om.hi2[0] && om.lo2[1] < x[1] &&
                   x[1] < om.hi2[1];
        };
    } else {
        spec = [om](const Point& x) {
            return distance(2, x, {om.center[0], om.center[1]}) < om.radius;
        };
    }
    return build_grid(pc.n, pc.box_radius, pc.h, spec);
}

Coefficient make_coefficient(const CoefficientSpec& spec) {
    if (spec.kind == "constant") return constant_coefficient(spec.value);
    if (spec.kind == "zero") return zero_coefficient();
    if (spec.kind == "cosine-product") return cosine_product_coefficient();
    return distance_power_coefficient(spec.alpha, spec.cap);
}

KernelPair make_kernels(const KernelSpec& spec, const ExponentConfig& cfg) {
    if (spec.kind == "model") return model_kernels(cfg);
    return perturbed_kernels(cfg, spec.lambda);
}

DiscreteFunction make_datum(const DatumSpec& spec, const Grid& g) {
    std::function<double(const Point&)> f;
    if (spec.kind == "constant") {
        const double v = spec.value;
        f = [v](const Point&) { return v; };
    } else if (spec.kind == "cosine") {
        const DatumSpec d = spec;
        f = [d](const Point& x) {
            return d.offset + d.amplitude * std::cos(d.frequency * x[0] + d.phase);
        };
    } else if (spec.kind == "tent") {
        const DatumSpec d = spec;
        f = [d](const Point& x) {
            return std::max(0.0, 1.0 - std::fabs(x[0] - d.center) / d.half_width);
        };
    } else {
        const DatumSpec d = spec;
        f = [d](const Point& x) {
            const double u = x[0] - d.center;
            return d.scale / (1.0 + u * u);
        };
    }
    return sample_function(g, f, spec.beyond);
}

std::optional<double> effective_alpha(const ExperimentConfig& cfg) {
    if (cfg.problem.alpha) return cfg.problem.alpha;
    auto coeff = make_coefficient(cfg.problem.coefficient);
    if (coeff.holder) return coeff.holder->alpha;
    return std::nullopt;
}

} // namespace nldp
