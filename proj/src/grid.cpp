#include "nldp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace nldp {

namespace {

constexpr double kPi = 3.14159265358979323846;

void format_double(char* buf, std::size_t cap, double v) {
    std::snprintf(buf, cap, "%.17g", v);
}

} // namespace

double Grid::box_distance(const Point& x0) const {
    double d = R - std::fabs(x0[0]);
    if (n == 2) d = std::min(d, R - std::fabs(x0[1]));
    return d;
}

Grid build_grid(int n, double R, double h, const OmegaSpec& omega) {
    if (n != 1 && n != 2) throw PreconditionViolation("dimension must be 1 or 2");
    if (!(h > 0) || !(R > 0)) throw PreconditionViolation("R and h must be positive");
    if (R / h > 2000.0)
        throw ResolutionTooFine("R/h exceeds 2000 per axis");
    const double cells = 2 * R / h;
    const int per_axis = static_cast<int>(std::llround(cells));
    if (per_axis < 2 || std::fabs(per_axis * h - 2 * R) > 1e-9 * 2 * R)
        throw PreconditionViolation("spacing must tile the box evenly");

    Grid g;
    g.n = n;
    g.R = R;
    g.h = h;
    g.per_axis = per_axis;

    if (n == 1) {
        g.nodes.reserve(per_axis);
        for (int i = 0; i < per_axis; ++i)
            g.nodes.push_back(Point{-R + (i + 0.5) * h, 0.0});
    } else {
        g.nodes.reserve(static_cast<std::size_t>(per_axis) * per_axis);
        for (int i = 0; i < per_axis; ++i)
            for (int j = 0; j < per_axis; ++j)
                g.nodes.push_back(Point{-R + (i + 0.5) * h, -R + (j + 0.5) * h});
    }

    g.interior.resize(g.nodes.size());
    bool any_interior = false;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const bool in = omega(g.nodes[i]);
        g.interior[i] = in ? 1 : 0;
        any_interior = any_interior || in;
        if (in) {
            for (int k = 0; k < n; ++k) {
                if (std::fabs(g.nodes[i][static_cast<std::size_t>(k)]) + 0.5 * h >=
                    R - 1e-9 * h)
                    throw DomainTouchesBoundary(
                        "an interior cell touches the truncation box boundary");
            }
        }
    }
    if (!any_interior) throw PreconditionViolation("domain contains no cell center");
    return g;
}

double pair_weight(const Grid& g, std::size_t i, std::size_t j) {
    if (i == j) throw DiagonalPair("quadrature excludes the diagonal");
    const double m = g.cell_measure();
    return m * m;
}

std::vector<std::size_t> ball_nodes(const Grid& g, const Point& x0, double r) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (distance(g.n, g.nodes[i], x0) < r) out.push_back(i);
    return out;
}

std::vector<std::size_t> interior_nodes(const Grid& g) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.interior[i]) out.push_back(i);
    return out;
}

DiscreteFunction make_function(const Grid& g, double value) {
    DiscreteFunction f;
    f.grid = &g;
    f.values.assign(g.size(), value);
    f.beyond_box = value;
    return f;
}

DiscreteFunction sample_function(const Grid& g, const std::function<double(const Point&)>& fn,
                                 std::optional<double> beyond) {
    DiscreteFunction f;
    f.grid = &g;
    f.values.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) f.values[i] = fn(g.nodes[i]);
    f.beyond_box = beyond;
    return f;
}

double sup_abs(const DiscreteFunction& v) {
    double m = 0;
    for (double x : v.values) m = std::max(m, std::fabs(x));
    return m;
}

double sup_abs_ball(const DiscreteFunction& v, const Point& x0, double r) {
    double m = 0;
    for (std::size_t i : ball_nodes(*v.grid, x0, r))
        m = std::max(m, std::fabs(v.values[i]));
    return m;
}

double exterior_closure(const Grid& g, const DiscreteFunction& v, const Point& x0,
                        double m_ell, double power) {
    if (!(m_ell > 0)) throw PreconditionViolation("kernel order must be positive");
    if (!v.beyond_box)
        throw NonconstantExteriorBeyondBox(
            "no constant beyond-box value is declared for this function");
    const double c = std::fabs(*v.beyond_box);
    if (c == 0) return 0.0;
    const double rp = g.box_distance(x0);
    if (!(rp > 0)) throw PreconditionViolation("center must lie inside the box");
    const double surface = g.n == 1 ? 2.0 : 2.0 * kPi;
    return std::pow(c, power) * (surface / m_ell) * std::pow(rp, -m_ell);
}

void save_solution_csv(const Grid& g, const DiscreteFunction& v, const std::string& path) {
    if (v.values.size() != g.size())
        throw GridMismatch("value count does not match the grid");
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    char buf[64];
    out << (g.n == 1 ? "x,interior,value\n" : "x,y,interior,value\n");
    for (std::size_t i = 0; i < g.size(); ++i) {
        format_double(buf, sizeof buf, g.nodes[i][0]);
        out << buf << ',';
        if (g.n == 2) {
            format_double(buf, sizeof buf, g.nodes[i][1]);
            out << buf << ',';
        }
        out << int(g.interior[i]) << ',';
        format_double(buf, sizeof buf, v.values[i]);
        out << buf << '\n';
    }
    if (!out) throw Error("failed writing " + path);
}

DiscreteFunction load_solution_csv(const Grid& g, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw GridMismatch("empty solution file");
    const std::string want_header = g.n == 1 ? "x,interior,value" : "x,y,interior,value";
    if (line != want_header) throw GridMismatch("unexpected CSV header: " + line);

    DiscreteFunction f;
    f.grid = &g;
    f.values.reserve(g.size());
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (row >= g.size()) throw GridMismatch("more rows than grid nodes");
        std::array<double, 2> coord{0, 0};
        int flag = 0;
        double value = 0;
        const char* p = line.c_str();
        char* end = nullptr;
        for (int k = 0; k < g.n; ++k) {
            coord[static_cast<std::size_t>(k)] = std::strtod(p, &end);
            if (end == p || *end != ',') throw GridMismatch("malformed row " + line);
            p = end + 1;
        }
        flag = static_cast<int>(std::strtol(p, &end, 10));
        if (end == p || *end != ',') throw GridMismatch("malformed row " + line);
        p = end + 1;
        value = std::strtod(p, &end);
        if (end == p) throw GridMismatch("malformed row " + line);

        for (int k = 0; k < g.n; ++k)
            if (std::fabs(coord[static_cast<std::size_t>(k)] -
                          g.nodes[row][static_cast<std::size_t>(k)]) > 1e-12)
                throw GridMismatch("node coordinates do not match the grid");
        if (flag != int(g.interior[row]))
            throw GridMismatch("interior flags do not match the grid");
        f.values.push_back(value);
        ++row;
    }
    if (row != g.size()) throw GridMismatch("fewer rows than grid nodes");
    return f;
}

} // namespace nldp
