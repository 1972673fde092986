#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nldp/core.hpp"

namespace nldp {

// Uniform cell-centered grid on the truncation box [-R,R]^n. Node i sits at the
// center of cell i; integration is the midpoint rule with the diagonal pair (i,i)
// excluded, so |x_i - x_j| >= h bounds every kernel evaluation.
struct Grid {
    int n = 1;
    double R = 0;
    double h = 0;
    int per_axis = 0;
    std::vector<Point> nodes;
    std::vector<std::uint8_t> interior;

    std::size_t size() const { return nodes.size(); }
    double cell_measure() const { return n == 1 ? h : h * h; }
    // Distance from x0 to the boundary of the bounding box.
    double box_distance(const Point& x0) const;
};

using OmegaSpec = std::function<bool(const Point&)>;

// h must tile [-R,R] evenly; R/h is capped at 2000 per axis. The domain predicate
// is evaluated at cell centers, and no interior cell may touch the box boundary.
Grid build_grid(int n, double R, double h, const OmegaSpec& omega);

// Midpoint quadrature weight for the ordered pair (i,j), i.e. h^{2n}.
double pair_weight(const Grid& g, std::size_t i, std::size_t j);

// Indices of nodes with |x - x0| < r (open ball).
std::vector<std::size_t> ball_nodes(const Grid& g, const Point& x0, double r);
std::vector<std::size_t> interior_nodes(const Grid& g);

// Nodal field on a grid. beyond_box is the constant value the function takes
// outside the truncation box (unset = unknown/nonconstant, which blocks the
// analytic exterior closure). When exterior_frozen, only interior values are
// optimization variables.
struct DiscreteFunction {
    const Grid* grid = nullptr;
    std::vector<double> values;
    bool exterior_frozen = false;
    std::optional<double> beyond_box;
};

DiscreteFunction make_function(const Grid& g, double value);
DiscreteFunction sample_function(const Grid& g, const std::function<double(const Point&)>& f,
                                 std::optional<double> beyond = std::nullopt);

double sup_abs(const DiscreteFunction& v);
double sup_abs_ball(const DiscreteFunction& v, const Point& x0, double r);

// Analytic value of |c|^power * integral of |y-x0|^{-(n+m_ell)} over |y-x0| > R',
// where c is the constant beyond-box value of v and R' = box_distance(x0):
// |c|^power * (n*omega_n/m_ell) * R'^{-m_ell}. Closes truncated tail integrals.
double exterior_closure(const Grid& g, const DiscreteFunction& v, const Point& x0,
                        double m_ell, double power);

// Flat CSV: one row per node, columns x[,y],interior,value, decimals with 17
// significant digits (bit-exact round trip for the value column).
void save_solution_csv(const Grid& g, const DiscreteFunction& v, const std::string& path);
DiscreteFunction load_solution_csv(const Grid& g, const std::string& path);

} // namespace nldp
