#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>

#include "nldp/errors.hpp"

namespace nldp {

// A node position. Coordinate 1 is unused (zero) in dimension 1.
using Point = std::array<double, 2>;

inline double distance(int n, const Point& a, const Point& b) {
    const double dx = a[0] - b[0];
    if (n == 1) return std::fabs(dx);
    const double dy = a[1] - b[1];
    return std::sqrt(dx * dx + dy * dy);
}

struct Grid; // defined in grid.hpp

// Validated exponent tuple (n, s, t, p, q) with derived Sobolev conjugates.
//
// The conjugate of (m, ell) is n*ell/(n - m*ell) in the subcritical range
// m*ell < n. At m*ell = n (within 1e-12) the convention value q+1 is used; above n
// any value > ell is admissible, so the conjugate stays unset unless an override is
// supplied for p_star_s. kappa = min{p*_s/p, q*_t/q} is derived when both
// conjugates exist.
struct ExponentConfig {
    int n = 1;
    double s = 0, t = 0, p = 0, q = 0;
    std::optional<double> p_star_s;
    std::optional<double> q_star_t;
    std::optional<double> kappa;

    double sp() const { return s * p; }
    double tq() const { return t * q; }

    // Throw ConjugateRequired when the value is needed but unavailable.
    double require_p_star() const;
    double require_kappa() const;
};

// Checks 0 < s <= t < 1 and 1 < p <= q < infinity, derives conjugates.
// The override applies to p*_s when s*p >= n and must lie in (p, inf).
ExponentConfig validate_exponents(int n, double s, double t, double p, double q,
                                  std::optional<double> p_star_override = {});

// true iff (sp < n and q <= np/(n-sp)) or sp >= n. Pure double arithmetic: the
// boundary is exactly the computed value of np/(n-sp).
bool check_boundedness_assumption(const ExponentConfig& cfg);

// true iff tq <= sp + alpha (alpha > 0).
bool check_holder_assumption(const ExponentConfig& cfg, double alpha);

// Modulating coefficient a(x,y): symmetric, 0 <= a <= sup_norm, with optional
// Holder modulus |a(x1,y1)-a(x2,y2)| <= modulus*(|x1-x2|+|y1-y2|)^alpha.
struct HolderData {
    double alpha = 0;
    double modulus = 0;
};

struct Coefficient {
    std::function<double(const Point&, const Point&)> eval;
    double sup_norm = 0;
    std::optional<HolderData> holder;

    double operator()(const Point& x, const Point& y) const { return eval(x, y); }
};

Coefficient constant_coefficient(double value);
Coefficient zero_coefficient();
// 0.5*(1 + cos(x[0])*cos(y[0])), range [0,1], Holder with alpha=1 (Lipschitz).
Coefficient cosine_product_coefficient();
// min(cap, |x-y|^alpha); Holder data (alpha, 1).
Coefficient distance_power_coefficient(double alpha, double cap);

// Kernel pair K_sp, K_tq with ellipticity constant lambda:
//   lambda^-1 * |x-y|^-(n+sp) <= K_sp(x,y) <= lambda * |x-y|^-(n+sp), same for
// K_tq with (t,q). model_flag marks the exact power-law kernels (lambda = 1).
struct KernelPair {
    std::function<double(const Point&, const Point&)> k_sp;
    std::function<double(const Point&, const Point&)> k_tq;
    double lambda = 1.0;
    bool model_flag = false;
};

KernelPair model_kernels(const ExponentConfig& cfg);
// Power-law kernels modulated by exp(eta*sin(x[0]+y[0]+x[1]+y[1])) with
// eta = log(lambda): symmetric and inside the lambda envelope. lambda >= 1.
KernelPair perturbed_kernels(const ExponentConfig& cfg, double lambda);

// inf and sup of a over sampled pairs (x,y) in (B_r(x0) n grid nodes)^2, diagonal
// included. Sampling covers all pairs up to the internal cap, then a seeded random
// subset. Throws EmptySample when no node lies in the ball.
std::pair<double, double> coefficient_extrema(const Grid& grid, const Coefficient& a,
                                              const Point& x0, double r);

struct CoefficientControlReport {
    double max_ratio = 0;      // largest a(x,y) / (C|x-y|^{tq-sp} + a2)
    double control_constant = 0; // C
    double a2 = 0;
};

// Verifies the pointwise growth control a(x,y) <= C|x-y|^{tq-sp} + a2 over sampled
// pairs with x in B_r(x0) and y any node, where a2 = sup over the ball pairs and
// C = modulus^{(tq-sp)/alpha} * (2*sup_norm)^{1-(tq-sp)/alpha}.
CoefficientControlReport coefficient_control_check(const Grid& grid, const Coefficient& a,
                                                   const ExponentConfig& cfg,
                                                   const Point& x0, double r);

} // namespace nldp
