#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nldp/energy.hpp"

namespace nldp {

// One verified estimate: both sides evaluated on concrete discrete data, plus
// the constant the data actually exhibits. Checkers only measure; asserting
// lhs <= C * rhs against pinned ceilings is the test suite's job.
struct InequalityReport {
    double lhs = 0;
    double rhs = 0;
    double implied_constant = 0; // lhs/rhs, 0 when both sides vanish
    bool advisory = false;       // a hypothesis gate failed; values still reported
    std::string label;
};

struct DeGiorgiReport {
    bool converged = false; // final trace entry <= 1e-12
    double threshold = 0;   // b1^{-1/beta} * b2^{-1/beta^2}
    std::vector<double> trace;
};

// Oscillation of a grid function over shrinking concentric balls r_j = sigma^j r,
// with the decay exponent fitted from log osc against log r_j.
struct OscillationTrace {
    Point x0{0, 0};
    double r = 0;
    double sigma = 0;
    std::vector<double> radii;
    std::vector<double> omega;
    double gamma_fit = 0;
    double fit_residual = 0; // rms residual of the log-log fit
    std::optional<double> K0;
    std::optional<double> gamma; // comparison sequence sigma^{gamma j} K0 when supplied
};

// The constants of the oscillation decay scheme, all derived from the exponent
// configuration and a solution bound. Evaluated in log space; quantities whose
// true value underflows are clamped to the smallest positive double so the
// range invariants (sigma in (0,1/4], gamma in (0,1), epsilon in (0,1)) hold.
struct HolderConstants {
    double M = 0;       // 1 + sup_u^{q-p}
    double M_tilde = 0; // 1 + (sup_u + d)^{q-p}
    double nu_star = 0;
    double sigma = 0;
    double gamma = 0;
    double epsilon = 0;
    double K0 = 0; // not derivable here; filled by the caller from k0_quantity
    double c_star = 1;
    double c0 = 1;
    std::array<double, 4> sigma_candidates{};
    std::array<double, 4> gamma_candidates{};
};

enum class TruncationSign { Plus, Minus };

// Nodewise (u - k)_+ or (u - k)_-, both nonnegative; the beyond-box constant,
// when declared, is mapped through the same formula.
DiscreteFunction truncate_pm(const DiscreteFunction& u, double k, TruncationSign sign);

// Energy of a truncation against a cutoff, tested on concentric balls:
//   lhs: pair sum over B_r x B_r of H(x,y,|dw|) (phi^q(x) + phi^q(y)) |x-y|^{-n}
//   rhs: same sum with the roles swapped, H(x,y,|dphi| (w(x)+w(y))), plus the
//        far-field coupling sup_{y in supp phi} of the complement integral of
//        h(x,y,w(x)) |x-y|^{-n}, times the ball integral of w phi^q.
// Requires k >= 0, the doubled ball inside the domain, and phi a valid cutoff:
// values in [0,1], every positive node's cell strictly inside B_r. When u
// fails the stationarity gate the report is advisory rather than an error.
InequalityReport caccioppoli_check(const EnergyContext& ctx, const DiscreteFunction& u,
                                   const Point& x0, double r, double k,
                                   TruncationSign sign, const DiscreteFunction& phi);

// Level-set energies y_i of u above the rising levels k_i = 2 k0 (1 - 2^{-i-1})
// over the shrinking balls of radius (r/2)(1 + 2^{-i}):
//   y_i = sum over ball nodes of (u - k_i)_+^p + ||a||_inf (u - k_i)_+^q, times
// the cell measure. Nonincreasing in i for every u. Returns y_0 .. y_imax.
std::vector<double> levelset_sequence(const EnergyContext& ctx, const DiscreteFunction& u,
                                      const Point& x0, double r, double k0,
                                      std::size_t imax);

// The fast geometric-convergence recursion y_{i+1} = b1 b2^i y_i^{1+beta},
// iterated as equality. Requires b1 > 0, b2 > 1, beta > 0, y0 >= 0. Starting
// at or below the threshold forces the trace to zero. Products that straddle
// the double range are resolved in log space, and values below the smallest
// positive normal double are flushed to zero.
DeGiorgiReport degiorgi_iteration(double y0, double b1, double b2, double beta,
                                  std::size_t imax);

// Integral log-oscillation control near the infimum of a nonnegative function:
//   lhs: pair sum over B_rho x B_rho of |log((u(x)+d)/(u(y)+d))| |x-y|^{-n}
//   rhs: M_tilde^2 (rho^n + rho^{n+sp} d^{1-p} T_sp + rho^{n+tq} d^{1-q} T_tq)
// with T_* the complement integrals of the negative part of u outside B_R.
// Requires d > 0, 0 < rho <= R/2, u >= -1e-12 on B_R (clamped to 0 in the
// sums). Advisory when u fails the one-sided stationarity gate.
InequalityReport log_estimate_check(const EnergyContext& ctx, const DiscreteFunction& u,
                                    const Point& x0, double R, double rho, double d);

// Mean deviation of the capped log excess v = min{(log(zeta+d)-log(u+d))_+, log xi}:
//   lhs: mean over B_rho of |v - mean v|
//   rhs: M_tilde^2 (1 + rho^{sp} d^{1-p} T_sp + rho^{tq} d^{1-q} T_tq)
// Requires zeta, d > 0 and xi > 1 on top of the radius and sign hypotheses.
InequalityReport log_excess_check(const EnergyContext& ctx, const DiscreteFunction& u,
                                  const Point& x0, double R, double rho, double d,
                                  double zeta, double xi);

// Oscillations over B_{sigma^j r}(x0), j = 0 .. jmax, truncated at the first
// under-resolved ball (< 8 nodes in 1-D, < 12 in 2-D). gamma_fit is the least
// squares slope of log omega against log r_j, zero-oscillation levels dropped;
// fewer than 3 fit points is an error. Requires sigma in (0, 1/4].
OscillationTrace oscillation_sequence(const DiscreteFunction& u, const Point& x0,
                                      double r, double sigma, std::size_t jmax,
                                      std::optional<double> K0 = std::nullopt,
                                      std::optional<double> gamma = std::nullopt);

// The scale-invariant solution bound
//   2 (sup_{B_r}|u| + [r^{sp} (T_p + T_q,sp)]^{1/(p-1)} + [r^{tq} T_q,tq]^{1/(q-1)})
// with T_* the complement integrals of |u| outside B_r. Nondecreasing under
// pointwise growth of |u|.
double k0_quantity(const EnergyContext& ctx, const DiscreteFunction& u, const Point& x0,
                   double r);

// All constants of the oscillation decay scheme from the exponents and a
// solution bound; see HolderConstants. alpha is the coefficient's smoothness
// order, sup_u a bound for |u|, d the lift applied near the infimum.
HolderConstants holder_constants(const ExponentConfig& cfg, double alpha, double sup_u,
                                 double d, double c_star = 1, double c0 = 1);

enum class SPVariant {
    SP, // p-mean of the critical-power deviation against the (s,p) pair energy
    TQ, // q-mean of the same deviation against the (t,q) pair energy
};

// Fractional Sobolev-Poincare control on a ball:
//   SP: (mean |v - (v)|^{p*})^{p/p*}  vs  r^{sp} mean pair sum |dv|^p |x-y|^{-n-sp}
//   TQ: (mean |v - (v)|^{p*})^{q/p*}  vs  r^{tq} mean pair sum |dv|^q |x-y|^{-n-tq}
// where p* is the critical exponent of the configuration.
InequalityReport sobolev_poincare_check(const EnergyContext& ctx, const DiscreteFunction& v,
                                        const Point& x0, double r, SPVariant variant);

// Embedding of the higher pair energy into the lower one on a bounded node set:
//   (sum |dv|^p |x-y|^{-n-sp})^{1/p} <= c |region|^{(q-p)/(pq)} diam^{t-s}
//                                         (sum |dv|^q |x-y|^{-n-tq})^{1/q}
// with c = (n (q-p) / ((t-s) p q) * |B_1|)^{(q-p)/(pq)} when p < q, and the
// direct diam^{t-s} bound with c = 1 when p = q. s = t with p < q degenerates.
InequalityReport inclusion_check(const EnergyContext& ctx, const DiscreteFunction& v,
                                 const std::vector<std::size_t>& region);

// Mean bound for scaled powers of a function against its pair energy and the
// relative size of its support inside the ball:
//   mean (|f/r^s|^p + L0 |f/r^t|^q) vs
//     L0 r^{(s-t)q} G^{q/p} + frac^{sp/n} G + frac^{p-1} lhs,
// G the ball mean of the (s,p) pair sum, frac the node fraction where f != 0.
// Requires L0 > 0 and a subcritical configuration.
InequalityReport ineq1_check(const EnergyContext& ctx, const DiscreteFunction& f,
                             const Point& x0, double r, double L0);

// Self-improving mean bound with the coefficient sampled at its ball extrema:
//   [mean (|f/r^s|^p + a_hi |f/r^t|^q)^kappa]^{1/kappa} vs
//     (1 + sup|f|^{q-p}) [mean pair H-sum + mean (|f/r^s|^p + a_lo |f/r^t|^q)]
// on B_r with the extrema taken over B_R, R/2 <= r <= R <= 1. Requires the
// coefficient's smoothness hypothesis.
InequalityReport ineq2_check(const EnergyContext& ctx, const DiscreteFunction& f,
                             const Point& x0, double r, double R);

// The frozen constant of the second elementary power inequality: the supremum
// of (a^p - b^p - eps b^p) eps^{p-1} / |a-b|^p over a, b >= 0 and eps in (0,1],
// attained at eps = 1, a = 2^{1/(p-1)}, b = 1:
//   c(p) = 2 / (2^{1/(p-1)} - 1)^{p-1},  c(1) = 1.
double calibrated_c(double p);

// Elementary power inequalities behind the truncation estimates, checked at a
// single triple with 1e-12 relative slack:
//   first:  a^p - b^p <= p a^{p-1} |a - b|
//   second: a^p - b^p <= eps b^p + c(p) eps^{1-p} |a - b|^p
// Requires a, b >= 0, p >= 1, eps in (0, 1].
std::pair<bool, bool> numeric_ineq_check(double a, double b, double p, double eps);

} // namespace nldp
