#include "nldp/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "nldp/errors.hpp"
#include "nldp/parallel.hpp"

namespace nldp {

namespace {

constexpr std::size_t kBlock = 4096;

double pow_pos(double base, double e) {
    if (e == 2.0) return base * base;
    if (e == 1.0) return base;
    return std::pow(base, e);
}

double inv_dist_n(int n, double d) { return n == 1 ? 1.0 / d : 1.0 / (d * d); }

// Deterministic sum over the unordered pairs 0 <= i < j < k.
template <class Term>
double triangle_sum(std::size_t k, Term&& term) {
    if (k < 2) return 0.0;
    const std::size_t total = k * (k - 1) / 2;
    return reduce_blocks(total, kBlock, [&](std::size_t b0, std::size_t b1) {
        std::size_t lo = 0, hi = k - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi + 1) / 2;
            const std::size_t row_start = mid * k - mid * (mid + 1) / 2;
            if (row_start <= b0)
                lo = mid;
            else
                hi = mid - 1;
        }
        std::size_t i = lo;
        std::size_t j = i + 1 + (b0 - (i * k - i * (i + 1) / 2));
        KahanSum acc;
        for (std::size_t idx = b0; idx < b1; ++idx) {
            acc.add(term(i, j));
            if (++j == k) {
                ++i;
                j = i + 1;
            }
        }
        return acc.value();
    });
}

// Ball whose nodes must all belong to the domain and whose radius must fit
// inside the truncation box.
std::vector<std::size_t> domain_ball(const Grid& g, const Point& x0, double r,
                                     const char* what) {
    if (!(r > 0)) throw PreconditionViolation("ball radius must be positive");
    if (r > g.box_distance(x0))
        throw BallOutsideDomain(std::string(what) + " must fit inside the truncation box");
    auto ball = ball_nodes(g, x0, r);
    for (auto i : ball)
        if (!g.interior[i])
            throw BallOutsideDomain(std::string(what) +
                                    " reaches outside the domain");
    return ball;
}

double report_constant(double lhs, double rhs) { return rhs == 0 ? 0.0 : lhs / rhs; }

// Seeded stationarity gate: |d/de E(u + e phi)| for random test functions
// scaled to unit value mass. one_sided accepts any nonnegative residual.
bool stationarity_gate(const EnergyContext& ctx, const DiscreteFunction& u,
                       bool one_sided) {
    const Grid& g = *ctx.grid;
    auto inter = interior_nodes(g);
    if (inter.empty()) return true;
    const double pq = std::max(ctx.cfg.p, ctx.cfg.q);
    const double tol = 10 * 1e-9 * (1 + pow_pos(sup_abs(u), pq - 1));
    std::mt19937_64 rng(0x6a75646765ULL);
    std::uniform_real_distribution<double> U(one_sided ? 0.0 : -1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        auto phi = make_function(g, 0.0);
        double mass = 0;
        for (auto i : inter) {
            phi.values[i] = U(rng);
            mass += std::fabs(phi.values[i]);
        }
        if (mass == 0) continue;
        for (auto i : inter) phi.values[i] /= mass;
        const double res = weak_residual(ctx, u, phi);
        if (one_sided ? res < -tol : std::fabs(res) > tol) return false;
    }
    return true;
}

// Complement integrals of the negative part outside B_R, shared by the two
// logarithmic checks. Returns {rhs tail combination without the rho powers}.
struct LogTails {
    double sp_part = 0; // d^{1-p} (T_p + T_q,sp)
    double tq_part = 0; // d^{1-q} T_q,tq
};

LogTails log_tails(const EnergyContext& ctx, const DiscreteFunction& u, const Point& x0,
                   double R, double d) {
    auto um = truncate_pm(u, 0.0, TruncationSign::Minus);
    auto T = tail(ctx, um, x0, R);
    LogTails out;
    out.sp_part = pow_pos(d, 1 - ctx.cfg.p) * (T.p_part + T.q_part_sp);
    out.tq_part = pow_pos(d, 1 - ctx.cfg.q) * T.q_part_tq;
    return out;
}

// Values clamped to zero inside the ball; anything below the clamp tolerance
// is a genuine sign violation.
std::vector<double> clamped_ball_values(const DiscreteFunction& u,
                                        const std::vector<std::size_t>& ball) {
    std::vector<double> v(ball.size());
    for (std::size_t b = 0; b < ball.size(); ++b) {
        const double x = u.values[ball[b]];
        if (x < -1e-12)
            throw NegativeInBall("the function must be nonnegative on the ball");
        v[b] = std::max(x, 0.0);
    }
    return v;
}

} // namespace

DiscreteFunction truncate_pm(const DiscreteFunction& u, double k, TruncationSign sign) {
    auto w = u;
    const double sgn = sign == TruncationSign::Plus ? 1.0 : -1.0;
    for (auto& x : w.values) x = std::max(sgn * (x - k), 0.0);
    if (w.beyond_box) w.beyond_box = std::max(sgn * (*w.beyond_box - k), 0.0);
    return w;
}

InequalityReport caccioppoli_check(const EnergyContext& ctx, const DiscreteFunction& u,
                                   const Point& x0, double r, double k,
                                   TruncationSign sign, const DiscreteFunction& phi) {
    const Grid& g = *ctx.grid;
    if (!(k >= 0)) throw PreconditionViolation("truncation level must be nonnegative");
    (void)domain_ball(g, x0, 2 * r, "the doubled ball");
    auto ball = ball_nodes(g, x0, r);

    // a valid cutoff has values in [0,1] and every positive cell strictly
    // inside the ball
    const double reach = 0.5 * g.h * std::sqrt(double(g.n));
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double v = phi.values[i];
        if (v < 0 || v > 1)
            throw CutoffUnsupported("cutoff values must lie in [0,1]");
        if (v > 0 && distance(g.n, g.nodes[i], x0) + reach >= r)
            throw CutoffUnsupported("cutoff support must stay strictly inside the ball");
    }
    if (phi.beyond_box && *phi.beyond_box != 0.0)
        throw CutoffUnsupported("cutoff must vanish beyond the truncation box");

    auto w = truncate_pm(u, k, sign);
    const double q = ctx.cfg.q;
    const double cellm = g.cell_measure();
    const double w2 = cellm * cellm;

    const double lhs = triangle_sum(ball.size(), [&](std::size_t bi, std::size_t bj) {
        const std::size_t i = ball[bi], j = ball[bj];
        const double d = distance(g.n, g.nodes[i], g.nodes[j]);
        const double tau = std::fabs(w.values[i] - w.values[j]);
        return 2 * h_density(ctx, g.nodes[i], g.nodes[j], tau) *
               (pow_pos(phi.values[i], q) + pow_pos(phi.values[j], q)) *
               inv_dist_n(g.n, d) * w2;
    });
    const double rhs_cut = triangle_sum(ball.size(), [&](std::size_t bi, std::size_t bj) {
        const std::size_t i = ball[bi], j = ball[bj];
        const double d = distance(g.n, g.nodes[i], g.nodes[j]);
        const double tau =
            std::fabs((phi.values[i] - phi.values[j]) * (w.values[i] + w.values[j]));
        return 2 * h_density(ctx, g.nodes[i], g.nodes[j], tau) * inv_dist_n(g.n, d) * w2;
    });

    // far-field coupling: scan the ball complement from every support node
    std::vector<std::size_t> in_ball(g.size(), 0);
    for (auto i : ball) in_ball[i] = 1;
    std::vector<std::size_t> supp;
    for (auto j : ball)
        if (phi.values[j] > 0) supp.push_back(j);
    std::vector<double> per_node(supp.size(), 0.0);
    parallel_for(supp.size(), [&](std::size_t b) {
        const std::size_t j = supp[b];
        KahanSum acc;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (in_ball[i]) continue;
            const double d = distance(g.n, g.nodes[i], g.nodes[j]);
            acc.add(h_deriv_density(ctx, g.nodes[i], g.nodes[j], w.values[i]) *
                    inv_dist_n(g.n, d) * cellm);
        }
        acc.add(exterior_closure(g, w, g.nodes[j], ctx.cfg.sp(), ctx.cfg.p - 1));
        acc.add(ctx.coeff.sup_norm *
                exterior_closure(g, w, g.nodes[j], ctx.cfg.tq(), ctx.cfg.q - 1));
        per_node[b] = acc.value();
    });
    double tail_sup = 0;
    for (double v : per_node) tail_sup = std::max(tail_sup, v);
    KahanSum ball_int;
    for (auto j : ball) ball_int.add(w.values[j] * pow_pos(phi.values[j], q) * cellm);

    InequalityReport rep;
    rep.label = "caccioppoli";
    rep.lhs = lhs;
    rep.rhs = rhs_cut + tail_sup * ball_int.value();
    rep.implied_constant = report_constant(rep.lhs, rep.rhs);
    rep.advisory = !stationarity_gate(ctx, u, false);
    return rep;
}

std::vector<double> levelset_sequence(const EnergyContext& ctx, const DiscreteFunction& u,
                                      const Point& x0, double r, double k0,
                                      std::size_t imax) {
    const Grid& g = *ctx.grid;
    if (!(k0 > 0)) throw PreconditionViolation("base level must be positive");
    (void)domain_ball(g, x0, r, "the ball");

    const double p = ctx.cfg.p, q = ctx.cfg.q;
    const double amax = ctx.coeff.sup_norm;
    const double cellm = g.cell_measure();
    std::vector<double> y;
    y.reserve(imax + 1);
    for (std::size_t i = 0; i <= imax; ++i) {
        const double pow2 = std::ldexp(1.0, -int(i));
        const double sigma_i = 0.5 * r * (1 + pow2);
        const double k_i = 2 * k0 * (1 - 0.5 * pow2);
        auto ball = ball_nodes(g, x0, sigma_i);
        KahanSum acc;
        for (auto idx : ball) {
            const double tau = u.values[idx] - k_i;
            if (tau > 0) acc.add((pow_pos(tau, p) + amax * pow_pos(tau, q)) * cellm);
        }
        y.push_back(acc.value());
    }
    return y;
}

DeGiorgiReport degiorgi_iteration(double y0, double b1, double b2, double beta,
                                  std::size_t imax) {
    if (!(y0 >= 0)) throw PreconditionViolation("starting value must be nonnegative");
    if (!(b1 > 0)) throw PreconditionViolation("leading factor must be positive");
    if (!(b2 > 1)) throw PreconditionViolation("growth base must exceed one");
    if (!(beta > 0)) throw PreconditionViolation("improvement exponent must be positive");

    DeGiorgiReport rep;
    rep.threshold = std::pow(b1, -1 / beta) * std::pow(b2, -1 / (beta * beta));
    rep.trace.reserve(imax + 1);
    const double tiny = std::numeric_limits<double>::min();
    double y = y0;
    rep.trace.push_back(y);
    for (std::size_t i = 0; i < imax; ++i) {
        if (y == 0) { // zero is a fixed point of the recursion
            rep.trace.push_back(0.0);
            continue;
        }
        const double growth = std::pow(b2, double(i));
        const double shrink = b1 * std::pow(y, 1 + beta);
        double next;
        if (shrink == 0) {
            next = 0.0;
        } else if (std::isinf(growth) || std::isinf(shrink)) {
            // the factors straddle the representable range; decide in logs so
            // a collapsing trace never meets the overflowing growth as 0 * inf
            const double lg =
                std::log(b1) + double(i) * std::log(b2) + (1 + beta) * std::log(y);
            next = lg < std::log(tiny) ? 0.0 : std::exp(lg);
        } else {
            next = growth * shrink;
            if (next < tiny) next = 0.0; // subnormals sit far below the gate
        }
        y = next;
        rep.trace.push_back(y);
    }
    rep.converged = rep.trace.back() <= 1e-12;
    return rep;
}

InequalityReport log_estimate_check(const EnergyContext& ctx, const DiscreteFunction& u,
                                    const Point& x0, double R, double rho, double d) {
    const Grid& g = *ctx.grid;
    if (!(d > 0)) throw PreconditionViolation("the lift must be positive");
    if (!(rho > 0) || rho > R / 2)
        throw BadRadii("the inner radius must lie in (0, R/2]");
    auto ballR = domain_ball(g, x0, R, "the outer ball");
    (void)clamped_ball_values(u, ballR);
    auto ball = ball_nodes(g, x0, rho);
    auto uv = clamped_ball_values(u, ball);

    const double w2 = g.cell_measure() * g.cell_measure();
    const double lhs = triangle_sum(ball.size(), [&](std::size_t bi, std::size_t bj) {
        const double dd =
            distance(g.n, g.nodes[ball[bi]], g.nodes[ball[bj]]);
        return 2 * std::fabs(std::log((uv[bi] + d) / (uv[bj] + d))) *
               inv_dist_n(g.n, dd) * w2;
    });

    double sup_u = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.interior[i]) sup_u = std::max(sup_u, std::fabs(u.values[i]));
    const double Mt = 1 + pow_pos(sup_u + d, ctx.cfg.q - ctx.cfg.p);
    auto T = log_tails(ctx, u, x0, R, d);
    const double n = g.n;

    InequalityReport rep;
    rep.label = "log-estimate";
    rep.lhs = lhs;
    rep.rhs = Mt * Mt *
              (pow_pos(rho, n) + pow_pos(rho, n + ctx.cfg.sp()) * T.sp_part +
               pow_pos(rho, n + ctx.cfg.tq()) * T.tq_part);
    rep.implied_constant = report_constant(rep.lhs, rep.rhs);
    rep.advisory = !stationarity_gate(ctx, u, true);
    return rep;
}

InequalityReport log_excess_check(const EnergyContext& ctx, const DiscreteFunction& u,
                                  const Point& x0, double R, double rho, double d,
                                  double zeta, double xi) {
    const Grid& g = *ctx.grid;
    if (!(d > 0)) throw PreconditionViolation("the lift must be positive");
    if (!(zeta > 0)) throw PreconditionViolation("the reference level must be positive");
    if (!(xi > 1)) throw BadXi("the cap base must exceed one");
    if (!(rho > 0) || rho > R / 2)
        throw BadRadii("the inner radius must lie in (0, R/2]");
    auto ballR = domain_ball(g, x0, R, "the outer ball");
    (void)clamped_ball_values(u, ballR);
    auto ball = ball_nodes(g, x0, rho);
    auto uv = clamped_ball_values(u, ball);

    const double cap = std::log(xi);
    std::vector<double> v(ball.size());
    for (std::size_t b = 0; b < ball.size(); ++b)
        v[b] = std::min(std::max(std::log(zeta + d) - std::log(uv[b] + d), 0.0), cap);
    KahanSum mean_acc;
    for (double x : v) mean_acc.add(x);
    const double vbar = mean_acc.value() / double(ball.size());
    KahanSum dev_acc;
    for (double x : v) dev_acc.add(std::fabs(x - vbar));

    double sup_u = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.interior[i]) sup_u = std::max(sup_u, std::fabs(u.values[i]));
    const double Mt = 1 + pow_pos(sup_u + d, ctx.cfg.q - ctx.cfg.p);
    auto T = log_tails(ctx, u, x0, R, d);

    InequalityReport rep;
    rep.label = "log-excess";
    rep.lhs = dev_acc.value() / double(ball.size());
    rep.rhs = Mt * Mt *
              (1 + pow_pos(rho, ctx.cfg.sp()) * T.sp_part +
               pow_pos(rho, ctx.cfg.tq()) * T.tq_part);
    rep.implied_constant = report_constant(rep.lhs, rep.rhs);
    rep.advisory = !stationarity_gate(ctx, u, true);
    return rep;
}

OscillationTrace oscillation_sequence(const DiscreteFunction& u, const Point& x0,
                                      double r, double sigma, std::size_t jmax,
                                      std::optional<double> K0,
                                      std::optional<double> gamma) {
    const Grid& g = *u.grid;
    if (!(sigma > 0) || sigma > 0.25)
        throw PreconditionViolation("the shrink ratio must lie in (0, 1/4]");
    (void)domain_ball(g, x0, r, "the ball");

    const std::size_t min_nodes = g.n == 1 ? 8 : 12;
    OscillationTrace tr;
    tr.x0 = x0;
    tr.r = r;
    tr.sigma = sigma;
    tr.K0 = K0;
    tr.gamma = gamma;
    for (std::size_t j = 0; j <= jmax; ++j) {
        const double rj = r * std::pow(sigma, double(j));
        auto ball = ball_nodes(g, x0, rj);
        if (ball.size() < min_nodes) break;
        double lo = u.values[ball[0]], hi = lo;
        for (auto i : ball) {
            lo = std::min(lo, u.values[i]);
            hi = std::max(hi, u.values[i]);
        }
        tr.radii.push_back(rj);
        tr.omega.push_back(hi - lo);
    }

    std::vector<double> lx, ly;
    for (std::size_t j = 0; j < tr.omega.size(); ++j)
        if (tr.omega[j] > 0) {
            lx.push_back(std::log(tr.radii[j]));
            ly.push_back(std::log(tr.omega[j]));
        }
    if (lx.size() < 3)
        throw TooFewLevels("the decay fit needs at least 3 resolved levels");
    double xb = 0, yb = 0;
    for (std::size_t j = 0; j < lx.size(); ++j) {
        xb += lx[j];
        yb += ly[j];
    }
    xb /= double(lx.size());
    yb /= double(lx.size());
    double sxy = 0, sxx = 0;
    for (std::size_t j = 0; j < lx.size(); ++j) {
        sxy += (lx[j] - xb) * (ly[j] - yb);
        sxx += (lx[j] - xb) * (lx[j] - xb);
    }
    tr.gamma_fit = sxy / sxx;
    double rss = 0;
    for (std::size_t j = 0; j < lx.size(); ++j) {
        const double e = ly[j] - (yb + tr.gamma_fit * (lx[j] - xb));
        rss += e * e;
    }
    tr.fit_residual = std::sqrt(rss / double(lx.size()));
    return tr;
}

double k0_quantity(const EnergyContext& ctx, const DiscreteFunction& u, const Point& x0,
                   double r) {
    const Grid& g = *ctx.grid;
    auto ball = domain_ball(g, x0, r, "the ball");
    double sup = 0;
    for (auto i : ball) sup = std::max(sup, std::fabs(u.values[i]));
    auto T = tail(ctx, u, x0, r);
    const double p = ctx.cfg.p, q = ctx.cfg.q;
    return 2 * (sup +
                pow_pos(pow_pos(r, ctx.cfg.sp()) * (T.p_part + T.q_part_sp), 1 / (p - 1)) +
                pow_pos(pow_pos(r, ctx.cfg.tq()) * T.q_part_tq, 1 / (q - 1)));
}

HolderConstants holder_constants(const ExponentConfig& cfg, double alpha, double sup_u,
                                 double d, double c_star, double c0) {
    if (!(alpha > 0) || alpha > 1)
        throw PreconditionViolation("the smoothness order must lie in (0, 1]");
    if (!(sup_u >= 0)) throw PreconditionViolation("the solution bound must be nonnegative");
    if (!(d >= 0)) throw PreconditionViolation("the lift must be nonnegative");
    if (!(c_star > 0) || !(c0 > 0))
        throw PreconditionViolation("the structural constants must be positive");
    const double kappa = cfg.require_kappa();
    if (!(kappa > 1))
        throw DegenerateKappa("the improvement exponent must exceed one");

    const double dbl_min = std::numeric_limits<double>::min();
    auto clamp_pos = [&](double x) { return x >= dbl_min ? x : dbl_min; };

    HolderConstants hc;
    hc.c_star = c_star;
    hc.c0 = c0;
    hc.M = 1 + pow_pos(sup_u, cfg.q - cfg.p);
    hc.M_tilde = 1 + pow_pos(sup_u + d, cfg.q - cfg.p);

    const double ln_nu =
        -(std::log(c0) + 2 * kappa * std::log(hc.M)) / (kappa - 1) -
        (cfg.n + cfg.tq() + 2 * cfg.q) * kappa / ((kappa - 1) * (kappa - 1)) *
            std::log(2.0);
    hc.nu_star = clamp_pos(std::exp(ln_nu));

    hc.sigma_candidates = {
        0.25,
        clamp_pos(std::pow(2.0, -2.0 / cfg.sp())),
        clamp_pos(std::pow(6.0, -4.0 * (cfg.q - 1) / (cfg.s * cfg.q))),
        clamp_pos(std::exp(-c_star * hc.M * hc.M * hc.M / hc.nu_star)),
    };
    hc.sigma = *std::min_element(hc.sigma_candidates.begin(), hc.sigma_candidates.end());

    const double ln_sigma = std::log(hc.sigma);
    hc.epsilon = clamp_pos(std::exp(cfg.s * cfg.q / (2 * (cfg.q - 1)) * ln_sigma));

    hc.gamma_candidates = {
        std::log(0.5) / ln_sigma,
        cfg.sp() / (2 * (cfg.p - 1)),
        cfg.tq() / (2 * (cfg.q - 1)),
        std::log1p(-hc.epsilon) / ln_sigma,
    };
    hc.gamma = *std::min_element(hc.gamma_candidates.begin(), hc.gamma_candidates.end());
    return hc;
}

InequalityReport sobolev_poincare_check(const EnergyContext& ctx, const DiscreteFunction& v,
                                        const Point& x0, double r, SPVariant variant) {
    const Grid& g = *ctx.grid;
    if (!(r > 0)) throw PreconditionViolation("ball radius must be positive");
    auto ball = ball_nodes(g, x0, r);
    if (ball.empty()) throw EmptyBall("the ball holds no nodes");
    const double pstar = ctx.cfg.require_p_star();

    KahanSum mean_acc;
    for (auto i : ball) mean_acc.add(v.values[i]);
    const double vbar = mean_acc.value() / double(ball.size());
    KahanSum dev_acc;
    for (auto i : ball) dev_acc.add(pow_pos(std::fabs(v.values[i] - vbar), pstar));
    const double dev_mean = dev_acc.value() / double(ball.size());

    const double m = variant == SPVariant::SP ? ctx.cfg.s : ctx.cfg.t;
    const double ell = variant == SPVariant::SP ? ctx.cfg.p : ctx.cfg.q;
    const double w2 = g.cell_measure() * g.cell_measure();
    const double expo = g.n + m * ell;
    const double pair_sum = triangle_sum(ball.size(), [&](std::size_t bi, std::size_t bj) {
        const std::size_t i = ball[bi], j = ball[bj];
        const double d = distance(g.n, g.nodes[i], g.nodes[j]);
        const double tau = std::fabs(v.values[i] - v.values[j]);
        return 2 * pow_pos(tau, ell) * w2 / std::pow(d, expo);
    });
    const double ball_measure = double(ball.size()) * g.cell_measure();

    InequalityReport rep;
    rep.label = variant == SPVariant::SP ? "sobolev-poincare-sp" : "sobolev-poincare-tq";
    rep.lhs = pow_pos(dev_mean, ell / pstar);
    rep.rhs = pow_pos(r, m * ell) * pair_sum / ball_measure;
    rep.implied_constant = report_constant(rep.lhs, rep.rhs);
    return rep;
}

InequalityReport inclusion_check(const EnergyContext& ctx, const DiscreteFunction& v,
                                 const std::vector<std::size_t>& region) {
    const Grid& g = *ctx.grid;
    const double s = ctx.cfg.s, t = ctx.cfg.t, p = ctx.cfg.p, q = ctx.cfg.q;
    if (p < q && s == t)
        throw DegenerateOrder(
            "a strict exponent gap needs a strict order gap to embed");

    InequalityReport rep;
    rep.label = "seminorm-inclusion";
    rep.lhs = seminorm(ctx, v, region, s, p);
    const double high = seminorm(ctx, v, region, t, q);
    double diam = 0;
    for (std::size_t a = 0; a < region.size(); ++a)
        for (std::size_t b = a + 1; b < region.size(); ++b)
            diam = std::max(diam,
                            distance(g.n, g.nodes[region[a]], g.nodes[region[b]]));
    if (p == q) {
        rep.rhs = pow_pos(diam, t - s) * high;
    } else {
        const double unit_ball = g.n == 1 ? 2.0 : 3.14159265358979323846;
        const double c =
            std::pow(g.n * (q - p) / ((t - s) * p * q) * unit_ball, (q - p) / (p * q));
        const double measure = double(region.size()) * g.cell_measure();
        rep.rhs = c * std::pow(measure, (q - p) / (p * q)) * pow_pos(diam, t - s) * high;
    }
    rep.implied_constant = report_constant(rep.lhs, rep.rhs);
    return rep;
}

InequalityReport ineq1_check(const EnergyContext& ctx, const DiscreteFunction& f,
                             const Point& x0, double r, double L0) {
    const Grid& g = *ctx.grid;
    if (!(L0 > 0)) throw PreconditionViolation("the phase weight must be positive");
    if (!check_boundedness_assumption(ctx.cfg))
        throw AssumptionViolated("the growth gap exceeds the critical exponent");
    auto ball = ball_nodes(g, x0, r);
    if (ball.empty()) throw EmptyBall("the ball holds no nodes");

    const double s = ctx.cfg.s, t = ctx.cfg.t, p = ctx.cfg.p, q = ctx.cfg.q;
    KahanSum lhs_acc;
    std::size_t nsupp = 0;
    for (auto i : ball) {
        const double a = std::fabs(f.values[i]);
        lhs_acc.add(pow_pos(a / pow_pos(r, s), p) + L0 * pow_pos(a / pow_pos(r, t), q));
        if (f.values[i] != 0) ++nsupp;
    }
    const double lhs = lhs_acc.value() / double(ball.size());

    const double w2 = g.cell_measure() * g.cell_measure();
    const double expo = g.n + ctx.cfg.sp();
    const double pair_sum = triangle_sum(ball.size(), [&](std::size_t bi, std::size_t bj) {
        const std::size_t i = ball[bi], j = ball[bj];
        const double d = distance(g.n, g.nodes[i], g.nodes[j]);
        return 2 * pow_pos(std::fabs(f.values[i] - f.values[j]), p) * w2 /
               std::pow(d, expo);
    });
    const double G = pair_sum / (double(ball.size()) * g.cell_measure());
    const double frac = double(nsupp) / double(ball.size());

    InequalityReport rep;
    rep.label = "support-mean-bound";
    rep.lhs = lhs;
    rep.rhs = L0 * pow_pos(r, (s - t) * q) * pow_pos(G, q / p) +
              pow_pos(frac, ctx.cfg.sp() / g.n) * G + pow_pos(frac, p - 1) * lhs;
    rep.implied_constant = report_constant(rep.lhs, rep.rhs);
    return rep;
}

InequalityReport ineq2_check(const EnergyContext& ctx, const DiscreteFunction& f,
                             const Point& x0, double r, double R) {
    const Grid& g = *ctx.grid;
    if (!ctx.coeff.holder)
        throw AssumptionViolated("the coefficient carries no smoothness modulus");
    if (!check_holder_assumption(ctx.cfg, ctx.coeff.holder->alpha))
        throw AssumptionViolated(
            "the order gap exceeds the coefficient's smoothness order");
    if (!(r > 0) || !(R <= 1) || r > R || r < R / 2)
        throw RadiiOutOfRange("the radii must satisfy R/2 <= r <= R <= 1");
    const double kappa = ctx.cfg.require_kappa();
    auto ball = ball_nodes(g, x0, r);
    if (ball.empty()) throw EmptyBall("the inner ball holds no nodes");
    auto [a_lo, a_hi] = coefficient_extrema(g, ctx.coeff, x0, R);

    const double s = ctx.cfg.s, t = ctx.cfg.t, p = ctx.cfg.p, q = ctx.cfg.q;
    auto base = [&](double a_se, double x) {
        return pow_pos(x / pow_pos(r, s), p) + a_se * pow_pos(x / pow_pos(r, t), q);
    };
    KahanSum hi_acc, lo_acc;
    double supf = 0;
    for (auto i : ball) {
        const double a = std::fabs(f.values[i]);
        hi_acc.add(pow_pos(base(a_hi, a), kappa));
        lo_acc.add(base(a_lo, a));
        supf = std::max(supf, a);
    }
    const double ball_count = double(ball.size());
    const double Hmean = modular(ctx, f, ball) / (ball_count * g.cell_measure());

    InequalityReport rep;
    rep.label = "extrema-mean-bound";
    rep.lhs = pow_pos(hi_acc.value() / ball_count, 1 / kappa);
    rep.rhs = (1 + pow_pos(supf, q - p)) * (Hmean + lo_acc.value() / ball_count);
    rep.implied_constant = report_constant(rep.lhs, rep.rhs);
    return rep;
}

double calibrated_c(double p) {
    if (!(p >= 1)) throw PreconditionViolation("the exponent must be at least one");
    if (p == 1) return 1.0;
    return 2.0 / std::pow(std::pow(2.0, 1 / (p - 1)) - 1, p - 1);
}

std::pair<bool, bool> numeric_ineq_check(double a, double b, double p, double eps) {
    if (!(a >= 0) || !(b >= 0))
        throw PreconditionViolation("the arguments must be nonnegative");
    if (!(p >= 1)) throw PreconditionViolation("the exponent must be at least one");
    if (!(eps > 0) || eps > 1)
        throw PreconditionViolation("the splitting weight must lie in (0, 1]");

    const double lhs = pow_pos(a, p) - pow_pos(b, p);
    const double gap = std::fabs(a - b);
    const double rhs1 = p * pow_pos(a, p - 1) * gap;
    const double rhs2 =
        eps * pow_pos(b, p) + calibrated_c(p) * pow_pos(eps, 1 - p) * pow_pos(gap, p);
    const double scale = 1 + std::fabs(lhs);
    return {lhs <= rhs1 + 1e-12 * (scale + rhs1), lhs <= rhs2 + 1e-12 * (scale + rhs2)};
}

} // namespace nldp
