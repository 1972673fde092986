#include "nldp/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "nldp/grid.hpp"

namespace nldp {

namespace {

constexpr double kCriticalTol = 1e-12;
constexpr std::size_t kPairSampleCap = 1'000'000;
constexpr std::uint64_t kSampleSeed = 0x9e3779b97f4a7c15ULL;

std::optional<double> conjugate(int n, double m, double ell, double q,
                                const std::optional<double>& override_value) {
    const double prod = m * ell;
    if (std::fabs(prod - n) <= kCriticalTol) {
        return override_value ? override_value : std::optional<double>(q + 1);
    }
    if (prod < n) return n * ell / (n - prod);
    return override_value;
}

} // namespace

double ExponentConfig::require_p_star() const {
    if (!p_star_s)
        throw ConjugateRequired(
            "the (s,p) Sobolev conjugate is undefined when s*p exceeds the dimension; "
            "supply an override");
    return *p_star_s;
}

double ExponentConfig::require_kappa() const {
    if (!kappa)
        throw ConjugateRequired(
            "kappa needs both Sobolev conjugates; one of them is undefined here");
    return *kappa;
}

ExponentConfig validate_exponents(int n, double s, double t, double p, double q,
                                  std::optional<double> p_star_override) {
    if (n != 1 && n != 2) throw OrderViolation("spatial dimension must be 1 or 2");
    if (!std::isfinite(s) || !std::isfinite(t) || !std::isfinite(p) || !std::isfinite(q))
        throw OrderViolation("exponents must be finite");
    if (!(0 < s && s <= t && t < 1))
        throw OrderViolation("fractional orders must satisfy 0 < s <= t < 1");
    if (!(1 < p && p <= q))
        throw OrderViolation("growth exponents must satisfy 1 < p <= q < infinity");
    if (p_star_override &&
        (!std::isfinite(*p_star_override) || !(*p_star_override > p)))
        throw OrderViolation("conjugate override must lie in (p, infinity)");

    ExponentConfig cfg;
    cfg.n = n;
    cfg.s = s;
    cfg.t = t;
    cfg.p = p;
    cfg.q = q;
    if (s * p < n - kCriticalTol) p_star_override.reset();
    cfg.p_star_s = conjugate(n, s, p, q, p_star_override);
    cfg.q_star_t = conjugate(n, t, q, q, std::nullopt);
    if (cfg.p_star_s && cfg.q_star_t)
        cfg.kappa = std::min(*cfg.p_star_s / p, *cfg.q_star_t / q);
    return cfg;
}

bool check_boundedness_assumption(const ExponentConfig& cfg) {
    const double sp = cfg.sp();
    if (sp >= cfg.n) return true;
    return cfg.q <= cfg.n * cfg.p / (cfg.n - sp);
}

bool check_holder_assumption(const ExponentConfig& cfg, double alpha) {
    if (!(alpha > 0)) throw PreconditionViolation("alpha must be positive");
    return cfg.tq() <= cfg.sp() + alpha;
}

Coefficient constant_coefficient(double value) {
    if (!(value >= 0) || !std::isfinite(value))
        throw PreconditionViolation("coefficient value must be finite and nonnegative");
    Coefficient a;
    a.eval = [value](const Point&, const Point&) { return value; };
    a.sup_norm = value;
    a.holder = HolderData{1.0, 0.0};
    return a;
}

Coefficient zero_coefficient() { return constant_coefficient(0.0); }

Coefficient cosine_product_coefficient() {
    Coefficient a;
    a.eval = [](const Point& x, const Point& y) {
        const double xs = x[0] + x[1];
        const double ys = y[0] + y[1];
        return 0.5 * (1.0 + std::cos(xs) * std::cos(ys));
    };
    a.sup_norm = 1.0;
    a.holder = HolderData{1.0, 1.0};
    return a;
}

Coefficient distance_power_coefficient(double alpha, double cap) {
    if (!(alpha > 0 && alpha <= 1)) throw PreconditionViolation("alpha must be in (0,1]");
    if (!(cap > 0)) throw PreconditionViolation("cap must be positive");
    Coefficient a;
    a.eval = [alpha, cap](const Point& x, const Point& y) {
        const double dx = x[0] - y[0];
        const double dy = x[1] - y[1];
        const double d = std::sqrt(dx * dx + dy * dy);
        return std::min(cap, std::pow(d, alpha));
    };
    a.sup_norm = cap;
    a.holder = HolderData{alpha, 1.0};
    return a;
}

KernelPair model_kernels(const ExponentConfig& cfg) {
    const int n = cfg.n;
    const double esp = n + cfg.sp();
    const double etq = n + cfg.tq();
    KernelPair k;
    k.k_sp = [n, esp](const Point& x, const Point& y) {
        return std::pow(distance(n, x, y), -esp);
    };
    k.k_tq = [n, etq](const Point& x, const Point& y) {
        return std::pow(distance(n, x, y), -etq);
    };
    k.lambda = 1.0;
    k.model_flag = true;
    return k;
}

KernelPair perturbed_kernels(const ExponentConfig& cfg, double lambda) {
    if (!(lambda >= 1) || !std::isfinite(lambda))
        throw PreconditionViolation("ellipticity constant must be >= 1");
    const int n = cfg.n;
    const double esp = n + cfg.sp();
    const double etq = n + cfg.tq();
    const double eta = std::log(lambda);
    // (x[0]+y[0]) + (x[1]+y[1]) keeps the evaluation bitwise symmetric in (x,y)
    auto factor = [eta](const Point& x, const Point& y) {
        return std::exp(eta * std::sin((x[0] + y[0]) + (x[1] + y[1])));
    };
    KernelPair k;
    k.k_sp = [n, esp, factor](const Point& x, const Point& y) {
        return factor(x, y) * std::pow(distance(n, x, y), -esp);
    };
    k.k_tq = [n, etq, factor](const Point& x, const Point& y) {
        return factor(x, y) * std::pow(distance(n, x, y), -etq);
    };
    k.lambda = lambda;
    k.model_flag = false;
    return k;
}

std::pair<double, double> coefficient_extrema(const Grid& grid, const Coefficient& a,
                                              const Point& x0, double r) {
    const auto ball = ball_nodes(grid, x0, r);
    if (ball.empty()) throw EmptySample("no grid node lies inside the ball");

    double lo = a(grid.nodes[ball[0]], grid.nodes[ball[0]]);
    double hi = lo;
    auto visit = [&](std::size_t i, std::size_t j) {
        const double v = a(grid.nodes[i], grid.nodes[j]);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    };

    const std::size_t k = ball.size();
    if (k * k <= kPairSampleCap) {
        for (std::size_t bi = 0; bi < k; ++bi)
            for (std::size_t bj = bi; bj < k; ++bj) visit(ball[bi], ball[bj]);
    } else {
        std::mt19937_64 rng(kSampleSeed);
        std::uniform_int_distribution<std::size_t> pick(0, k - 1);
        for (std::size_t it = 0; it < kPairSampleCap; ++it)
            visit(ball[pick(rng)], ball[pick(rng)]);
    }
    return {lo, hi};
}

CoefficientControlReport coefficient_control_check(const Grid& grid, const Coefficient& a,
                                                   const ExponentConfig& cfg,
                                                   const Point& x0, double r) {
    if (!a.holder) throw MissingHolderData("coefficient carries no Holder modulus");
    const auto [a1, a2] = coefficient_extrema(grid, a, x0, r);
    (void)a1;

    const double gap = cfg.tq() - cfg.sp();
    const double alpha = a.holder->alpha;
    const double C = std::pow(a.holder->modulus, gap / alpha) *
                     std::pow(2 * a.sup_norm, 1 - gap / alpha);

    CoefficientControlReport rep;
    rep.control_constant = C;
    rep.a2 = a2;

    const auto ball = ball_nodes(grid, x0, r);
    const std::size_t k = ball.size();
    const std::size_t total = grid.size();
    auto visit = [&](std::size_t i, std::size_t j) {
        const double num = a(grid.nodes[i], grid.nodes[j]);
        const double denom = C * std::pow(distance(grid.n, grid.nodes[i], grid.nodes[j]), gap) + a2;
        double ratio;
        if (denom == 0)
            ratio = num == 0 ? 0.0 : std::numeric_limits<double>::infinity();
        else
            ratio = num / denom;
        rep.max_ratio = std::max(rep.max_ratio, ratio);
    };

    if (k * total <= kPairSampleCap) {
        for (std::size_t bi = 0; bi < k; ++bi)
            for (std::size_t j = 0; j < total; ++j) visit(ball[bi], j);
    } else {
        std::mt19937_64 rng(kSampleSeed);
        std::uniform_int_distribution<std::size_t> pick_ball(0, k - 1);
        std::uniform_int_distribution<std::size_t> pick_any(0, total - 1);
        for (std::size_t it = 0; it < kPairSampleCap; ++it)
            visit(ball[pick_ball(rng)], pick_any(rng));
    }
    return rep;
}

} // namespace nldp
