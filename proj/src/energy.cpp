#include "nldp/energy.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nldp/errors.hpp"
#include "nldp/parallel.hpp"

namespace nldp {

namespace {

constexpr std::size_t kCachePairBudget = 32'000'000;
constexpr std::size_t kValidationCap = 1'000'000;
constexpr std::size_t kQuadrupleCap = 100'000;
constexpr std::uint64_t kValidationSeed = 0x6a09e667f3bcc909ULL;
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

void validate_context(const EnergyContext& ctx) {
    const Grid& g = *ctx.grid;
    if (g.n != ctx.cfg.n)
        throw PreconditionViolation("grid and exponent dimensions differ");

    const std::size_t N = g.size();
    const double esp = g.n + ctx.cfg.sp();
    const double etq = g.n + ctx.cfg.tq();
    const double lam = ctx.kernels.lambda;
    const double coeff_tol = 1 + 1e-12;
    const double env_lo = (1.0 / lam) * (1 - 1e-9);
    const double env_hi = lam * (1 + 1e-9);

    auto check_pair = [&](std::size_t i, std::size_t j) {
        const Point& x = g.nodes[i];
        const Point& y = g.nodes[j];
        const double axy = ctx.coeff(x, y);
        if (axy != ctx.coeff(y, x))
            throw PreconditionViolation("coefficient is not symmetric");
        if (!(axy >= 0) || axy > ctx.coeff.sup_norm * coeff_tol)
            throw PreconditionViolation("coefficient breaches its stated bounds");
        if (i == j) return;
        const double d = distance(g.n, x, y);
        const double ksp = ctx.kernels.k_sp(x, y);
        const double ktq = ctx.kernels.k_tq(x, y);
        if (ksp != ctx.kernels.k_sp(y, x) || ktq != ctx.kernels.k_tq(y, x))
            throw PreconditionViolation("kernel is not symmetric");
        const double rsp = ksp * std::pow(d, esp);
        const double rtq = ktq * std::pow(d, etq);
        if (!(rsp >= env_lo && rsp <= env_hi && rtq >= env_lo && rtq <= env_hi))
            throw PreconditionViolation("kernel breaches the ellipticity envelope");
    };

    if (N * N <= kValidationCap) {
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = i; j < N; ++j) check_pair(i, j);
    } else {
        std::mt19937_64 rng(kValidationSeed);
        std::uniform_int_distribution<std::size_t> pick(0, N - 1);
        for (std::size_t it = 0; it < kValidationCap; ++it)
            check_pair(pick(rng), pick(rng));
    }

    if (ctx.coeff.holder) {
        const double alpha = ctx.coeff.holder->alpha;
        const double mod = ctx.coeff.holder->modulus;
        std::mt19937_64 rng(kValidationSeed ^ 0xabcdef);
        std::uniform_int_distribution<std::size_t> pick(0, N - 1);
        for (std::size_t it = 0; it < kQuadrupleCap; ++it) {
            const Point& x1 = g.nodes[pick(rng)];
            const Point& y1 = g.nodes[pick(rng)];
            const Point& x2 = g.nodes[pick(rng)];
            const Point& y2 = g.nodes[pick(rng)];
            const double lhs = std::fabs(ctx.coeff(x1, y1) - ctx.coeff(x2, y2));
            const double gap = distance(g.n, x1, x2) + distance(g.n, y1, y2);
            if (lhs > mod * std::pow(gap, alpha) * (1 + 1e-9) + 1e-12)
                throw PreconditionViolation("coefficient breaches its Holder modulus");
        }
    }
}

} // namespace

double EnergyContext::ksp_weight(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    if (has_cache()) return ksp_w[pair_index(i, j)];
    if (!pair_active(i, j)) return 0.0;
    const double m = grid->cell_measure();
    return kernels.k_sp(grid->nodes[i], grid->nodes[j]) * m * m;
}

double EnergyContext::atq_weight(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    if (has_cache()) return atq_w[pair_index(i, j)];
    if (!pair_active(i, j)) return 0.0;
    const double m = grid->cell_measure();
    return coeff(grid->nodes[i], grid->nodes[j]) *
           kernels.k_tq(grid->nodes[i], grid->nodes[j]) * m * m;
}

EnergyContext make_context(const Grid& grid, const ExponentConfig& cfg,
                           const Coefficient& coeff, const KernelPair& kernels) {
    EnergyContext ctx;
    ctx.grid = &grid;
    ctx.cfg = cfg;
    ctx.coeff = coeff;
    ctx.kernels = kernels;
    validate_context(ctx);

    const std::size_t N = grid.size();
    const std::size_t pairs = N >= 2 ? N * (N - 1) / 2 : 0;
    if (pairs > 0 && pairs <= kCachePairBudget) {
        ctx.ksp_w.resize(pairs);
        ctx.atq_w.resize(pairs);
        const double m = grid.cell_measure();
        const double w = m * m;
        const bool a_zero = coeff.sup_norm == 0;
        parallel_for(N - 1, [&](std::size_t i) {
            std::size_t idx = ctx.pair_index(i, i + 1);
            for (std::size_t j = i + 1; j < N; ++j, ++idx) {
                if (!ctx.pair_active(i, j)) {
                    ctx.ksp_w[idx] = 0.0;
                    ctx.atq_w[idx] = 0.0;
                    continue;
                }
                const Point& x = grid.nodes[i];
                const Point& y = grid.nodes[j];
                ctx.ksp_w[idx] = kernels.k_sp(x, y) * w;
                ctx.atq_w[idx] = a_zero ? 0.0 : coeff(x, y) * kernels.k_tq(x, y) * w;
            }
        });
    }
    return ctx;
}

double signed_power(double tau, double ell) {
    if (tau == 0) return 0.0;
    if (ell == 2.0) return tau;
    const double mag = std::pow(std::fabs(tau), ell - 1);
    return tau > 0 ? mag : -mag;
}

double h_density(const EnergyContext& ctx, const Point& x, const Point& y, double tau) {
    if (tau < 0) throw PreconditionViolation("density argument must be nonnegative");
    const double d = distance(ctx.cfg.n, x, y);
    if (d == 0) throw CoincidentPoints("density is singular at coincident points");
    return pow_pos(tau, ctx.cfg.p) / pow_pos(d, ctx.cfg.sp()) +
           ctx.coeff(x, y) * pow_pos(tau, ctx.cfg.q) / pow_pos(d, ctx.cfg.tq());
}

double h_deriv_density(const EnergyContext& ctx, const Point& x, const Point& y,
                       double tau) {
    if (tau < 0) throw PreconditionViolation("density argument must be nonnegative");
    const double d = distance(ctx.cfg.n, x, y);
    if (d == 0) throw CoincidentPoints("density is singular at coincident points");
    return pow_pos(tau, ctx.cfg.p - 1) / pow_pos(d, ctx.cfg.sp()) +
           ctx.coeff(x, y) * pow_pos(tau, ctx.cfg.q - 1) / pow_pos(d, ctx.cfg.tq());
}

double modular(const EnergyContext& ctx, const DiscreteFunction& v,
               const std::vector<std::size_t>& S) {
    if (S.empty()) throw EmptySet("modular needs a nonempty node set");
    const Grid& g = *ctx.grid;
    const double w = g.cell_measure() * g.cell_measure();
    return triangle_sum(S.size(), [&](std::size_t bi, std::size_t bj) {
        const std::size_t i = S[bi];
        const std::size_t j = S[bj];
        const double d = distance(g.n, g.nodes[i], g.nodes[j]);
        const double tau = std::fabs(v.values[i] - v.values[j]);
        const double H = pow_pos(tau, ctx.cfg.p) / pow_pos(d, ctx.cfg.sp()) +
                         ctx.coeff(g.nodes[i], g.nodes[j]) * pow_pos(tau, ctx.cfg.q) /
                             pow_pos(d, ctx.cfg.tq());
        return 2 * H * inv_dist_n(g.n, d) * w;
    });
}

double seminorm(const EnergyContext& ctx, const DiscreteFunction& v,
                const std::vector<std::size_t>& S, double m, double ell) {
    if (S.empty()) throw EmptySet("seminorm needs a nonempty node set");
    if (!(ell >= 1) || !(m > 0 && m < 1))
        throw PreconditionViolation("seminorm order must have ell >= 1 and m in (0,1)");
    const Grid& g = *ctx.grid;
    const double w = g.cell_measure() * g.cell_measure();
    const double expo = g.n + m * ell;
    const double total = triangle_sum(S.size(), [&](std::size_t bi, std::size_t bj) {
        const std::size_t i = S[bi];
        const std::size_t j = S[bj];
        const double d = distance(g.n, g.nodes[i], g.nodes[j]);
        const double tau = std::fabs(v.values[i] - v.values[j]);
        return 2 * pow_pos(tau, ell) * w / std::pow(d, expo);
    });
    return std::pow(total, 1.0 / ell);
}

double energy(const EnergyContext& ctx, const DiscreteFunction& v) {
    const Grid& g = *ctx.grid;
    const std::size_t N = g.size();
    const double inv_p = 1.0 / ctx.cfg.p;
    const double inv_q = 1.0 / ctx.cfg.q;
    const double p = ctx.cfg.p;
    const double q = ctx.cfg.q;
    if (ctx.has_cache()) {
        const std::size_t total = N * (N - 1) / 2;
        const double* ksp = ctx.ksp_w.data();
        const double* atq = ctx.atq_w.data();
        const double* val = v.values.data();
        return reduce_blocks(total, kBlock, [&](std::size_t b0, std::size_t b1) {
            std::size_t lo = 0, hi = N - 1;
            while (lo < hi) {
                const std::size_t mid = (lo + hi + 1) / 2;
                if (mid * N - mid * (mid + 1) / 2 <= b0)
                    lo = mid;
                else
                    hi = mid - 1;
            }
            std::size_t i = lo;
            std::size_t j = i + 1 + (b0 - (i * N - i * (i + 1) / 2));
            KahanSum acc;
            for (std::size_t idx = b0; idx < b1; ++idx) {
                const double du = std::fabs(val[i] - val[j]);
                acc.add(2 * (inv_p * pow_pos(du, p) * ksp[idx] +
                             inv_q * pow_pos(du, q) * atq[idx]));
                if (++j == N) {
                    ++i;
                    j = i + 1;
                }
            }
            return acc.value();
        });
    }
    return triangle_sum(N, [&](std::size_t i, std::size_t j) {
        const double du = std::fabs(v.values[i] - v.values[j]);
        return 2 * (inv_p * pow_pos(du, p) * ctx.ksp_weight(i, j) +
                    inv_q * pow_pos(du, q) * ctx.atq_weight(i, j));
    });
}

TailReport tail(const EnergyContext& ctx, const DiscreteFunction& v, const Point& x0,
                double r) {
    const Grid& g = *ctx.grid;
    if (!(r > 0)) throw PreconditionViolation("tail radius must be positive");
    if (r > g.box_distance(x0))
        throw BallOutsideBox("the ball must fit inside the truncation box");

    const double sp = ctx.cfg.sp();
    const double tq = ctx.cfg.tq();
    const double p = ctx.cfg.p;
    const double q = ctx.cfg.q;
    const double cellm = g.cell_measure();

    auto part = [&](double power, double kernel_order) {
        return reduce_blocks(g.size(), kBlock, [&](std::size_t b0, std::size_t b1) {
            KahanSum acc;
            for (std::size_t i = b0; i < b1; ++i) {
                const double d = distance(g.n, g.nodes[i], x0);
                if (d < r) continue;
                acc.add(pow_pos(std::fabs(v.values[i]), power) /
                        std::pow(d, g.n + kernel_order) * cellm);
            }
            return acc.value();
        });
    };

    TailReport rep;
    rep.x0 = x0;
    rep.r = r;
    const double cp = exterior_closure(g, v, x0, sp, p - 1);
    const double cq_sp = exterior_closure(g, v, x0, sp, q - 1);
    const double cq_tq = exterior_closure(g, v, x0, tq, q - 1);
    rep.p_part = part(p - 1, sp) + cp;
    rep.q_part_sp = part(q - 1, sp) + cq_sp;
    rep.q_part_tq = part(q - 1, tq) + cq_tq;
    rep.closure = cp + cq_sp + cq_tq;
    return rep;
}

double weak_residual(const EnergyContext& ctx, const DiscreteFunction& u,
                     const DiscreteFunction& phi) {
    const Grid& g = *ctx.grid;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!g.interior[i] && phi.values[i] != 0.0)
            throw TestFunctionNotCompactlySupported(
                "test function must vanish at every exterior node");
    if (phi.beyond_box && *phi.beyond_box != 0.0)
        throw TestFunctionNotCompactlySupported(
            "test function must vanish beyond the truncation box");

    const double p = ctx.cfg.p;
    const double q = ctx.cfg.q;
    return triangle_sum(g.size(), [&](std::size_t i, std::size_t j) {
        const double du = u.values[i] - u.values[j];
        const double dphi = phi.values[i] - phi.values[j];
        if (dphi == 0 || du == 0) return 0.0;
        return 2 * dphi *
               (signed_power(du, p) * ctx.ksp_weight(i, j) +
                signed_power(du, q) * ctx.atq_weight(i, j));
    });
}

std::vector<double> energy_gradient(const EnergyContext& ctx, const DiscreteFunction& u) {
    const Grid& g = *ctx.grid;
    const std::size_t N = g.size();
    const double p = ctx.cfg.p;
    const double q = ctx.cfg.q;
    std::vector<double> grad(N, 0.0);
    const auto inter = interior_nodes(g);
    parallel_for(inter.size(), [&](std::size_t k) {
        const std::size_t i = inter[k];
        KahanSum acc;
        for (std::size_t j = 0; j < N; ++j) {
            if (j == i) continue;
            const double du = u.values[i] - u.values[j];
            if (du == 0) continue;
            acc.add(2 * (signed_power(du, p) * ctx.ksp_weight(i, j) +
                         signed_power(du, q) * ctx.atq_weight(i, j)));
        }
        grad[i] = acc.value();
    });
    return grad;
}

} // namespace nldp
