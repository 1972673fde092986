#include "nldp/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "nldp/errors.hpp"
#include "nldp/parallel.hpp"

namespace nldp {

namespace {

double datum_sup(const DiscreteFunction& g) {
    const Grid& grid = *g.grid;
    double m = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (!grid.interior[i]) m = std::max(m, std::fabs(g.values[i]));
    if (g.beyond_box) m = std::max(m, std::fabs(*g.beyond_box));
    return m;
}

std::pair<double, double> datum_range(const DiscreteFunction& g) {
    const Grid& grid = *g.grid;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.interior[i]) continue;
        lo = std::min(lo, g.values[i]);
        hi = std::max(hi, g.values[i]);
    }
    if (g.beyond_box) {
        lo = std::min(lo, *g.beyond_box);
        hi = std::max(hi, *g.beyond_box);
    }
    return {lo, hi};
}

double max_norm_interior(const Grid& g, const std::vector<double>& v) {
    double m = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.interior[i]) m = std::max(m, std::fabs(v[i]));
    return m;
}

} // namespace

std::pair<DiscreteFunction, SolveReport> minimize(const EnergyContext& ctx,
                                                  const DiscreteFunction& g,
                                                  const SolveOptions& opts) {
    const Grid& grid = *ctx.grid;
    if (g.values.size() != grid.size())
        throw PreconditionViolation("datum does not match the grid");
    for (double v : g.values)
        if (!std::isfinite(v)) throw PreconditionViolation("datum must be finite");
    if (!(opts.shrink > 0 && opts.shrink < 1))
        throw PreconditionViolation("shrink factor must lie in (0,1)");
    if (!(opts.sufficient_decrease > 0 && opts.sufficient_decrease <= 0.5))
        throw PreconditionViolation("sufficient-decrease constant must lie in (0, 0.5]");
    if (!(opts.initial_step > 0))
        throw PreconditionViolation("initial step must be positive");
    if (opts.grad_tol < 0)
        throw PreconditionViolation("gradient tolerance must be nonnegative");

    const double pq = std::max(ctx.cfg.p, ctx.cfg.q);
    const double tol = opts.grad_tol > 0
                           ? opts.grad_tol
                           : 1e-9 * (1 + std::pow(datum_sup(g), pq - 1));

    const auto inter = interior_nodes(grid);
    DiscreteFunction u = g;
    u.exterior_frozen = true;

    InitMode mode = opts.init;
    if (mode == InitMode::Default)
        mode = (ctx.cfg.p == 2 && ctx.cfg.q == 2) ? InitMode::Default : InitMode::DatumMean;
    switch (mode) {
        case InitMode::Default: {
            u = solve_quadratic(ctx, g);
            u.exterior_frozen = true;
            break;
        }
        case InitMode::ExtendDatum:
            break;
        case InitMode::ZeroInterior:
            for (auto i : inter) u.values[i] = 0.0;
            break;
        case InitMode::DatumMean: {
            double sum = 0;
            std::size_t cnt = 0;
            for (std::size_t i = 0; i < grid.size(); ++i)
                if (!grid.interior[i]) {
                    sum += g.values[i];
                    ++cnt;
                }
            const double mean = cnt ? sum / static_cast<double>(cnt) : 0.0;
            for (auto i : inter) u.values[i] = mean;
            break;
        }
        case InitMode::Random: {
            auto [lo, hi] = datum_range(g);
            std::mt19937_64 rng(opts.seed);
            std::uniform_real_distribution<double> U(lo, hi);
            for (auto i : inter) u.values[i] = lo == hi ? lo : U(rng);
            break;
        }
        case InitMode::Given:
            if (opts.initial_values.size() != grid.size())
                throw PreconditionViolation("initial_values must cover every node");
            for (auto i : inter) u.values[i] = opts.initial_values[i];
            break;
    }

    std::vector<double> diag(grid.size(), 1.0);
    if (opts.precondition) {
        parallel_for(inter.size(), [&](std::size_t k) {
            const std::size_t i = inter[k];
            KahanSum acc;
            for (std::size_t j = 0; j < grid.size(); ++j) {
                if (j == i) continue;
                acc.add(2 * (ctx.ksp_weight(i, j) + ctx.atq_weight(i, j)));
            }
            diag[i] = std::max(acc.value(), 1e-300);
        });
    }

    SolveReport rep;
    double E = energy(ctx, u);
    if (!std::isfinite(E))
        throw NonfiniteEncountered("energy is not finite at the initial iterate");
    rep.energy_trace.push_back(E);

    const double c1 = opts.sufficient_decrease;
    auto merit = [&](const std::vector<double>& grad) {
        KahanSum acc;
        for (auto i : inter) acc.add(grad[i] * grad[i] / diag[i]);
        return acc.value();
    };

    double step = opts.initial_step;
    bool converged = false;
    std::vector<double> grad = energy_gradient(ctx, u);
    while (true) {
        const double gnorm = max_norm_interior(grid, grad);
        if (!std::isfinite(gnorm))
            throw NonfiniteEncountered("gradient is not finite");
        if (gnorm <= tol) {
            converged = true;
            break;
        }
        if (rep.iters >= opts.max_iters) break;

        const double slope = merit(grad);
        // once the decrease demanded by the sufficient-decrease test drops below
        // the rounding resolution of the energy, two evaluations of it are
        // indistinguishable and the test becomes noise; past that point a trial
        // step is scored on the preconditioned gradient merit instead, which
        // keeps full relative accuracy down to the gradient noise floor
        const double resolution =
            16 * std::numeric_limits<double>::epsilon() * std::fabs(E);

        bool accepted = false;
        bool fresh_grad = false;
        std::vector<double> grad_t;
        while (step > 1e-20) {
            auto trial = u;
            for (auto i : inter) trial.values[i] = u.values[i] - step * grad[i] / diag[i];
            if (c1 * step * slope > resolution) {
                const double Et = energy(ctx, trial);
                if (std::isfinite(Et) && Et <= E - c1 * step * slope) {
                    u = std::move(trial);
                    E = Et;
                    accepted = true;
                    fresh_grad = false;
                    break;
                }
            } else {
                grad_t = energy_gradient(ctx, trial);
                const double mt = merit(grad_t);
                if (std::isfinite(mt) && mt < slope) {
                    u = std::move(trial);
                    accepted = true;
                    fresh_grad = true;
                    break;
                }
            }
            step *= opts.shrink;
        }
        if (!accepted) break;
        ++rep.iters;
        rep.energy_trace.push_back(E);
        step = std::min(step * 2, 1e12);
        if (fresh_grad)
            grad = std::move(grad_t);
        else
            grad = energy_gradient(ctx, u);
    }

    const double Ef = energy(ctx, u);
    rep.energy = std::isfinite(Ef) ? std::min(E, Ef) : E;
    rep.grad_norm = max_norm_interior(grid, grad);
    rep.converged = converged || rep.grad_norm <= tol;
    return {std::move(u), rep};
}

DiscreteFunction solve_quadratic(const EnergyContext& ctx, const DiscreteFunction& g) {
    if (!(ctx.cfg.p == 2 && ctx.cfg.q == 2))
        throw NotQuadratic("direct solve requires p = q = 2");
    const Grid& grid = *ctx.grid;
    if (g.values.size() != grid.size())
        throw PreconditionViolation("datum does not match the grid");

    const auto inter = interior_nodes(grid);
    DiscreteFunction u = g;
    u.exterior_frozen = true;
    if (inter.empty()) return u;

    const auto m = static_cast<Eigen::Index>(inter.size());
    std::vector<std::size_t> pos(grid.size(), 0);
    for (std::size_t k = 0; k < inter.size(); ++k) pos[inter[k]] = k;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    for (std::size_t k = 0; k < inter.size(); ++k) {
        const std::size_t i = inter[k];
        double dsum = 0;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            if (j == i) continue;
            const double c = ctx.ksp_weight(i, j) + ctx.atq_weight(i, j);
            dsum += c;
            if (grid.interior[j])
                A(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(pos[j])) -= c;
            else
                b(static_cast<Eigen::Index>(k)) += c * g.values[j];
        }
        A(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = dsum;
    }

    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success)
        throw SingularSystem("stationarity system is not positive definite");
    Eigen::VectorXd x = llt.solve(b);
    const double scale = b.norm() + A.norm() * x.norm();
    if (scale > 0 && (A * x - b).norm() > 1e-10 * scale)
        throw SingularSystem("direct solve residual is unexpectedly large");

    for (std::size_t k = 0; k < inter.size(); ++k)
        u.values[inter[k]] = x(static_cast<Eigen::Index>(k));
    return u;
}

MaxPrincipleReport maximum_principle_check(const DiscreteFunction& u,
                                           const DiscreteFunction& g) {
    const Grid& grid = *u.grid;
    auto [lo, hi] = datum_range(g);
    MaxPrincipleReport rep;
    rep.inf_datum = lo;
    rep.sup_datum = hi;
    rep.tol = 1e-6 * (1 + std::max(std::fabs(lo), std::fabs(hi)));
    rep.min_ok = true;
    rep.max_ok = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!grid.interior[i]) continue;
        if (u.values[i] < lo - rep.tol) rep.min_ok = false;
        if (u.values[i] > hi + rep.tol) rep.max_ok = false;
    }
    return rep;
}

} // namespace nldp
