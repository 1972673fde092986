#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nldp/energy.hpp"

namespace nldp {

enum class InitMode {
    Default,     // quadratic solve when p=q=2, else the exterior-datum mean
    ExtendDatum, // keep the datum's interior samples
    ZeroInterior,
    DatumMean,
    Random, // uniform between the datum extrema, seeded
    Given,  // take SolveOptions::initial_values
};

struct SolveOptions {
    std::size_t max_iters = 20000;
    double grad_tol = 0; // 0 = 1e-9 * (1 + ||g||^{max(p,q)-1})
    double initial_step = 1.0;
    double shrink = 0.5;
    double sufficient_decrease = 1e-4;
    bool precondition = true;
    InitMode init = InitMode::Default;
    std::vector<double> initial_values;
    std::uint64_t seed = 1;
};

struct SolveReport {
    double energy = 0;
    std::size_t iters = 0;
    double grad_norm = 0;
    bool converged = false;
    std::vector<double> energy_trace; // energies of accepted iterates, nonincreasing
};

// Projected gradient descent with backtracking line search on the interior
// values, exterior frozen to the datum. The energy is strictly convex, so the
// minimizer is unique; non-convergence within max_iters returns the best
// iterate with converged=false.
std::pair<DiscreteFunction, SolveReport> minimize(const EnergyContext& ctx,
                                                  const DiscreteFunction& g,
                                                  const SolveOptions& opts = {});

// Direct dense solve of the linear stationarity system, valid only when
// p = q = 2.
DiscreteFunction solve_quadratic(const EnergyContext& ctx, const DiscreteFunction& g);

struct MaxPrincipleReport {
    bool min_ok = false;
    bool max_ok = false;
    double inf_datum = 0;
    double sup_datum = 0;
    double tol = 0;
};

// Interior values of a minimizer must stay between the exterior datum bounds
// up to 1e-6 * (1 + ||g||_inf).
MaxPrincipleReport maximum_principle_check(const DiscreteFunction& u,
                                           const DiscreteFunction& g);

} // namespace nldp
