#pragma once

#include <cstddef>
#include <vector>

#include "nldp/core.hpp"
#include "nldp/grid.hpp"

namespace nldp {

// Bundles the grid, exponents, coefficient, and kernels, plus a precomputed
// pair table for the hot O(N^2) loops: for every unordered pair i<j,
//   ksp_w = K_sp(x_i,x_j) * h^{2n},   atq_w = a(x_i,x_j) * K_tq(x_i,x_j) * h^{2n},
// both zeroed when i and j are both exterior, so energy loops run over all
// pairs blindly. The table is skipped above the memory budget and everything
// falls back to direct evaluation.
struct EnergyContext {
    const Grid* grid = nullptr;
    ExponentConfig cfg;
    Coefficient coeff;
    KernelPair kernels;

    std::vector<double> ksp_w;
    std::vector<double> atq_w;

    bool has_cache() const { return !ksp_w.empty(); }
    std::size_t pair_index(std::size_t i, std::size_t j) const {
        const std::size_t N = grid->size();
        return i * (2 * N - i - 1) / 2 + (j - i - 1);
    }
    bool pair_active(std::size_t i, std::size_t j) const {
        return grid->interior[i] || grid->interior[j];
    }
    // masked products for i != j (any order)
    double ksp_weight(std::size_t i, std::size_t j) const;
    double atq_weight(std::size_t i, std::size_t j) const;
};

// Validates mutual consistency and the structural hypotheses on sampled node
// pairs (coefficient symmetry/bounds, kernel symmetry/ellipticity envelope),
// then builds the pair table.
EnergyContext make_context(const Grid& grid, const ExponentConfig& cfg,
                           const Coefficient& coeff, const KernelPair& kernels);

// |tau|^{ell-2} * tau, extended by 0 at tau = 0.
double signed_power(double tau, double ell);

// tau^p/|x-y|^{sp} + a(x,y) tau^q/|x-y|^{tq}
double h_density(const EnergyContext& ctx, const Point& x, const Point& y, double tau);
// same with exponents p-1, q-1
double h_deriv_density(const EnergyContext& ctx, const Point& x, const Point& y, double tau);

// Double sum over ordered pairs of S x S (diagonal excluded) of
// H(x,y,|v(x)-v(y)|) |x-y|^{-n} w. Zero iff v is constant on S.
double modular(const EnergyContext& ctx, const DiscreteFunction& v,
               const std::vector<std::size_t>& S);

// Discrete Gagliardo seminorm of order (m, ell) over S:
// (sum_{i != j} |v_i-v_j|^ell |x_i-x_j|^{-(n+m ell)} w)^{1/ell}
double seminorm(const EnergyContext& ctx, const DiscreteFunction& v,
                const std::vector<std::size_t>& S, double m, double ell);

// Sum over all node pairs with at least one endpoint in the domain of
// (1/p)|dv|^p K_sp + (1/q) a |dv|^q K_tq, times quadrature weights.
// Strictly convex in the interior values.
double energy(const EnergyContext& ctx, const DiscreteFunction& v);

struct TailReport {
    Point x0{0, 0};
    double r = 0;
    double p_part = 0;    // |v|^{p-1} against |x-x0|^{-(n+sp)}, closure included
    double q_part_sp = 0; // |v|^{q-1} against |x-x0|^{-(n+sp)}, closure included
    double q_part_tq = 0; // |v|^{q-1} against |x-x0|^{-(n+tq)}, closure included
    double closure = 0;   // total analytic beyond-box correction
};

// Far-field integrals of v over the complement of B_r(x0). Consumers attach
// their own coefficient weights to the parts.
TailReport tail(const EnergyContext& ctx, const DiscreteFunction& v, const Point& x0,
                double r);

// Discrete bilinear pairing of u against a test function phi vanishing outside
// the domain; the directional derivative of energy at u in direction phi.
double weak_residual(const EnergyContext& ctx, const DiscreteFunction& u,
                     const DiscreteFunction& phi);

// Full-length vector; entry i is the energy derivative in the nodal value u_i
// for interior i, and exactly 0 for exterior i.
std::vector<double> energy_gradient(const EnergyContext& ctx, const DiscreteFunction& u);

} // namespace nldp
