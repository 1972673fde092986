#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nldp/core.hpp"
#include "nldp/grid.hpp"
#include "nldp/solver.hpp"

namespace nldp {

// Exterior datum: a named closed form sampled onto the grid. "beyond" is the
// constant value outside the truncation box.
struct DatumSpec {
    std::string kind = "constant"; // constant | cosine | tent | runge
    double value = 0;              // constant
    double offset = 0;             // cosine: offset + amplitude*cos(frequency*x + phase)
    double amplitude = 0;
    double frequency = 1;
    double phase = 0;
    double center = 0;     // tent / runge
    double half_width = 1; // tent: max(0, 1 - |x - center|/half_width)
    double scale = 1;      // runge: scale / (1 + (x - center)^2)
    double beyond = 0;
};

struct CoefficientSpec {
    std::string kind = "constant"; // constant | zero | cosine-product | distance-power
    double value = 0;              // constant
    double alpha = 1;              // distance-power
    double cap = 1;
};

struct KernelSpec {
    std::string kind = "model"; // model | perturbed
    double lambda = 1;          // perturbed: envelope constant, >= 1
};

struct OmegaConfig {
    std::string kind = "interval"; // interval (n=1) | box | disk (n=2)
    double lo = 0, hi = 0;         // interval
    std::array<double, 2> lo2{0, 0}, hi2{0, 0}; // box
    std::array<double, 2> center{0, 0};         // disk
    double radius = 0;
};

struct ProblemConfig {
    int n = 1;
    double box_radius = 0;
    double h = 0;
    OmegaConfig omega;
    double s = 0, t = 0, p = 0, q = 0;
    std::optional<double> p_star_override;
    std::optional<double> alpha; // smoothness order for the compatibility flag
    CoefficientSpec coefficient;
    KernelSpec kernel;
    DatumSpec datum;
};

// One verification step; which fields apply depends on the type.
struct CheckSpec {
    std::string type;
    Point x0{0, 0};
    double r = 0;            // ball radius
    double outer_radius = 0; // log checks, extrema-mean
    double level = 0;        // truncation level / base level / reference level
    std::string sign = "plus";
    double cutoff_half_width = 0;
    double lift = 0;     // log checks
    double cap_base = 0; // log-excess
    double sigma = 0.25; // oscillation
    std::size_t imax = 0;
    double weight = 0;          // support-mean
    std::string variant = "sp"; // sobolev-poincare
    double ceiling = 1.0;       // pass iff lhs <= ceiling * rhs
    double min_gamma = 0;       // oscillation pass bar
};

struct SweepConfig {
    std::string parameter; // q | alpha | h
    std::vector<double> values;
    bool solve = false;
    // optional oscillation fit on each solved row (active when r > 0)
    Point x0{0, 0};
    double r = 0;
    double sigma = 0.25;
    std::size_t jmax = 0;
};

struct ExperimentConfig {
    ProblemConfig problem;
    SolveOptions solver;
    std::vector<CheckSpec> checks;
    std::optional<SweepConfig> sweep;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
};

// Parse and validate a configuration. Unknown keys anywhere are rejected with
// ConfigError naming the key and the block it appeared in.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical serialization: fixed key order, decimal doubles with 17
// significant digits. parse_config_text(echo_config(c)) reproduces c.
std::string echo_config(const ExperimentConfig& cfg);

// Realize the validated specs into runtime objects.
ExponentConfig make_exponents(const ProblemConfig& pc);
Grid make_grid(const ProblemConfig& pc);
Coefficient make_coefficient(const CoefficientSpec& spec);
KernelPair make_kernels(const KernelSpec& spec, const ExponentConfig& cfg);
DiscreteFunction make_datum(const DatumSpec& spec, const Grid& g);

// The smoothness order used by assumption flags: the explicit problem value
// when present, else the coefficient's own modulus data.
std::optional<double> effective_alpha(const ExperimentConfig& cfg);

} // namespace nldp
