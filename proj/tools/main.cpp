#include <cstdint>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "nldp/cli.hpp"
#include "nldp/parallel.hpp"

namespace {

struct CommonFlags {
    std::string config;
    std::string out;
    unsigned threads = 0;
    std::uint64_t seed = 0;
    CLI::Option* out_opt = nullptr;
    CLI::Option* seed_opt = nullptr;

    std::optional<std::string> out_override() const {
        return out_opt->count() ? std::optional<std::string>(out) : std::nullopt;
    }
    std::optional<std::uint64_t> seed_override() const {
        return seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt;
    }
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "configuration file")->required();
    f.out_opt = cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--threads", f.threads, "worker threads, 0 = hardware");
    f.seed_opt = cmd->add_option("--seed", f.seed, "replaces the configured seed");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonlocal double phase energies: solve, verify, sweep"};
    app.require_subcommand(1);

    CommonFlags solve_f, verify_f, sweep_f;
    std::string solution_path;

    auto* solve = app.add_subcommand("solve", "minimize the energy for a datum");
    add_common(solve, solve_f);

    auto* verify = app.add_subcommand("verify", "run estimate checks on a solution");
    add_common(verify, verify_f);
    verify->add_option("solution", solution_path, "solution csv")->required();

    auto* sweep = app.add_subcommand("sweep", "scan a parameter range");
    add_common(sweep, sweep_f);

    double y0 = 0.5, b1 = 1, b2 = 2, beta = 1;
    std::size_t imax = 40;
    auto* demo = app.add_subcommand("iterate-demo",
                                    "print the geometric-convergence recursion");
    demo->add_option("--y0", y0, "starting value");
    demo->add_option("--b1", b1, "level constant");
    demo->add_option("--b2", b2, "growth base");
    demo->add_option("--beta", beta, "superlinear exponent");
    demo->add_option("--imax", imax, "iterations");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // help exits clean, every parse error is 1
    }

    if (solve->parsed()) {
        nldp::set_thread_count(solve_f.threads);
        return nldp::cmd_solve(solve_f.config, solve_f.out_override(),
                               solve_f.seed_override());
    }
    if (verify->parsed()) {
        nldp::set_thread_count(verify_f.threads);
        return nldp::cmd_verify(verify_f.config, solution_path, verify_f.out_override(),
                                verify_f.seed_override());
    }
    if (sweep->parsed()) {
        nldp::set_thread_count(sweep_f.threads);
        return nldp::cmd_sweep(sweep_f.config, sweep_f.out_override(),
                               sweep_f.seed_override());
    }
    return nldp::cmd_iterate_demo(y0, b1, b2, beta, imax);
}
