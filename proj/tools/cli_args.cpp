#include "cli_args.hpp"

#include <CLI11.hpp>

namespace casbo_cli {

const casbo_experiment_config& Arguments::config()
{
    raw.problem = problem.c_str();
    raw.out_dir = out_dir.c_str();
    if (mode == "casbo")
        raw.optimizer.mode = CASBO_MODE_CASBO;
    else if (mode == "es")
        raw.optimizer.mode = CASBO_MODE_ES;
    else
        raw.optimizer.mode = CASBO_MODE_BDTG;
    return raw;
}

ParseResult parse_cli(const std::vector<std::string>& argv)
{
    ParseResult result;
    Arguments& a = result.args;
    casbo_experiment_config_default(&a.raw);
    casbo_optimizer_config& opt = a.raw.optimizer;
    bool plot = false;

    CLI::App app{"Multi-seed benchmark runner for covariance-adaptive sequential black-box optimization",
                 "casbo-bench"};
    app.add_option("--problem", a.problem, "Problem name")
        ->required()
        ->check(CLI::IsMember({"rastrigin10", "l1ellipsoid", "levy", "toy-diffusion"}));
    app.add_option("--K", a.raw.K, "Number of sequential steps")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--d", a.raw.d, "Dimension of each step")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--mode", a.mode, "Optimizer")
        ->check(CLI::IsMember({"bdtg", "casbo", "es"}))
        ->capture_default_str();
    app.add_option("--alpha", opt.alpha, "Step size (bdtg) / base alpha (casbo)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--beta", opt.beta, "Base beta (casbo) / step size (es)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--nu", opt.nu, "Feasibility floor nu (casbo)")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--sigma", opt.sigma, "Sampling std (es)")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--N", opt.N, "Batch size")->check(CLI::Range(2, 1 << 24))->capture_default_str();
    app.add_option("--T", opt.T, "Iterations")->check(CLI::NonNegativeNumber)->capture_default_str();
    app.add_option("--runs", a.raw.runs, "Independent runs")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--seed", a.raw.seed, "Base seed; run r uses seed + r")->capture_default_str();
    app.add_option("--jobs", a.raw.jobs, "Parallel runs (0: hardware threads)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app.add_option("--out", a.out_dir, "Output directory")->required();
    app.add_option("--checkpoint-every", a.raw.checkpoint_every, "Write chain snapshots every C iterations (0: off)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app.add_flag("--plot", plot, "Write plot.svg");

    try {
        // CLI11 wants argv order reversed when given a vector.
        std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        result.message = app.help();
        result.exit_code = kExitOk;
        return result;
    } catch (const CLI::ParseError& e) {
        result.message = std::string(e.what()) + "\nRun with --help for usage.";
        result.exit_code = kExitUsage;
        return result;
    }

    a.raw.plot = plot ? 1 : 0;
    result.proceed = true;
    return result;
}

ParseResult parse_cli(int argc, const char* const* argv)
{
    return parse_cli(std::vector<std::string>(argv, argv + argc));
}

}  // namespace casbo_cli
