#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "optimizer.hpp"

namespace casbo::bench {

struct ExperimentConfig {
    std::string problem = "l1ellipsoid";
    int K = 10;
    int d = 100;
    RunConfig run;
    int runs = 5;
    std::uint64_t seed = 0;
    int jobs = 0;  // 0: one per hardware thread
    std::string out_dir;
    int checkpoint_every = 0;
    bool plot = false;

    void validate() const;
    // Flag-per-line echo of the effective configuration.
    std::string to_flags() const;
};

struct SummaryRow {
    int iter = 0;
    double mean_cum_obj_mean = 0.0;
    double mean_cum_obj_std = 0.0;
    double best_sampled_mean = 0.0;
    double best_sampled_std = 0.0;
};

using Summary = std::vector<SummaryRow>;

struct ExperimentResult {
    std::vector<RunTrace> traces;
    Summary summary;
};

inline constexpr const char* kTraceHeader =
    "iter,mean_cum_obj,best_sampled_cum_obj,min_eig_sigma,max_eig_sigma,queries,wallclock_ms";
inline constexpr const char* kSummaryHeader =
    "iter,mean_cum_obj_mean,mean_cum_obj_std,best_sampled_cum_obj_mean,best_sampled_cum_obj_std";

void write_trace_csv(std::ostream& os, const RunTrace& trace);
RunTrace read_trace_csv(std::istream& is);

/// Per-iteration mean and population standard deviation across runs.
Summary summarize(const std::vector<RunTrace>& traces);
void write_summary_csv(std::ostream& os, const Summary& summary);

/// SVG convergence plot: mean polyline with a +-1 std band. The y axis is
/// log-scaled when every band value is positive.
std::string render_plot_svg(const Summary& summary);
void emit_plot(const Summary& summary, const std::string& path);

// Runs config.runs independent optimizations with seeds seed + r, in parallel
// up to config.jobs, and writes run_<r>.csv, summary.csv, config.txt and the
// optional plot.svg / chain_<r>_<t>.txt files into out_dir.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace casbo::bench
