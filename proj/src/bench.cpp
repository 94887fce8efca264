#include "bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "error.hpp"

namespace casbo::bench {

namespace fs = std::filesystem;

namespace {

std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    return out;
}

}  // namespace

void ExperimentConfig::validate() const
{
    if (runs < 1)
        fail(ErrorCode::Config, "runs must be >= 1");
    if (jobs < 0)
        fail(ErrorCode::Config, "jobs must be >= 0");
    if (checkpoint_every < 0)
        fail(ErrorCode::Config, "checkpoint interval must be >= 0");
    if (out_dir.empty())
        fail(ErrorCode::Config, "output directory is required");
    if (K < 1 || d < 1)
        fail(ErrorCode::Config, "K and d must be >= 1");
    const auto& names = problem_names();
    if (std::find(names.begin(), names.end(), problem) == names.end())
        fail(ErrorCode::Config, "unknown problem '" + problem + "'");
    run.validate();
}

std::string ExperimentConfig::to_flags() const
{
    std::ostringstream os;
    os << "--problem " << problem << '\n'
       << "--K " << K << '\n'
       << "--d " << d << '\n'
       << "--mode " << to_string(run.mode) << '\n'
       << "--alpha " << fmt_double(run.alpha) << '\n'
       << "--beta " << fmt_double(run.beta) << '\n'
       << "--nu " << fmt_double(run.nu) << '\n'
       << "--sigma " << fmt_double(run.sigma) << '\n'
       << "--N " << run.N << '\n'
       << "--T " << run.T << '\n'
       << "--runs " << runs << '\n'
       << "--seed " << seed << '\n'
       << "--jobs " << jobs << '\n'
       << "--out " << out_dir << '\n'
       << "--checkpoint-every " << checkpoint_every << '\n';
    if (plot)
        os << "--plot\n";
    os << "# tau " << fmt_double(run.effective_tau()) << '\n';
    return os.str();
}

void write_trace_csv(std::ostream& os, const RunTrace& trace)
{
    os << kTraceHeader << '\n';
    for (const TraceRecord& r : trace) {
        os << r.iter << ',' << fmt_double(r.mean_cum_obj) << ',' << fmt_double(r.best_sampled_cum_obj) << ','
           << fmt_double(r.min_eig_sigma) << ',' << fmt_double(r.max_eig_sigma) << ',' << r.queries << ','
           << fmt_double(r.wallclock_ms) << '\n';
    }
}

RunTrace read_trace_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != kTraceHeader)
        fail(ErrorCode::InvalidInput, "trace CSV: unexpected header");
    RunTrace trace;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        if (cells.size() != 7)
            fail(ErrorCode::InvalidInput, "trace CSV: expected 7 columns in '" + line + "'");
        TraceRecord r;
        try {
            r.iter = std::stoi(cells[0]);
            r.mean_cum_obj = std::stod(cells[1]);
            r.best_sampled_cum_obj = std::stod(cells[2]);
            r.min_eig_sigma = std::stod(cells[3]);
            r.max_eig_sigma = std::stod(cells[4]);
            r.queries = std::stoull(cells[5]);
            r.wallclock_ms = std::stod(cells[6]);
        } catch (const std::exception&) {
            fail(ErrorCode::InvalidInput, "trace CSV: unparsable row '" + line + "'");
        }
        trace.push_back(std::move(r));
    }
    return trace;
}

Summary summarize(const std::vector<RunTrace>& traces)
{
    require(!traces.empty(), "summary needs at least one trace");
    const std::size_t rows = traces.front().size();
    for (const RunTrace& t : traces)
        require(t.size() == rows, "traces differ in length");

    const double n = static_cast<double>(traces.size());
    auto mean_std = [&](std::size_t i, auto field) {
        double sum = 0.0;
        for (const RunTrace& t : traces)
            sum += field(t[i]);
        const double mean = sum / n;
        double sq = 0.0;
        for (const RunTrace& t : traces) {
            const double dv = field(t[i]) - mean;
            sq += dv * dv;
        }
        return std::pair{mean, std::sqrt(sq / n)};
    };

    Summary out(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        out[i].iter = traces.front()[i].iter;
        std::tie(out[i].mean_cum_obj_mean, out[i].mean_cum_obj_std) =
            mean_std(i, [](const TraceRecord& r) { return r.mean_cum_obj; });
        std::tie(out[i].best_sampled_mean, out[i].best_sampled_std) =
            mean_std(i, [](const TraceRecord& r) { return r.best_sampled_cum_obj; });
    }
    return out;
}

void write_summary_csv(std::ostream& os, const Summary& summary)
{
    os << kSummaryHeader << '\n';
    for (const SummaryRow& r : summary) {
        os << r.iter << ',' << fmt_double(r.mean_cum_obj_mean) << ',' << fmt_double(r.mean_cum_obj_std) << ','
           << fmt_double(r.best_sampled_mean) << ',' << fmt_double(r.best_sampled_std) << '\n';
    }
}

std::string render_plot_svg(const Summary& summary)
{
    require(!summary.empty(), "cannot plot an empty summary");

    constexpr double width = 640.0, height = 400.0;
    constexpr double left = 80.0, right = 20.0, top = 20.0, bottom = 60.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    bool log_y = true;
    for (const SummaryRow& r : summary)
        log_y = log_y && r.mean_cum_obj_mean > 0.0 && r.mean_cum_obj_mean - r.mean_cum_obj_std > 0.0;
    auto ty = [log_y](double v) { return log_y ? std::log10(v) : v; };

    double y_lo = std::numeric_limits<double>::infinity();
    double y_hi = -y_lo;
    for (const SummaryRow& r : summary) {
        y_lo = std::min(y_lo, ty(r.mean_cum_obj_mean - r.mean_cum_obj_std));
        y_hi = std::max(y_hi, ty(r.mean_cum_obj_mean + r.mean_cum_obj_std));
    }
    if (!(y_hi > y_lo)) {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    const double x_lo = summary.front().iter;
    const double x_hi = summary.back().iter;

    auto px = [&](double iter) {
        return x_hi > x_lo ? left + (iter - x_lo) / (x_hi - x_lo) * plot_w : left + 0.5 * plot_w;
    };
    auto py = [&](double v) { return top + (y_hi - ty(v)) / (y_hi - y_lo) * plot_h; };

    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(3);
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
       << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

    os << "<polygon class=\"band\" fill=\"#1f77b4\" fill-opacity=\"0.25\" stroke=\"none\" points=\"";
    for (const SummaryRow& r : summary)
        os << px(r.iter) << ',' << py(r.mean_cum_obj_mean + r.mean_cum_obj_std) << ' ';
    for (auto it = summary.rbegin(); it != summary.rend(); ++it)
        os << px(it->iter) << ',' << py(it->mean_cum_obj_mean - it->mean_cum_obj_std) << ' ';
    os << "\"/>\n";

    os << "<polyline class=\"mean\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < summary.size(); ++i)
        os << (i ? " " : "") << px(summary[i].iter) << ',' << py(summary[i].mean_cum_obj_mean);
    os << "\"/>\n";

    os << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
       << top + plot_h << "\" stroke=\"black\"/>\n"
       << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
       << "\" stroke=\"black\"/>\n";

    auto label = [log_y](double v) { return fmt_double(log_y ? std::pow(10.0, v) : v).substr(0, 10); };
    os << "<text x=\"" << left - 5 << "\" y=\"" << top + 10 << "\" font-size=\"10\" text-anchor=\"end\">"
       << label(y_hi) << "</text>\n"
       << "<text x=\"" << left - 5 << "\" y=\"" << top + plot_h << "\" font-size=\"10\" text-anchor=\"end\">"
       << label(y_lo) << "</text>\n"
       << "<text x=\"" << left << "\" y=\"" << top + plot_h + 15 << "\" font-size=\"10\">" << x_lo << "</text>\n"
       << "<text x=\"" << left + plot_w << "\" y=\"" << top + plot_h + 15
       << "\" font-size=\"10\" text-anchor=\"end\">" << x_hi << "</text>\n";
    os << "<text x=\"" << left + 0.5 * plot_w << "\" y=\"" << height - 15
       << "\" font-size=\"13\" text-anchor=\"middle\">optimization step</text>\n"
       << "<text x=\"20\" y=\"" << top + 0.5 * plot_h << "\" font-size=\"13\" text-anchor=\"middle\" "
       << "transform=\"rotate(-90 20 " << top + 0.5 * plot_h << ")\">cumulative objective"
       << (log_y ? " (log scale)" : "") << "</text>\n"
       << "</svg>\n";
    return os.str();
}

void emit_plot(const Summary& summary, const std::string& path)
{
    const std::string svg = render_plot_svg(summary);
    std::ofstream out = open_out(path);
    out << svg;
    if (!out)
        fail(ErrorCode::Io, "failed writing " + path);
}

ExperimentResult run_experiment(const ExperimentConfig& config)
{
    config.validate();

    const fs::path dir(config.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        fail(ErrorCode::Io, "cannot create output directory " + dir.string());
    {
        std::ofstream out = open_out(dir / "config.txt");
        out << config.to_flags();
        if (!out)
            fail(ErrorCode::Io, "failed writing config.txt");
    }

    ExperimentResult result;
    result.traces.resize(config.runs);

    const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const int jobs = std::clamp(config.jobs > 0 ? config.jobs : hw, 1, config.runs);

    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto worker = [&] {
        for (int r = next++; r < config.runs; r = next++) {
            try {
                const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(r);
                ProblemPtr problem = make_problem(config.problem, config.K, config.d, config.seed);
                CheckpointFn checkpoint = [&dir, r](int t, const PolicyChain& chain) {
                    save_snapshot((dir / ("chain_" + std::to_string(r) + "_" + std::to_string(t) + ".txt")).string(),
                                  chain);
                };
                RunTrace trace = run_optimizer(problem, config.run, seed, config.checkpoint_every, checkpoint);
                std::ofstream out = open_out(dir / ("run_" + std::to_string(r) + ".csv"));
                write_trace_csv(out, trace);
                if (!out)
                    fail(ErrorCode::Io, "failed writing run_" + std::to_string(r) + ".csv");
                result.traces[r] = std::move(trace);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error)
                    first_error = std::current_exception();
            }
        }
    };

    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(jobs);
        for (int i = 0; i < jobs; ++i)
            pool.emplace_back(worker);
    }
    if (first_error)
        std::rethrow_exception(first_error);

    result.summary = summarize(result.traces);
    {
        std::ofstream out = open_out(dir / "summary.csv");
        write_summary_csv(out, result.summary);
        if (!out)
            fail(ErrorCode::Io, "failed writing summary.csv");
    }
    if (config.plot)
        emit_plot(result.summary, (dir / "plot.svg").string());
    return result;
}

}  // namespace casbo::bench
