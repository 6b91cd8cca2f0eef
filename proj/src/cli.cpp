#include "monocensus/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "monocensus/numfmt.hpp"
#include "monocensus/pipeline.hpp"
#include "monocensus/popsim.hpp"
#include "monocensus/serialize.hpp"

namespace monocensus::cli {

namespace {

using nlohmann::json;

constexpr const char* kUndefined = "Undefined";
constexpr const char* kUnbounded = "Unbounded";

const std::vector<std::string> kColumns = {
    "loop_index",     "known_count",     "n_start",         "n_end",         "n_overlap",
    "n_new",          "n_failures",      "lp_beta",         "lp_ci_low",     "lp_ci_high",
    "chapman_beta",   "chapman_ci_low",  "chapman_ci_high", "schnabel_beta", "schnabel_ci_low",
    "schnabel_ci_high"};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes to path via a temporary so readers never see a half-written file.
void write_file(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << text;
    }
    std::filesystem::rename(tmp, path);
}

json estimate_fields(const Estimate& e) {
    auto num = [](const std::optional<double>& v, const char* missing) -> json {
        return v ? json(*v) : json(missing);
    };
    return {num(e.beta, kUndefined), num(e.ci_low, kUnbounded), num(e.ci_high, kUnbounded)};
}

json row_to_json(const LoopRow& row) {
    const LoopRecord& r = row.record;
    std::vector<json> values = {r.loop_index, r.known_after, r.n_start, r.n_end, r.n_overlap, r.n_new, r.n_failures};
    for (const Estimate* e : {&row.lincoln_petersen, &row.chapman, &row.schnabel})
        for (auto& v : estimate_fields(*e)) values.push_back(v);
    json obj = json::object();
    for (std::size_t i = 0; i < kColumns.size(); ++i) obj[kColumns[i]] = values[i];
    return obj;
}

std::string csv_cell(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    return format_double(v.get<double>());
}

/// Per-loop report written as the run progresses.
class ReportWriter {
public:
    ReportWriter(std::string path, bool as_json) : path_(std::move(path)), json_(as_json) {
        if (!json_) {
            csv_.open(path_, std::ios::binary | std::ios::trunc);
            if (!csv_) throw std::runtime_error("cannot write " + path_);
            for (std::size_t i = 0; i < kColumns.size(); ++i) csv_ << (i ? "," : "") << kColumns[i];
            csv_ << '\n' << std::flush;
        } else {
            flush_json(json(nullptr));
        }
    }

    void add(const LoopRow& row) {
        json obj = row_to_json(row);
        if (json_) {
            rows_.push_back(obj);
            flush_json(json(nullptr));
            return;
        }
        for (std::size_t i = 0; i < kColumns.size(); ++i) csv_ << (i ? "," : "") << csv_cell(obj[kColumns[i]]);
        csv_ << '\n' << std::flush;
    }

    void finish(const json& footer) {
        if (json_) {
            flush_json(footer);
            return;
        }
        for (auto it = footer.begin(); it != footer.end(); ++it)
            csv_ << "# " << it.key() << '=' << (it.value().is_string() ? it.value().get<std::string>() : it.value().dump())
                 << '\n';
        csv_.flush();
    }

private:
    void flush_json(const json& footer) {
        write_file(path_, json{{"columns", kColumns}, {"rows", rows_}, {"footer", footer}}.dump(2) + "\n");
    }

    std::string path_;
    bool json_;
    std::ofstream csv_;
    json rows_ = json::array();
};

struct Common {
    std::uint64_t rng_seed = 1;
    unsigned threads = 0;
    std::string out_prefix = "monocensus";
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--rng-seed", c.rng_seed, "Seed of the random generator")->capture_default_str();
    cmd->add_option("--threads", c.threads, "Worker threads (0: all available)")->capture_default_str();
    cmd->add_option("--out-prefix", c.out_prefix, "Prefix of the output files")->capture_default_str();
}

struct EstimateFlags {
    Common common;
    std::string system;
    std::string seed_solution;
    std::string seed_strategy;
    int max_loops = 200;
    int stop_after_no_new = 3;
    int window = 3;
    double scale = 1.0;
    double tau = 1.0;
    double trace_tol = 1e-8;
    int witness_loops = 200;
    int witness_no_new = 20;
    std::string format = "csv";
    bool record_runtime = false;
};

struct TraceFlags {
    Common common;
    std::string system;
    std::string registry;
    double tau = 1.0;
    double trace_tol = 1e-8;
    double scale = 1.0;
    int witness_loops = 200;
    int stop_after_no_new = 20;
};

struct SimulateFlags {
    Common common;
    int population = 1442;
    int trials = 1000;
    int loops = 20;
    std::string estimator = "chapman";
    int window = 3;
    double failure_rate = 0.0;
    int initial_known = 1;
    std::string out = "-";
};

std::optional<ParameterizedSystem> load_system(const std::string& path, std::ostream& err) {
    try {
        return parse_system(read_file(path));
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}: {}\n", path, e.what());
        return std::nullopt;
    }
}

json certificate_json(const TraceOutcome& t) { return certificate_to_json(t.slice, t.certificate, &t.extension); }

int cmd_estimate(const EstimateFlags& f, std::ostream& out, std::ostream& err) {
    const auto started = std::chrono::steady_clock::now();
    auto sys = load_system(f.system, err);
    if (!sys) return kExitParse;

    std::string strategy = f.seed_strategy;
    if (strategy.empty()) strategy = f.seed_solution.empty() ? "fabricate" : "user";
    Seed seed;
    try {
        if (strategy == "user") {
            if (f.seed_solution.empty()) throw SeedError("--seed-strategy user needs --seed-solution");
            seed = seed_solution(*sys, seed_from_json(read_file(f.seed_solution)));
        } else {
            seed = seed_solution(*sys, FabricateLinearInParams{f.common.rng_seed, std::nullopt});
        }
    } catch (const std::exception& e) {
        fmt::print(err, "error: seed: {}\n", e.what());
        return kExitSeed;
    }

    EstimateConfig cfg;
    cfg.stop = StopConfig{f.stop_after_no_new, f.max_loops};
    cfg.window = f.window;
    cfg.scale = f.scale;
    cfg.rng_seed = f.common.rng_seed;
    cfg.monodromy.threads = f.common.threads;
    cfg.tau = f.tau;
    cfg.trace_tol = f.trace_tol;
    cfg.witness_loop_budget = f.witness_loops;
    cfg.witness_no_new = f.witness_no_new;

    const bool as_json = f.format == "json";
    const std::string prefix = f.common.out_prefix;
    const std::string registry_path = prefix + ".registry.json";
    ReportWriter report(prefix + (as_json ? ".report.json" : ".report.csv"), as_json);

    EstimateOutcome result = run_estimation(*sys, seed, cfg, [&](const LoopRow& row, const SolutionRegistry& reg) {
        report.add(row);
        write_file(registry_path, registry_to_json(reg).dump(2) + "\n");
    });

    int code = kExitAbort;
    json footer = {{"stopping_reason", std::string(to_string(result.stop))}, {"registry_size", result.registry.size()}};
    if (result.trace) {
        const auto& cert = result.trace->certificate;
        footer["trace_verdict"] = std::string(to_string(cert.verdict));
        footer["trace_residual"] = cert.residual;
        footer["fiber_count"] = cert.fiber_count;
        footer["other_count"] = cert.other_count;
        write_file(prefix + ".certificate.json", certificate_json(*result.trace).dump(2) + "\n");
        code = cert.verdict == TraceVerdict::Complete ? kExitComplete : kExitIncomplete;
    } else if (result.trace_error) {
        footer["trace_verdict"] = "Error";
        footer["trace_error"] = *result.trace_error;
        code = kExitTraceFailure;
    } else {
        footer["trace_verdict"] = "NotRun";
    }
    const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (f.record_runtime) footer["runtime_s"] = runtime;
    report.finish(footer);

    fmt::print(out, "loops: {}\nsolutions: {}\nstop: {}\n", result.rows.size(), result.registry.size(),
               to_string(result.stop));
    if (result.trace)
        fmt::print(out, "trace: {} (residual {:.3e}, fiber {}, other {})\n",
                   to_string(result.trace->certificate.verdict), result.trace->certificate.residual,
                   result.trace->certificate.fiber_count, result.trace->certificate.other_count);
    if (result.trace_error) fmt::print(err, "error: trace test: {}\n", *result.trace_error);
    fmt::print(out, "runtime: {:.3f} s\n", runtime);
    return code;
}

int cmd_trace(const TraceFlags& f, std::ostream& out, std::ostream& err) {
    auto sys = load_system(f.system, err);
    if (!sys) return kExitParse;
    std::optional<SolutionRegistry> registry;
    try {
        registry = registry_from_json(*sys, read_file(f.registry));
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}: {}\n", f.registry, e.what());
        return kExitParse;
    }

    TraceOptions opts;
    opts.monodromy.threads = f.common.threads;
    opts.stop = StopConfig{f.stop_after_no_new, f.witness_loops};
    opts.loop_scale = f.scale;
    opts.dedup_tol = registry->dedup_tol();
    TraceOutcome t = run_trace_test(*sys, *registry, Rng(f.common.rng_seed), f.tau, f.trace_tol, opts);
    write_file(f.common.out_prefix + ".certificate.json", certificate_json(t).dump(2) + "\n");
    fmt::print(out, "trace: {} (residual {:.3e}, fiber {}, other {})\n", to_string(t.certificate.verdict),
               t.certificate.residual, t.certificate.fiber_count, t.certificate.other_count);
    return t.certificate.verdict == TraceVerdict::Complete ? kExitComplete : kExitIncomplete;
}

int cmd_simulate(const SimulateFlags& f, std::ostream& out, std::ostream& err) {
    auto kind = estimator_from_string(f.estimator);
    if (!kind) {
        fmt::print(err, "error: unknown estimator '{}'\n", f.estimator);
        return kExitUsage;
    }
    SimConfig cfg{f.population, f.loops, f.failure_rate, f.common.rng_seed, f.initial_known};
    CoverageReport report;
    try {
        report = coverage_experiment(cfg, f.trials, *kind, f.window, f.common.threads);
    } catch (const std::invalid_argument& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitUsage;
    }
    if (f.out == "-") {
        write_coverage_csv(out, report);
    } else {
        std::ostringstream csv;
        write_coverage_csv(csv, report);
        write_file(f.out, csv.str());
    }
    return kExitComplete;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Monodromy solution-count estimation with capture-recapture statistics and a trace test",
                 "monocensus"};
    app.require_subcommand(1);

    EstimateFlags est;
    auto* estimate = app.add_subcommand("estimate", "Run monodromy loops, estimate the root count, certify it");
    estimate->add_option("--system", est.system, "System JSON file")->required()->check(CLI::ExistingFile);
    estimate->add_option("--seed-solution", est.seed_solution, "JSON file with a start pair {x, p}")
        ->check(CLI::ExistingFile);
    estimate->add_option("--seed-strategy", est.seed_strategy, "user or fabricate")
        ->check(CLI::IsMember({"user", "fabricate"}));
    estimate->add_option("--max-loops", est.max_loops)->capture_default_str()->check(CLI::PositiveNumber);
    estimate->add_option("--stop-after-no-new", est.stop_after_no_new)->capture_default_str()->check(CLI::PositiveNumber);
    estimate->add_option("--window", est.window, "Schnabel rolling window")->capture_default_str()->check(CLI::PositiveNumber);
    estimate->add_option("--scale", est.scale, "Loop size relative to 1 + |p*|")->capture_default_str()->check(CLI::PositiveNumber);
    estimate->add_option("--tau", est.tau)->capture_default_str()->check(CLI::PositiveNumber);
    estimate->add_option("--trace-tol", est.trace_tol)->capture_default_str()->check(CLI::PositiveNumber);
    estimate->add_option("--witness-loops", est.witness_loops, "Loop budget for the trace witness")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    estimate->add_option("--witness-no-new", est.witness_no_new, "Quiet loops that end the witness search")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    estimate->add_option("--format", est.format)->capture_default_str()->check(CLI::IsMember({"csv", "json"}));
    estimate->add_flag("--record-runtime", est.record_runtime, "Write the runtime into the report footer");
    add_common(estimate, est.common);

    TraceFlags tr;
    auto* trace = app.add_subcommand("trace", "Certify a registry of solutions with the trace test");
    trace->add_option("--system", tr.system, "System JSON file")->required()->check(CLI::ExistingFile);
    trace->add_option("--registry", tr.registry, "Registry JSON file")->required()->check(CLI::ExistingFile);
    trace->add_option("--tau", tr.tau)->capture_default_str()->check(CLI::PositiveNumber);
    trace->add_option("--trace-tol", tr.trace_tol)->capture_default_str()->check(CLI::PositiveNumber);
    trace->add_option("--scale", tr.scale)->capture_default_str()->check(CLI::PositiveNumber);
    trace->add_option("--witness-loops", tr.witness_loops)->capture_default_str()->check(CLI::PositiveNumber);
    trace->add_option("--stop-after-no-new", tr.stop_after_no_new, "Quiet loops that end the witness search")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    add_common(trace, tr.common);

    SimulateFlags sim;
    auto* simulate = app.add_subcommand("simulate", "Coverage of the estimators on a simulated closed population");
    simulate->add_option("--population", sim.population)->capture_default_str()->check(CLI::PositiveNumber);
    simulate->add_option("--trials", sim.trials, "Number of trials (at least 100)")
        ->capture_default_str()
        ->check(CLI::Range(100, std::numeric_limits<int>::max()));
    simulate->add_option("--loops", sim.loops)->capture_default_str()->check(CLI::PositiveNumber);
    simulate->add_option("--estimator", sim.estimator)
        ->capture_default_str()
        ->check(CLI::IsMember({"lincoln-petersen", "lp", "chapman", "schnabel"}));
    simulate->add_option("--window", sim.window)->capture_default_str()->check(CLI::PositiveNumber);
    simulate->add_option("--failure-rate", sim.failure_rate)->capture_default_str()->check(CLI::Range(0.0, 0.999999));
    simulate->add_option("--initial-known", sim.initial_known)->capture_default_str()->check(CLI::PositiveNumber);
    simulate->add_option("--out", sim.out, "CSV output path, - for stdout")->capture_default_str();
    add_common(simulate, sim.common);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*estimate) return cmd_estimate(est, out, err);
        if (*trace) return cmd_trace(tr, out, err);
        return cmd_simulate(sim, out, err);
    } catch (const TraceError& e) {
        fmt::print(err, "error: trace test: {}\n", e.what());
        return kExitTraceFailure;
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitUsage;
    }
}

}  // namespace monocensus::cli
