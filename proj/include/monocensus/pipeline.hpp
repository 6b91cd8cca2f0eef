#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "monocensus/census.hpp"
#include "monocensus/monodromy.hpp"
#include "monocensus/tracetest.hpp"

namespace monocensus {

struct EstimateConfig {
    StopConfig stop{3, 200};
    int window = 3;
    double scale = 1.0;
    std::uint64_t rng_seed = 1;
    double dedup_tol = 1e-6;
    MonodromyOptions monodromy;
    double tau = 1.0;
    double trace_tol = 1e-8;
    int witness_loop_budget = 200;
    int witness_no_new = 20;  // quiet loops that end the witness search
};

/// One report row: the loop's counts and all three estimates after it.
struct LoopRow {
    LoopRecord record;
    Estimate lincoln_petersen;
    Estimate chapman;
    Estimate schnabel;
};

struct TraceOutcome {
    SlicedSystem slice;
    WitnessExtension extension;
    TraceCertificate certificate;
};

struct EstimateOutcome {
    SolutionRegistry registry;
    std::vector<LoopRow> rows;
    StopDecision stop = StopDecision::Continue;
    std::optional<TraceOutcome> trace;
    std::optional<std::string> trace_error;
};

/// Loops from the seed until the stopping policy fires, then runs the trace
/// test when the policy asks for it. `on_loop` sees each row as it is made.
EstimateOutcome run_estimation(const ParameterizedSystem& sys, const Seed& seed, const EstimateConfig& cfg,
                               const std::function<void(const LoopRow&, const SolutionRegistry&)>& on_loop = {});

/// Builds a random slice at the registry base, extends the witness and
/// returns the certificate. Throws TraceError on failure.
TraceOutcome run_trace_test(const ParameterizedSystem& sys, const SolutionRegistry& registry, Rng rng, double tau,
                            double trace_tol, const TraceOptions& opts);

}  // namespace monocensus
