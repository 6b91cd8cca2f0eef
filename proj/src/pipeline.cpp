#include "monocensus/pipeline.hpp"

namespace monocensus {

namespace {

// Substream labels of the run's root generator.
constexpr std::uint64_t kLoopStream = 1;
constexpr std::uint64_t kTraceStream = 2;

}  // namespace

TraceOutcome run_trace_test(const ParameterizedSystem& sys, const SolutionRegistry& registry, Rng rng, double tau,
                            double trace_tol, const TraceOptions& opts) {
    Rng slice_rng = rng.substream(0);
    Rng witness_rng = rng.substream(1);
    Rng verdict_rng = rng.substream(2);
    SlicedSystem slice = build_slice(sys, registry.base(), slice_rng);
    WitnessExtension ext = extend_witness(slice, registry, tau, witness_rng, opts);
    TraceCertificate cert = trace_verdict(ext.slice, ext.witness, trace_tol, verdict_rng, opts);
    return TraceOutcome{ext.slice, std::move(ext), std::move(cert)};
}

EstimateOutcome run_estimation(const ParameterizedSystem& sys, const Seed& seed, const EstimateConfig& cfg,
                               const std::function<void(const LoopRow&, const SolutionRegistry&)>& on_loop) {
    EstimateOutcome out{SolutionRegistry(seed.p, cfg.dedup_tol), {}, StopDecision::Continue, std::nullopt, std::nullopt};
    out.registry.insert(sys, seed.x);

    const Rng root(cfg.rng_seed);
    const Rng loops = root.substream(kLoopStream);
    std::vector<LoopRecord> records;
    while (true) {
        const int k = static_cast<int>(records.size()) + 1;
        Rng loop_rng = loops.substream(static_cast<std::uint64_t>(k));
        Loop loop = random_loop(out.registry.base(), loop_rng, cfg.scale);
        records.push_back(run_loop(sys, out.registry, loop, cfg.monodromy, k));

        LoopRow row{records.back(), lincoln_petersen(records.back()), chapman(records.back()),
                    schnabel(records, cfg.window)};
        out.rows.push_back(row);
        if (on_loop) on_loop(out.rows.back(), out.registry);

        out.stop = stopping_decision(records, cfg.stop);
        if (out.stop != StopDecision::Continue) break;
    }

    if (out.stop == StopDecision::RunTraceTest) {
        TraceOptions opts;
        opts.monodromy = cfg.monodromy;
        opts.stop = StopConfig{cfg.witness_no_new, cfg.witness_loop_budget};
        opts.loop_scale = cfg.scale;
        opts.dedup_tol = cfg.dedup_tol;
        try {
            out.trace = run_trace_test(sys, out.registry, root.substream(kTraceStream), cfg.tau, cfg.trace_tol, opts);
        } catch (const TraceError& e) {
            out.trace_error = e.what();
        }
    }
    return out;
}

}  // namespace monocensus
