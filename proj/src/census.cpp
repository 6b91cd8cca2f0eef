#include "monocensus/census.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace monocensus {

std::string_view to_string(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::LincolnPetersen: return "lincoln-petersen";
        case EstimatorKind::Chapman: return "chapman";
        case EstimatorKind::Schnabel: return "schnabel";
    }
    return "?";
}

std::optional<EstimatorKind> estimator_from_string(std::string_view s) {
    if (s == "lincoln-petersen" || s == "lp") return EstimatorKind::LincolnPetersen;
    if (s == "chapman") return EstimatorKind::Chapman;
    if (s == "schnabel") return EstimatorKind::Schnabel;
    return std::nullopt;
}

std::string_view to_string(StopDecision d) {
    switch (d) {
        case StopDecision::Continue: return "Continue";
        case StopDecision::RunTraceTest: return "RunTraceTest";
        case StopDecision::Abort: return "Abort";
    }
    return "?";
}

bool Estimate::covers(double value) const {
    return (!ci_low || *ci_low <= value) && (!ci_high || value <= *ci_high);
}

namespace {

// (S+1)(E+1) #(S\E) #(E\S) / ((m+1)^2 (m+2)), shared by both single-loop estimators.
double single_loop_variance(const LoopRecord& r) {
    const double s = r.n_start;
    const double e = r.n_end;
    const double m = r.n_overlap;
    return (s + 1.0) * (e + 1.0) * (s - m) * (e - m) / ((m + 1.0) * (m + 1.0) * (m + 2.0));
}

void symmetric_interval(Estimate& est) {
    const double half = kZ95 * std::sqrt(*est.variance);
    est.ci_low = *est.beta - half;
    est.ci_high = *est.beta + half;
}

}  // namespace

Estimate lincoln_petersen(const LoopRecord& rec) {
    Estimate est;
    est.kind = EstimatorKind::LincolnPetersen;
    est.loops_used = {rec.loop_index};
    if (rec.n_overlap == 0) return est;  // beta Undefined, CI Unbounded
    est.variance = single_loop_variance(rec);
    est.beta = static_cast<double>(rec.n_start) * rec.n_end / rec.n_overlap;
    symmetric_interval(est);
    return est;
}

Estimate chapman(const LoopRecord& rec) {
    Estimate est;
    est.kind = EstimatorKind::Chapman;
    est.loops_used = {rec.loop_index};
    est.beta = (rec.n_start + 1.0) * (rec.n_end + 1.0) / (rec.n_overlap + 1.0) - 1.0;
    est.variance = single_loop_variance(rec);
    symmetric_interval(est);
    return est;
}

Estimate schnabel(std::span<const LoopRecord> recs, int window) {
    if (recs.empty()) throw std::invalid_argument("schnabel needs at least one loop record");
    if (window < 1) throw std::invalid_argument("schnabel window must be at least 1");
    const std::size_t used = std::min<std::size_t>(static_cast<std::size_t>(window), recs.size());
    auto tail = recs.subspan(recs.size() - used);

    Estimate est;
    est.kind = EstimatorKind::Schnabel;
    double products = 0.0;
    double overlaps = 0.0;
    for (const auto& r : tail) {
        products += static_cast<double>(r.n_start) * r.n_end;
        overlaps += r.n_overlap;
        est.loops_used.push_back(r.loop_index);
    }
    if (overlaps == 0.0) return est;

    est.beta = products / overlaps;
    est.variance = overlaps / (products * products);
    const double inv = overlaps / products;
    const double half = kZ95 * std::sqrt(*est.variance);
    est.ci_low = 1.0 / (inv + half);
    // The inverted interval has no upper end once 1/beta - z*sd reaches zero.
    if (inv - half > 0.0) est.ci_high = 1.0 / (inv - half);
    return est;
}

Estimate estimate(EstimatorKind kind, std::span<const LoopRecord> recs, int window) {
    if (recs.empty()) throw std::invalid_argument("estimate needs at least one loop record");
    switch (kind) {
        case EstimatorKind::LincolnPetersen: return lincoln_petersen(recs.back());
        case EstimatorKind::Chapman: return chapman(recs.back());
        case EstimatorKind::Schnabel: return schnabel(recs, window);
    }
    throw std::invalid_argument("unknown estimator");
}

StopDecision stopping_decision(std::span<const LoopRecord> recs, const StopConfig& cfg) {
    if (cfg.consecutive_no_new < 1 || cfg.max_loops < 1) throw std::invalid_argument("stop config must be positive");
    const auto k = static_cast<std::size_t>(cfg.consecutive_no_new);
    if (recs.size() >= k) {
        bool quiet = true;
        bool clean = false;
        for (const auto& r : recs.subspan(recs.size() - k)) {
            quiet = quiet && r.n_new == 0;
            clean = clean || r.n_failures == 0;
        }
        if (quiet && clean) return StopDecision::RunTraceTest;
    }
    if (recs.size() >= static_cast<std::size_t>(cfg.max_loops)) return StopDecision::Abort;
    return StopDecision::Continue;
}

}  // namespace monocensus
