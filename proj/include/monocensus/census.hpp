#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "monocensus/loop_record.hpp"

namespace monocensus {

enum class EstimatorKind { LincolnPetersen, Chapman, Schnabel };

std::string_view to_string(EstimatorKind k);
std::optional<EstimatorKind> estimator_from_string(std::string_view s);

/// Population estimate. An empty beta or variance means Undefined; an empty
/// CI bound means Unbounded on that side. For Schnabel, `variance` is the
/// variance of 1/beta.
struct Estimate {
    EstimatorKind kind = EstimatorKind::LincolnPetersen;
    std::optional<double> beta;
    std::optional<double> variance;
    std::optional<double> ci_low;
    std::optional<double> ci_high;
    std::vector<int> loops_used;

    /// True if value lies in [ci_low, ci_high], treating missing bounds as infinite.
    bool covers(double value) const;
};

/// z quantile of the two-sided 95% interval.
inline constexpr double kZ95 = 1.96;

Estimate lincoln_petersen(const LoopRecord& rec);
Estimate chapman(const LoopRecord& rec);
/// Pools the last min(window, recs.size()) records. Throws std::invalid_argument
/// on an empty list or window < 1.
Estimate schnabel(std::span<const LoopRecord> recs, int window);

/// Dispatches on kind; single-loop estimators use the last record.
Estimate estimate(EstimatorKind kind, std::span<const LoopRecord> recs, int window);

struct StopConfig {
    int consecutive_no_new = 3;
    int max_loops = 200;
};

enum class StopDecision { Continue, RunTraceTest, Abort };

std::string_view to_string(StopDecision d);

StopDecision stopping_decision(std::span<const LoopRecord> recs, const StopConfig& cfg);

}  // namespace monocensus
