#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "monocensus/census.hpp"
#include "monocensus/loop_record.hpp"

namespace monocensus {

/// Closed population of `population` individuals with IDs 0..population-1.
/// Each simulated loop applies a uniformly random permutation to the known
/// individuals and loses each image independently with `failure_rate`.
struct SimConfig {
    int population = 1442;
    int n_loops = 20;
    double failure_rate = 0.0;
    std::uint64_t seed = 1;
    int initial_known = 1;

    void validate() const;
};

/// Records for one simulated run; start/end IDs are population IDs.
std::vector<LoopRecord> simulate_process(const SimConfig& cfg);

struct CoverageRow {
    int loop_index = 0;
    /// Fraction of counted trials whose CI contains the population; trials
    /// count when the estimate is defined and the known set was still
    /// incomplete at the start of the loop. Empty when fewer than
    /// `min_counted` trials qualify.
    std::optional<double> coverage;
    int counted = 0;
    /// Median of |beta - B| / B over trials with a defined estimate.
    std::optional<double> median_rel_error;
    double frac_known = 0.0;          // median known fraction after the loop
    double mean_overlap_frac = 0.0;   // mean of n_overlap / n_start
};

struct CoverageReport {
    SimConfig config;
    EstimatorKind estimator = EstimatorKind::Chapman;
    int window = 3;
    int n_trials = 0;
    int min_counted = 0;
    std::vector<CoverageRow> rows;
};

/// Runs n_trials independent simulations (trial i uses substream i of
/// cfg.seed). Throws std::invalid_argument if n_trials < 100.
CoverageReport coverage_experiment(const SimConfig& cfg, int n_trials, EstimatorKind estimator, int window,
                                   unsigned threads = 1);

/// CSV with header loop_index,coverage,median_rel_error,frac_known; missing
/// values are written as NA.
void write_coverage_csv(std::ostream& os, const CoverageReport& report);

}  // namespace monocensus
