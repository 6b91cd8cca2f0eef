#pragma once

#include <vector>

namespace monocensus {

/// Capture bookkeeping for one monodromy loop.
///
/// start_ids holds every start point attempted (S). end_ids holds the registry
/// ID reached by each successful path, in start order; two paths merging onto
/// one ID appear twice, so n_end == end_ids.size() even then.
struct LoopRecord {
    int loop_index = 0;
    std::vector<int> start_ids;
    std::vector<int> end_ids;
    int n_start = 0;
    int n_end = 0;
    int n_overlap = 0;
    int n_failures = 0;
    int n_new = 0;
    int n_collisions = 0;
    int known_after = 0;  // registry size once the loop's endpoints are merged

    /// Record holding counts only, for estimator arithmetic.
    static LoopRecord from_counts(int n_start, int n_end, int n_overlap, int loop_index = 0) {
        LoopRecord r;
        r.loop_index = loop_index;
        r.n_start = n_start;
        r.n_end = n_end;
        r.n_overlap = n_overlap;
        r.n_failures = n_start - n_end;
        r.n_new = n_end - n_overlap;
        return r;
    }
};

}  // namespace monocensus
