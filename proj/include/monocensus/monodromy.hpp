#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "monocensus/loop_record.hpp"
#include "monocensus/polysys.hpp"
#include "monocensus/rng.hpp"
#include "monocensus/tracker.hpp"

namespace monocensus {

/// Closed triangle base -> q1 -> q2 -> base in parameter space.
struct Loop {
    PointVec base;
    std::array<SegmentPath, 3> segments;
    std::uint64_t rng_label = 0;

    bool is_closed() const;
};

/// Triangle through the given vertices with the given per-segment gammas
/// (straight edges by default).
Loop make_triangle(const PointVec& base, const PointVec& q1, const PointVec& q2,
                   const std::array<std::pair<Complex, Complex>, 3>& gammas = {{{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}}});

/// Vertices q_i = base + z_i * scale * (1 + |base|) with z_i standard complex
/// Gaussian vectors; each edge gets an independent unit-modulus gamma pair.
Loop random_loop(const PointVec& base, Rng& rng, double scale = 1.0);

class ResidualError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InsertResult {
    int id;
    bool is_new;
};

/// Deduplicated solutions of F(x; base) = 0 with stable IDs (0, 1, 2, ...).
/// Entries are only ever appended.
class SolutionRegistry {
public:
    explicit SolutionRegistry(PointVec base, double dedup_tol = 1e-6, double residual_tol = 1e-10);

    const PointVec& base() const { return base_; }
    double dedup_tol() const { return dedup_tol_; }
    double residual_tol() const { return residual_tol_; }
    int size() const { return static_cast<int>(entries_.size()); }
    bool empty() const { return entries_.empty(); }
    const std::vector<PointVec>& entries() const { return entries_; }
    const PointVec& at(int id) const { return entries_.at(static_cast<std::size_t>(id)); }

    /// ID of the nearest entry if it lies within dedup_tol * (1 + |x|).
    std::optional<int> find(const PointVec& x) const;

    /// Returns the matching ID, or appends x under a fresh ID. Throws
    /// ResidualError if |F(x; base)| is not below residual_tol.
    InsertResult insert(const ParameterizedSystem& sys, const PointVec& x);

private:
    PointVec base_;
    double dedup_tol_;
    double residual_tol_;
    std::vector<PointVec> entries_;
};

struct MonodromyOptions {
    TrackOptions track;
    double refine_tol = 1e-10;
    int refine_iters = 20;
    unsigned threads = 1;  // 0: all hardware threads
};

/// Tracks every registry entry around the loop, then merges the endpoints
/// into the registry in start order.
LoopRecord run_loop(const ParameterizedSystem& sys, SolutionRegistry& registry, const Loop& loop,
                    const MonodromyOptions& opts = {}, int loop_index = 0);

// ---------------------------------------------------------------------------
// Seeding

class SeedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Seed {
    PointVec x;
    PointVec p;
};

struct UserSupplied {
    PointVec x;
    PointVec p;
    double accept_tol = 1e-6;  // residual allowed before refinement
};

/// Picks x (random unless given) and solves the affine-linear equations
/// F(x; p) = 0 for p, adding a random kernel component so p is generic.
struct FabricateLinearInParams {
    std::uint64_t rng_seed = 0;
    std::optional<PointVec> x;
};

using SeedStrategy = std::variant<UserSupplied, FabricateLinearInParams>;

/// Throws SeedError when fabrication is impossible or the pair fails the
/// residual check. The returned pair satisfies |F(x; p)| < 1e-12.
Seed seed_solution(const ParameterizedSystem& sys, const SeedStrategy& strategy);

}  // namespace monocensus
