#pragma once

#include <stdexcept>
#include <vector>

#include "monocensus/census.hpp"
#include "monocensus/monodromy.hpp"

namespace monocensus {

class TraceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// F restricted to the parameter line p(s) = p* + s v, cut by the moving
/// bilinear slice L_t(x, s) = lambda(x) s - t with lambda(x) = c . x + c0.
///
/// `combined` is the square system in the unknowns (x, s) with the single
/// parameter t; at t = 0 its solutions are the fiber {s = 0} together with
/// the lambda-branch {lambda(x) = 0}.
struct SlicedSystem {
    ParameterizedSystem system;
    PointVec p_star;
    PointVec direction;
    PointVec lambda_coeffs;
    Complex lambda_const;
    ParameterizedSystem combined;

    Complex lambda(const PointVec& x) const;
    /// Parameter point p* + s v for a sliced-space point (x, s).
    PointVec parameter_of(const PointVec& xs) const;
    /// (x, 0): a fiber point seen in the sliced space.
    PointVec lift(const PointVec& x) const;
};

SlicedSystem make_slice(const ParameterizedSystem& sys, const PointVec& p_star, const PointVec& direction,
                        const PointVec& lambda_coeffs, Complex lambda_const);

/// Random complex direction and affine form.
SlicedSystem build_slice(const ParameterizedSystem& sys, const PointVec& p_star, Rng& rng);

struct WitnessSet {
    Complex t_value;
    std::vector<PointVec> points;  // (x, s), length N + 1
};

struct TraceOptions {
    MonodromyOptions monodromy;
    StopConfig stop{20, 200};  // max_loops is the witness loop budget
    double loop_scale = 1.0;
    double loop_decades = 2.0;  // loop radii span this many powers of ten
    double dedup_tol = 1e-6;
    double lambda_min = 1e-8;
    int max_lambda_rerolls = 8;
};

struct WitnessExtension {
    SlicedSystem slice;  // differs from the input if lambda was re-drawn
    WitnessSet witness;
    int n_lifted = 0;
    int lambda_rerolls = 0;
    int loops_run = 0;
    /// Witness points whose continuation to t = 0 lands on a fiber point
    /// missing from the supplied registry; they are left out of the witness.
    int unregistered_fiber_points = 0;
    std::vector<LoopRecord> records;
};

/// Lifts the registry into the sliced space, carries it to t = tau, and runs
/// monodromy loops in t to collect the lambda-branch witness points.
/// Throws TraceError on an empty fiber or when a lift cannot be tracked.
WitnessExtension extend_witness(const SlicedSystem& ss, const SolutionRegistry& fiber, double tau, Rng& rng,
                                const TraceOptions& opts = {});

enum class TraceVerdict { Complete, Incomplete };

std::string_view to_string(TraceVerdict v);

struct TraceCertificate {
    double tau = 1.0;
    std::array<PointVec, 3> centroids;  // at t = -tau, 0, +tau
    std::vector<PointVec> points_at_zero;
    double residual = 0.0;
    double trace_tol = 1e-8;
    TraceVerdict verdict = TraceVerdict::Incomplete;
    int fiber_count = 0;
    int other_count = 0;
};

/// Transports the witness from tau to 0 and to -tau along common paths and
/// compares the centroids. Throws TraceError if any transport fails.
TraceCertificate trace_verdict(const SlicedSystem& ss, const WitnessSet& witness, double trace_tol, Rng& rng,
                               const TraceOptions& opts = {});

}  // namespace monocensus
