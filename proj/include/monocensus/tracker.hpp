#pragma once

#include <optional>
#include <string_view>

#include "monocensus/polysys.hpp"

namespace monocensus {

/// One edge of a parameter loop with the gamma trick built in:
///
///   p(t) = ((1-t) ga a + t gb b) / ((1-t) ga + t gb),   t in [0, 1].
///
/// For generic ga, gb the image is a circular arc from a to b inside the
/// complex line through a and b; ga = gb gives the straight segment.
struct SegmentPath {
    PointVec a;
    PointVec b;
    Complex gamma_a{1.0, 0.0};
    Complex gamma_b{1.0, 0.0};

    /// Throws std::invalid_argument on zero gammas, mismatched lengths, or a
    /// denominator that vanishes somewhere on [0, 1].
    void validate() const;

    PointVec at(double t) const;
    /// dp/dt = (b - a) ga gb / ((1-t) ga + t gb)^2
    PointVec derivative(double t) const;

    /// Same arc traversed from b to a.
    SegmentPath reversed() const { return {b, a, gamma_b, gamma_a}; }
};

struct TrackOptions {
    double step_initial = 0.1;
    double step_min = 1e-14;
    double step_max = 1.0;
    double corrector_tol = 1e-10;
    int max_corrector_iters = 3;
    int max_steps = 10'000;
    double endpoint_tol = 1e-10;

    void validate() const;
};

enum class PathStatus { Success, Diverged, StepLimitReached, SingularEndpoint };

std::string_view to_string(PathStatus s);

struct PathResult {
    PathStatus status = PathStatus::StepLimitReached;
    std::optional<PointVec> endpoint;  // present iff status == Success
    int steps_taken = 0;

    bool ok() const { return status == PathStatus::Success; }
};

struct NewtonResult {
    PointVec x;
    bool converged = false;
    int iterations = 0;
};

/// Newton's method at fixed parameter. Converged means the residual is below
/// tol and the last step was below tol * (1 + |x|). A singular Jacobian stops
/// the iteration with converged == false.
NewtonResult newton_refine(const ParameterizedSystem& sys, const PointVec& x, const PointVec& p, double tol,
                           int max_iters);

/// Continues x0 from p(0) to p(1) with an Euler predictor on the Davidenko
/// equation J_x x' = -J_p p' and a Newton corrector at fixed t.
PathResult track_segment(const ParameterizedSystem& sys, const PointVec& x0, const SegmentPath& path,
                         const TrackOptions& opts = {});

}  // namespace monocensus
