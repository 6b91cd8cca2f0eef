#include "monocensus/tracker.hpp"

#include <stdexcept>
#include <string>

namespace monocensus {

namespace {

// A step-size collapse this close to t = 1 is attributed to the endpoint.
constexpr double kEndgameZone = 1e-6;
constexpr double kDivergenceNorm = 1e10;
constexpr int kEndpointNewtonIters = 8;
constexpr int kGrowAfterAccepts = 3;

bool corrector(const ParameterizedSystem& sys, PointVec& x, const PointVec& p, const TrackOptions& opts) {
    double previous = 0.0;
    for (int it = 0; it < opts.max_corrector_iters; ++it) {
        PointVec f = sys.evaluate(x, p);
        Eigen::FullPivLU<ComplexMatrix> lu(sys.jacobian(x, p).wrt_vars);
        if (!lu.isInvertible()) return false;
        PointVec dx = lu.solve(-f);
        x += dx;
        if (!all_finite(x)) return false;
        const double size = inf_norm(dx);
        // Newton must contract; otherwise the predictor left the basin.
        if (it > 0 && size > 0.5 * previous) return false;
        if (size < opts.corrector_tol * (1.0 + inf_norm(x))) return true;
        previous = size;
    }
    return false;
}

}  // namespace

std::string_view to_string(PathStatus s) {
    switch (s) {
        case PathStatus::Success: return "Success";
        case PathStatus::Diverged: return "Diverged";
        case PathStatus::StepLimitReached: return "StepLimitReached";
        case PathStatus::SingularEndpoint: return "SingularEndpoint";
    }
    return "?";
}

void SegmentPath::validate() const {
    if (a.size() != b.size()) throw std::invalid_argument("segment endpoints differ in length");
    if (gamma_a == Complex{} || gamma_b == Complex{}) throw std::invalid_argument("segment gamma is zero");
    // The denominator is affine in t, so a zero on [0, 1] shows up as a sign of
    // near-vanishing on a fine grid.
    const double scale = std::max(std::abs(gamma_a), std::abs(gamma_b));
    for (int i = 0; i <= 1000; ++i) {
        const double t = i / 1000.0;
        if (std::abs((1.0 - t) * gamma_a + t * gamma_b) < 1e-8 * scale)
            throw std::invalid_argument("segment denominator vanishes near t = " + std::to_string(t));
    }
}

PointVec SegmentPath::at(double t) const {
    if (t == 0.0) return a;
    if (t == 1.0) return b;
    const Complex wa = (1.0 - t) * gamma_a;
    const Complex wb = t * gamma_b;
    return (wa * a + wb * b) / (wa + wb);
}

PointVec SegmentPath::derivative(double t) const {
    const Complex d = (1.0 - t) * gamma_a + t * gamma_b;
    return (b - a) * (gamma_a * gamma_b / (d * d));
}

void TrackOptions::validate() const {
    if (!(0.0 < step_min && step_min <= step_initial && step_initial <= step_max && step_max <= 1.0))
        throw std::invalid_argument("track options need 0 < step_min <= step_initial <= step_max <= 1");
    if (!(corrector_tol > 0.0 && endpoint_tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
    if (max_corrector_iters < 1 || max_steps < 1) throw std::invalid_argument("iteration limits must be positive");
}

NewtonResult newton_refine(const ParameterizedSystem& sys, const PointVec& x, const PointVec& p, double tol,
                           int max_iters) {
    NewtonResult r{x, false, 0};
    for (int it = 1; it <= max_iters; ++it) {
        r.iterations = it;
        PointVec f = sys.evaluate(r.x, p);
        Eigen::FullPivLU<ComplexMatrix> lu(sys.jacobian(r.x, p).wrt_vars);
        if (!lu.isInvertible()) return r;
        PointVec dx = lu.solve(-f);
        r.x += dx;
        if (!all_finite(r.x)) return r;
        if (inf_norm(dx) < tol * (1.0 + inf_norm(r.x)) && inf_norm(sys.evaluate(r.x, p)) < tol) {
            r.converged = true;
            return r;
        }
    }
    return r;
}

PathResult track_segment(const ParameterizedSystem& sys, const PointVec& x0, const SegmentPath& path,
                         const TrackOptions& opts) {
    opts.validate();
    path.validate();
    if (path.a.size() != sys.n_params()) throw std::invalid_argument("segment lives in the wrong parameter space");

    PathResult result;
    PointVec x = x0;
    double t = 0.0;
    double h = opts.step_initial;
    int streak = 0;

    while (t < 1.0) {
        if (result.steps_taken >= opts.max_steps) {
            result.status = PathStatus::StepLimitReached;
            return result;
        }
        ++result.steps_taken;

        const double t1 = (h >= 1.0 - t) ? 1.0 : t + h;
        const PointVec p0 = path.at(t);
        const Jacobians jac = sys.jacobian(x, p0);
        Eigen::FullPivLU<ComplexMatrix> lu(jac.wrt_vars);
        bool accepted = false;
        PointVec next;
        if (lu.isInvertible()) {
            const PointVec velocity = lu.solve(-(jac.wrt_params * path.derivative(t)));
            next = x + (t1 - t) * velocity;
            accepted = all_finite(next) && corrector(sys, next, path.at(t1), opts);
        }

        if (accepted) {
            x = std::move(next);
            t = t1;
            if (inf_norm(x) > kDivergenceNorm) {
                result.status = PathStatus::Diverged;
                return result;
            }
            if (++streak >= kGrowAfterAccepts) {
                h = std::min(2.0 * h, opts.step_max);
                streak = 0;
            }
        } else {
            h *= 0.5;
            streak = 0;
            if (h < opts.step_min) {
                result.status = (1.0 - t < kEndgameZone) ? PathStatus::SingularEndpoint : PathStatus::StepLimitReached;
                return result;
            }
        }
    }

    NewtonResult end = newton_refine(sys, x, path.b, opts.endpoint_tol, kEndpointNewtonIters);
    if (!end.converged || inf_norm(sys.evaluate(end.x, path.b)) >= opts.endpoint_tol) {
        result.status = PathStatus::SingularEndpoint;
        return result;
    }
    result.status = PathStatus::Success;
    result.endpoint = std::move(end.x);
    return result;
}

}  // namespace monocensus
