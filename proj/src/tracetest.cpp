#include "monocensus/tracetest.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "monocensus/parallel.hpp"

namespace monocensus {

namespace {

std::string fresh_name(const std::set<std::string>& taken, std::string name) {
    while (taken.count(name)) name += "_";
    return name;
}

/// Coefficients of prod_k (p*_k + s v_k)^e_k as a polynomial in s.
std::vector<Complex> expand_on_line(const Exponents& params, const PointVec& p_star, const PointVec& direction) {
    std::vector<Complex> poly{Complex{1.0, 0.0}};
    for (auto [k, e] : params) {
        for (int r = 0; r < e; ++r) {
            std::vector<Complex> next(poly.size() + 1, Complex{});
            for (std::size_t j = 0; j < poly.size(); ++j) {
                next[j] += poly[j] * p_star[k];
                next[j + 1] += poly[j] * direction[k];
            }
            poly = std::move(next);
        }
    }
    return poly;
}

ParameterizedSystem build_combined(const ParameterizedSystem& sys, const PointVec& p_star, const PointVec& direction,
                                   const PointVec& lambda_coeffs, Complex lambda_const) {
    const int n = sys.n_vars();
    std::set<std::string> taken(sys.var_names().begin(), sys.var_names().end());
    taken.insert(sys.param_names().begin(), sys.param_names().end());
    const std::string s_name = fresh_name(taken, "s");
    taken.insert(s_name);
    const std::string t_name = fresh_name(taken, "t");

    std::vector<std::string> vars = sys.var_names();
    vars.push_back(s_name);

    std::vector<std::vector<Monomial>> polys;
    for (const auto& poly : sys.polynomials()) {
        std::vector<Monomial> terms;
        for (const auto& m : poly) {
            auto in_s = expand_on_line(m.param_exponents, p_star, direction);
            for (std::size_t j = 0; j < in_s.size(); ++j) {
                Monomial t{m.coefficient * in_s[j], m.var_exponents, {}};
                if (j > 0) t.var_exponents.emplace_back(n, static_cast<int>(j));
                terms.push_back(std::move(t));
            }
        }
        polys.push_back(std::move(terms));
    }

    std::vector<Monomial> slice;
    for (int j = 0; j < n; ++j) slice.push_back({lambda_coeffs[j], {{j, 1}, {n, 1}}, {}});
    slice.push_back({lambda_const, {{n, 1}}, {}});
    slice.push_back({Complex{-1.0, 0.0}, {}, {{0, 1}}});
    polys.push_back(std::move(slice));

    return ParameterizedSystem(std::move(vars), {t_name}, std::move(polys));
}

PointVec scalar_param(Complex t) {
    PointVec p(1);
    p[0] = t;
    return p;
}

/// Carries every point along one common path; any failure is fatal.
std::vector<PointVec> transport(const ParameterizedSystem& combined, const std::vector<PointVec>& points,
                                const SegmentPath& path, const MonodromyOptions& opts, const char* what) {
    std::vector<std::optional<PointVec>> out(points.size());
    parallel_for(points.size(), opts.threads, [&](std::size_t i) {
        PathResult r = track_segment(combined, points[i], path, opts.track);
        if (!r.ok()) return;
        NewtonResult refined = newton_refine(combined, *r.endpoint, path.b, opts.refine_tol, opts.refine_iters);
        if (refined.converged) out[i] = std::move(refined.x);
    });
    std::vector<PointVec> result;
    result.reserve(points.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!out[i]) throw TraceError(std::string("path failure while transporting witness point ") +
                                      std::to_string(i) + " " + what);
        result.push_back(std::move(*out[i]));
    }
    return result;
}

SegmentPath random_segment(Complex from, Complex to, Rng& rng) {
    return {scalar_param(from), scalar_param(to), rng.unit_complex(), rng.unit_complex()};
}

PointVec centroid(const std::vector<PointVec>& pts) {
    PointVec c = PointVec::Zero(pts.front().size());
    for (const auto& p : pts) c += p;
    return c / static_cast<double>(pts.size());
}

}  // namespace

Complex SlicedSystem::lambda(const PointVec& x) const {
    const auto n = system.n_vars();
    return (lambda_coeffs.head(n).transpose() * x.head(n)).value() + lambda_const;
}

PointVec SlicedSystem::parameter_of(const PointVec& xs) const { return p_star + xs[system.n_vars()] * direction; }

PointVec SlicedSystem::lift(const PointVec& x) const {
    PointVec xs(system.n_vars() + 1);
    xs.head(system.n_vars()) = x;
    xs[system.n_vars()] = Complex{};
    return xs;
}

SlicedSystem make_slice(const ParameterizedSystem& sys, const PointVec& p_star, const PointVec& direction,
                        const PointVec& lambda_coeffs, Complex lambda_const) {
    if (sys.n_params() < 1) throw std::invalid_argument("slicing needs at least one parameter");
    if (p_star.size() != sys.n_params() || direction.size() != sys.n_params())
        throw std::invalid_argument("slice line lives in the wrong parameter space");
    if (lambda_coeffs.size() != sys.n_vars()) throw std::invalid_argument("slice form has the wrong length");
    if (inf_norm(direction) == 0.0) throw std::invalid_argument("slice direction is zero");
    return SlicedSystem{sys,           p_star,       direction,
                        lambda_coeffs, lambda_const, build_combined(sys, p_star, direction, lambda_coeffs, lambda_const)};
}

SlicedSystem build_slice(const ParameterizedSystem& sys, const PointVec& p_star, Rng& rng) {
    PointVec direction = rng.complex_normal_vec(sys.n_params());
    PointVec coeffs = rng.complex_normal_vec(sys.n_vars());
    Complex c0 = rng.complex_normal();
    return make_slice(sys, p_star, direction, coeffs, c0);
}

std::string_view to_string(TraceVerdict v) { return v == TraceVerdict::Complete ? "Complete" : "Incomplete"; }

WitnessExtension extend_witness(const SlicedSystem& ss, const SolutionRegistry& fiber, double tau, Rng& rng,
                                const TraceOptions& opts) {
    if (fiber.empty()) throw TraceError("cannot extend a witness from an empty fiber");
    if (fiber.base().size() != ss.p_star.size() || inf_norm(fiber.base() - ss.p_star) > 0.0)
        throw TraceError("registry base differs from the slice base point");
    if (!(tau != 0.0)) throw TraceError("tau must be nonzero");

    WitnessExtension ext{ss, {}, 0, 0, 0, 0, {}};
    const int n = ss.system.n_vars();

    auto near_branch = [&](const SlicedSystem& s) {
        return std::any_of(fiber.entries().begin(), fiber.entries().end(),
                           [&](const PointVec& x) { return std::abs(s.lambda(x)) < opts.lambda_min; });
    };
    while (near_branch(ext.slice)) {
        if (ext.lambda_rerolls >= opts.max_lambda_rerolls)
            throw TraceError("could not draw a slice form that avoids the fiber");
        ++ext.lambda_rerolls;
        ext.slice = make_slice(ss.system, ss.p_star, ss.direction, rng.complex_normal_vec(n), rng.complex_normal());
    }
    const ParameterizedSystem& combined = ext.slice.combined;

    std::vector<PointVec> lifts;
    for (const auto& x : fiber.entries()) lifts.push_back(ext.slice.lift(x));
    auto at_tau = transport(combined, lifts, random_segment(0.0, tau, rng), opts.monodromy, "from t = 0 to tau");

    const PointVec base = scalar_param(tau);
    SolutionRegistry witness(base, opts.dedup_tol);
    for (const auto& p : at_tau) {
        InsertResult ins;
        try {
            ins = witness.insert(combined, p);
        } catch (const ResidualError& e) {
            throw TraceError(std::string("lifted point rejected: ") + e.what());
        }
        if (!ins.is_new) throw TraceError("two fiber points lifted onto the same witness point");
    }
    ext.n_lifted = witness.size();

    StopConfig stop = opts.stop;
    for (int k = 0; k < stop.max_loops; ++k) {
        Rng loop_rng = rng.substream(static_cast<std::uint64_t>(k));
        // Log-uniform radii reach branch points far from tau as well as near ones.
        const double spread = std::pow(10.0, opts.loop_decades * (loop_rng.uniform() - 0.25));
        Loop loop = random_loop(base, loop_rng, opts.loop_scale * spread);
        ext.records.push_back(run_loop(combined, witness, loop, opts.monodromy, k + 1));
        ++ext.loops_run;
        if (stopping_decision(ext.records, stop) != StopDecision::Continue) break;
    }

    // Along one common path to t = 0 the witness maps bijectively onto the
    // solutions there; points landing on fiber points outside the registry
    // are dropped so that a partial registry cannot be completed here.
    std::vector<PointVec> kept;
    const std::vector<PointVec>& all = witness.entries();
    auto at_zero = transport(combined, all, random_segment(tau, 0.0, rng), opts.monodromy, "to t = 0");
    for (std::size_t i = 0; i < all.size(); ++i) {
        const PointVec& z = at_zero[i];
        if (std::abs(z[n]) < opts.dedup_tol && !fiber.find(z.head(n)))
            ++ext.unregistered_fiber_points;
        else
            kept.push_back(all[i]);
    }
    ext.witness = WitnessSet{Complex{tau, 0.0}, std::move(kept)};
    return ext;
}

TraceCertificate trace_verdict(const SlicedSystem& ss, const WitnessSet& witness, double trace_tol, Rng& rng,
                               const TraceOptions& opts) {
    if (witness.points.empty()) throw TraceError("trace test needs a nonempty witness set");
    const Complex tau = witness.t_value;
    const int n = ss.system.n_vars();

    auto at_zero = transport(ss.combined, witness.points, random_segment(tau, 0.0, rng), opts.monodromy, "to t = 0");
    auto at_minus =
        transport(ss.combined, witness.points, random_segment(tau, -tau, rng), opts.monodromy, "to t = -tau");

    TraceCertificate cert;
    cert.tau = tau.real();
    cert.trace_tol = trace_tol;
    cert.centroids = {centroid(at_minus), centroid(at_zero), centroid(witness.points)};
    const PointVec second_difference = cert.centroids[0] - 2.0 * cert.centroids[1] + cert.centroids[2];
    cert.residual = inf_norm(second_difference) / (1.0 + inf_norm(cert.centroids[1]));
    cert.verdict = cert.residual < trace_tol ? TraceVerdict::Complete : TraceVerdict::Incomplete;
    for (const auto& p : at_zero) {
        if (std::abs(p[n]) < opts.dedup_tol)
            ++cert.fiber_count;
        else
            ++cert.other_count;
    }
    cert.points_at_zero = std::move(at_zero);
    return cert;
}

}  // namespace monocensus
