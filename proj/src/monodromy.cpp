#include "monocensus/monodromy.hpp"

#include <iostream>
#include <limits>
#include <set>

#include "monocensus/parallel.hpp"

namespace monocensus {

bool Loop::is_closed() const {
    auto same = [](const PointVec& u, const PointVec& v) { return u.size() == v.size() && u == v; };
    return same(segments[0].a, base) && same(segments[0].b, segments[1].a) && same(segments[1].b, segments[2].a) &&
           same(segments[2].b, base);
}

Loop make_triangle(const PointVec& base, const PointVec& q1, const PointVec& q2,
                   const std::array<std::pair<Complex, Complex>, 3>& gammas) {
    Loop loop;
    loop.base = base;
    loop.segments[0] = {base, q1, gammas[0].first, gammas[0].second};
    loop.segments[1] = {q1, q2, gammas[1].first, gammas[1].second};
    loop.segments[2] = {q2, base, gammas[2].first, gammas[2].second};
    return loop;
}

Loop random_loop(const PointVec& base, Rng& rng, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("loop scale must be positive");
    const std::uint64_t label = rng.key();
    const double radius = scale * (1.0 + inf_norm(base));
    PointVec q1 = base + radius * rng.complex_normal_vec(base.size());
    PointVec q2 = base + radius * rng.complex_normal_vec(base.size());
    std::array<std::pair<Complex, Complex>, 3> gammas;
    for (auto& g : gammas) {
        g.first = rng.unit_complex();
        g.second = rng.unit_complex();
    }
    Loop loop = make_triangle(base, q1, q2, gammas);
    loop.rng_label = label;
    return loop;
}

SolutionRegistry::SolutionRegistry(PointVec base, double dedup_tol, double residual_tol)
    : base_(std::move(base)), dedup_tol_(dedup_tol), residual_tol_(residual_tol) {
    if (!(dedup_tol_ > 0.0) || !(residual_tol_ > 0.0)) throw std::invalid_argument("registry tolerances must be positive");
}

std::optional<int> SolutionRegistry::find(const PointVec& x) const {
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].size() != x.size()) continue;
        const double d = inf_norm(entries_[i] - x);
        if (d < best_dist) {
            best_dist = d;
            best = static_cast<int>(i);
        }
    }
    if (best >= 0 && best_dist <= dedup_tol_ * (1.0 + inf_norm(x))) return best;
    return std::nullopt;
}

InsertResult SolutionRegistry::insert(const ParameterizedSystem& sys, const PointVec& x) {
    if (x.size() != sys.n_vars() || !all_finite(x)) throw ResidualError("point has wrong length or is not finite");
    const double residual = inf_norm(sys.evaluate(x, base_));
    if (!(residual < residual_tol_))
        throw ResidualError("residual " + std::to_string(residual) + " exceeds registry tolerance");
    if (auto id = find(x)) return {*id, false};
    entries_.push_back(x);
    return {size() - 1, true};
}

LoopRecord run_loop(const ParameterizedSystem& sys, SolutionRegistry& registry, const Loop& loop,
                    const MonodromyOptions& opts, int loop_index) {
    if (registry.empty()) throw std::invalid_argument("run_loop needs a nonempty registry");
    if (!loop.is_closed() || loop.base != registry.base())
        throw std::invalid_argument("loop must start and end at the registry base");

    const int n = registry.size();
    std::vector<std::optional<PointVec>> endpoints(static_cast<std::size_t>(n));

    parallel_for(static_cast<std::size_t>(n), opts.threads, [&](std::size_t i) {
        PointVec x = registry.at(static_cast<int>(i));
        for (const auto& seg : loop.segments) {
            PathResult r = track_segment(sys, x, seg, opts.track);
            if (!r.ok()) return;
            x = std::move(*r.endpoint);
        }
        NewtonResult refined = newton_refine(sys, x, registry.base(), opts.refine_tol, opts.refine_iters);
        if (refined.converged) endpoints[i] = std::move(refined.x);
    });

    LoopRecord rec;
    rec.loop_index = loop_index;
    rec.n_start = n;
    for (int i = 0; i < n; ++i) rec.start_ids.push_back(i);

    // Merge is serial and in start order, so results do not depend on threads.
    std::set<int> hit;
    for (auto& end : endpoints) {
        if (!end) {
            ++rec.n_failures;
            continue;
        }
        InsertResult ins;
        try {
            ins = registry.insert(sys, *end);
        } catch (const ResidualError&) {
            ++rec.n_failures;
            continue;
        }
        rec.end_ids.push_back(ins.id);
        if (!hit.insert(ins.id).second) ++rec.n_collisions;
        if (ins.id < n)
            ++rec.n_overlap;
        else
            ++rec.n_new;
    }
    rec.n_end = static_cast<int>(rec.end_ids.size());
    rec.known_after = registry.size();
    if (rec.n_collisions > 0)
        std::cerr << "warning: loop " << loop_index << ": " << rec.n_collisions
                  << " path(s) merged onto an already reached solution\n";
    return rec;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kSeedResidual = 1e-12;

Seed finish_seed(const ParameterizedSystem& sys, PointVec x, PointVec p) {
    if (inf_norm(sys.evaluate(x, p)) >= kSeedResidual) {
        NewtonResult r = newton_refine(sys, x, p, kSeedResidual, 20);
        if (r.converged) x = std::move(r.x);
    }
    const double residual = inf_norm(sys.evaluate(x, p));
    if (!(residual < kSeedResidual))
        throw SeedError("seed residual " + std::to_string(residual) + " could not be refined below 1e-12");
    return {std::move(x), std::move(p)};
}

Seed seed_user(const ParameterizedSystem& sys, const UserSupplied& s) {
    if (s.x.size() != sys.n_vars() || s.p.size() != sys.n_params())
        throw SeedError("seed pair has the wrong dimensions");
    if (!all_finite(s.x) || !all_finite(s.p)) throw SeedError("seed pair is not finite");
    const double residual = inf_norm(sys.evaluate(s.x, s.p));
    if (!(residual <= s.accept_tol))
        throw SeedError("seed pair is not a solution: residual " + std::to_string(residual));
    return finish_seed(sys, s.x, s.p);
}

Seed seed_fabricate(const ParameterizedSystem& sys, const FabricateLinearInParams& s) {
    const int n = sys.n_vars();
    const int np = sys.n_params();
    for (const auto& poly : sys.polynomials())
        for (const auto& m : poly)
            if (m.param_degree() > 1) throw SeedError("fabrication needs equations affine-linear in the parameters");
    if (np == 0) throw SeedError("fabrication needs at least one parameter");

    Rng rng(s.rng_seed);
    PointVec x = s.x ? *s.x : rng.complex_normal_vec(n);
    if (x.size() != n) throw SeedError("fabrication point has the wrong dimension");

    // F(x; p) = A p + b with x fixed.
    ComplexMatrix A = ComplexMatrix::Zero(n, np);
    PointVec b = PointVec::Zero(n);
    for (int i = 0; i < n; ++i) {
        for (const auto& m : sys.polynomials()[static_cast<std::size_t>(i)]) {
            Complex v = m.coefficient;
            for (auto [k, e] : m.var_exponents)
                for (int r = 0; r < e; ++r) v *= x[k];
            if (m.param_exponents.empty())
                b[i] += v;
            else
                A(i, m.param_exponents.front().first) += v;
        }
    }
    Eigen::CompleteOrthogonalDecomposition<ComplexMatrix> cod(A);
    if (cod.rank() < n) throw SeedError("parameter equations are rank deficient at the fabricated point");
    // Project a random parameter onto the affine solution set {A p = -b}.
    PointVec p = rng.complex_normal_vec(np);
    p -= cod.solve(A * p + b);
    return finish_seed(sys, std::move(x), std::move(p));
}

}  // namespace

Seed seed_solution(const ParameterizedSystem& sys, const SeedStrategy& strategy) {
    return std::visit(
        [&](const auto& s) -> Seed {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, UserSupplied>)
                return seed_user(sys, s);
            else
                return seed_fabricate(sys, s);
        },
        strategy);
}

}  // namespace monocensus
