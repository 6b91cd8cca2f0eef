#include "monocensus/popsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "monocensus/numfmt.hpp"
#include "monocensus/parallel.hpp"
#include "monocensus/rng.hpp"

namespace monocensus {

void SimConfig::validate() const {
    if (population < 1) throw std::invalid_argument("population must be positive");
    if (n_loops < 1) throw std::invalid_argument("n_loops must be positive");
    if (!(failure_rate >= 0.0 && failure_rate < 1.0)) throw std::invalid_argument("failure_rate must lie in [0, 1)");
    if (initial_known < 1 || initial_known > population)
        throw std::invalid_argument("initial_known must lie in [1, population]");
}

namespace {

std::vector<LoopRecord> simulate_trial(const SimConfig& cfg, Rng rng, bool keep_ids) {
    const int pop = cfg.population;
    std::vector<int> known(static_cast<std::size_t>(cfg.initial_known));
    std::iota(known.begin(), known.end(), 0);
    std::vector<char> is_known(static_cast<std::size_t>(pop), 0);
    for (int id : known) is_known[static_cast<std::size_t>(id)] = 1;

    // Any arrangement of the pool works as the start of a partial shuffle.
    std::vector<int> pool(static_cast<std::size_t>(pop));
    std::iota(pool.begin(), pool.end(), 0);

    std::vector<LoopRecord> recs;
    recs.reserve(static_cast<std::size_t>(cfg.n_loops));
    std::vector<int> fresh;
    for (int k = 1; k <= cfg.n_loops; ++k) {
        LoopRecord r;
        r.loop_index = k;
        r.n_start = static_cast<int>(known.size());
        if (keep_ids) r.start_ids = known;
        fresh.clear();
        for (std::size_t i = 0; i < known.size(); ++i) {
            // Images of the known set under a uniform permutation form a
            // uniform ordered sample without replacement.
            const std::size_t j = i + rng.uniform_int(static_cast<std::uint64_t>(pop) - i);
            std::swap(pool[i], pool[j]);
            const int image = pool[i];
            if (cfg.failure_rate > 0.0 && rng.uniform() < cfg.failure_rate) {
                ++r.n_failures;
                continue;
            }
            ++r.n_end;
            if (keep_ids) r.end_ids.push_back(image);
            if (is_known[static_cast<std::size_t>(image)])
                ++r.n_overlap;
            else
                fresh.push_back(image);
        }
        r.n_new = static_cast<int>(fresh.size());
        for (int id : fresh) {
            is_known[static_cast<std::size_t>(id)] = 1;
            known.push_back(id);
        }
        r.known_after = static_cast<int>(known.size());
        recs.push_back(std::move(r));
    }
    return recs;
}

double median(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<LoopRecord> simulate_process(const SimConfig& cfg) {
    cfg.validate();
    return simulate_trial(cfg, Rng(cfg.seed), true);
}

CoverageReport coverage_experiment(const SimConfig& cfg, int n_trials, EstimatorKind estimator, int window,
                                   unsigned threads) {
    cfg.validate();
    if (n_trials < 100) throw std::invalid_argument("coverage experiments need at least 100 trials");
    if (window < 1) throw std::invalid_argument("window must be at least 1");

    const auto trials = static_cast<std::size_t>(n_trials);
    const auto loops = static_cast<std::size_t>(cfg.n_loops);

    struct Cell {
        std::optional<double> beta;
        bool covered = false;
        bool saturated = false;
        double known_frac = 0.0;
        double overlap_frac = 0.0;
    };
    std::vector<std::vector<Cell>> cells(trials, std::vector<Cell>(loops));

    const Rng root(cfg.seed);
    parallel_for(trials, threads, [&](std::size_t trial) {
        auto recs = simulate_trial(cfg, root.substream(trial), false);
        std::span<const LoopRecord> all(recs);
        for (std::size_t k = 0; k < loops; ++k) {
            const LoopRecord& r = recs[k];
            Estimate est = estimate(estimator, all.first(k + 1), window);
            Cell& c = cells[trial][k];
            c.beta = est.beta;
            c.covered = est.covers(cfg.population);
            c.saturated = r.n_start == cfg.population;
            c.known_frac = static_cast<double>(r.known_after) / cfg.population;
            c.overlap_frac = static_cast<double>(r.n_overlap) / r.n_start;
        }
    });

    CoverageReport report;
    report.config = cfg;
    report.estimator = estimator;
    report.window = window;
    report.n_trials = n_trials;
    report.min_counted = std::max(1, n_trials / 20);

    for (std::size_t k = 0; k < loops; ++k) {
        CoverageRow row;
        row.loop_index = static_cast<int>(k + 1);
        int covered = 0;
        std::vector<double> rel_errors, known;
        double overlap_sum = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            const Cell& c = cells[t][k];
            known.push_back(c.known_frac);
            overlap_sum += c.overlap_frac;
            if (!c.beta) continue;
            rel_errors.push_back(std::abs(*c.beta - cfg.population) / cfg.population);
            if (c.saturated) continue;
            ++row.counted;
            covered += c.covered ? 1 : 0;
        }
        if (row.counted >= report.min_counted) row.coverage = static_cast<double>(covered) / row.counted;
        if (!rel_errors.empty()) row.median_rel_error = median(std::move(rel_errors));
        row.frac_known = median(std::move(known));
        row.mean_overlap_frac = overlap_sum / n_trials;
        report.rows.push_back(row);
    }
    return report;
}

void write_coverage_csv(std::ostream& os, const CoverageReport& report) {
    os << "loop_index,coverage,median_rel_error,frac_known\n";
    for (const auto& r : report.rows) {
        os << r.loop_index << ',' << format_optional(r.coverage, "NA") << ','
           << format_optional(r.median_rel_error, "NA") << ',' << format_double(r.frac_known) << '\n';
    }
}

}  // namespace monocensus
