#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "monocensus/popsim.hpp"

using namespace monocensus;

namespace {

void check_record(const LoopRecord& r, int population) {
    CHECK(r.n_start == static_cast<int>(r.start_ids.size()));
    CHECK(r.n_end == static_cast<int>(r.end_ids.size()));
    CHECK(r.n_end + r.n_failures == r.n_start);
    CHECK(r.n_overlap + r.n_new == r.n_end);
    CHECK(r.n_overlap <= std::min(r.n_start, r.n_end));
    CHECK(r.known_after == r.n_start + r.n_new);
    CHECK(r.known_after <= population);

    std::set<int> start(r.start_ids.begin(), r.start_ids.end());
    std::set<int> end(r.end_ids.begin(), r.end_ids.end());
    CHECK(start.size() == r.start_ids.size());
    CHECK(end.size() == r.end_ids.size());  // a permutation never merges
    int overlap = 0;
    for (int id : end) {
        CHECK(id >= 0);
        CHECK(id < population);
        overlap += static_cast<int>(start.count(id));
    }
    CHECK(overlap == r.n_overlap);
}

}  // namespace

TEST_CASE("config validation") {
    SimConfig bad;
    bad.initial_known = 2000;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    SimConfig rate;
    rate.failure_rate = 1.0;
    CHECK_THROWS_AS(rate.validate(), std::invalid_argument);
    SimConfig zero;
    zero.population = 0;
    CHECK_THROWS_AS(zero.validate(), std::invalid_argument);
    CHECK_THROWS_AS(coverage_experiment(SimConfig{}, 99, EstimatorKind::Chapman, 3), std::invalid_argument);
}

TEST_CASE("population of two") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        SimConfig cfg{2, 40, 0.0, seed, 1};
        auto recs = simulate_process(cfg);
        REQUIRE(recs.size() == 40);
        bool full = false;
        for (const auto& r : recs) {
            check_record(r, 2);
            CHECK((r.n_start == 1 || r.n_start == 2));
            if (full) {
                CHECK(r.n_start == 2);
                std::vector<int> e = r.end_ids;
                std::sort(e.begin(), e.end());
                CHECK(e == r.start_ids);
            }
            full = full || r.known_after == 2;
        }
        // Each loop from one known point finds the other with probability 1/2.
        CHECK(full);
    }
}

TEST_CASE("known count trajectory at population 1442") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SimConfig cfg{1442, 20, 0.0, seed, 1};
        auto recs = simulate_process(cfg);
        int known = 1;
        for (const auto& r : recs) {
            check_record(r, 1442);
            CHECK(r.n_start == known);
            CHECK(r.n_end == r.n_start);
            CHECK(r.known_after >= known);
            known = r.known_after;
        }
        CHECK(known <= 1442);
    }
}

TEST_CASE("failure rate is realized") {
    SimConfig cfg{1442, 20, 0.05, 9, 1};
    long long failures = 0, starts = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        cfg.seed = seed;
        for (const auto& r : simulate_process(cfg)) {
            check_record(r, cfg.population);
            failures += r.n_failures;
            starts += r.n_start;
        }
    }
    REQUIRE(starts > 10000);
    CHECK(static_cast<double>(failures) / static_cast<double>(starts) == doctest::Approx(0.05).epsilon(0.2));
}

TEST_CASE("overlap matches the hypergeometric mean") {
    // With K known out of B, a random permutation maps K^2 / B of them back into the known set on average.
    const int population = 200;
    double observed = 0.0, expected = 0.0;
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        SimConfig cfg{population, 1, 0.0, seed, 50};
        auto recs = simulate_process(cfg);
        observed += recs[0].n_overlap;
        expected += 50.0 * 50.0 / population;
    }
    CHECK(observed / expected == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("simulation is reproducible") {
    SimConfig cfg{1442, 10, 0.02, 77, 3};
    auto a = simulate_process(cfg);
    auto b = simulate_process(cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].start_ids == b[i].start_ids);
        CHECK(a[i].end_ids == b[i].end_ids);
    }
    cfg.seed = 78;
    CHECK(simulate_process(cfg).back().end_ids != a.back().end_ids);
}

TEST_CASE("complete recapture returns the population") {
    SimConfig cfg{30, 5, 0.0, 3, 30};
    auto recs = simulate_process(cfg);
    for (const auto& r : recs) {
        CHECK(r.n_overlap == 30);
        CHECK(*lincoln_petersen(r).beta == 30.0);
        CHECK(*chapman(r).beta == doctest::Approx(30.0));
    }
    CHECK(*schnabel(recs, 3).beta == 30.0);
}

TEST_CASE("small population report survives undefined estimates") {
    for (auto kind : {EstimatorKind::LincolnPetersen, EstimatorKind::Chapman, EstimatorKind::Schnabel}) {
        CoverageReport rep = coverage_experiment(SimConfig{10, 12, 0.0, 5, 1}, 100, kind, 3);
        REQUIRE(rep.rows.size() == 12);
        for (const auto& row : rep.rows) {
            CHECK(row.frac_known > 0.0);
            CHECK(row.frac_known <= 1.0);
            if (row.coverage) {
                CHECK(*row.coverage >= 0.0);
                CHECK(*row.coverage <= 1.0);
                CHECK(row.counted >= rep.min_counted);
            }
        }
        std::ostringstream csv;
        write_coverage_csv(csv, rep);
        const std::string text = csv.str();
        CHECK(text.rfind("loop_index,coverage,median_rel_error,frac_known\n", 0) == 0);
        CHECK(std::count(text.begin(), text.end(), '\n') == 13);
    }
}

TEST_CASE("coverage report does not depend on the thread count") {
    SimConfig cfg{300, 10, 0.0, 4, 1};
    CoverageReport one = coverage_experiment(cfg, 120, EstimatorKind::Chapman, 3, 1);
    CoverageReport four = coverage_experiment(cfg, 120, EstimatorKind::Chapman, 3, 4);
    std::ostringstream a, b;
    write_coverage_csv(a, one);
    write_coverage_csv(b, four);
    CHECK(a.str() == b.str());
}
