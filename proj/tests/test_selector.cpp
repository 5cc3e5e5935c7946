#include "doctest.h"

#include <stdexcept>

#include <cmath>
#include <numeric>

#include "gitfl/selector.hpp"

using namespace gitfl;

TEST_CASE("version_reward: worked examples") {
    ClientStats stats(2);
    stats.time_table = {100.0, 300.0};
    // V=[2,4], i=1, c=1: (+1) * (300-200)/300 = 1/3
    CHECK(version_reward(1, 1, {2, 4}, stats) == doctest::Approx(1.0 / 3.0));
    // i=0: sign flip
    CHECK(version_reward(1, 0, {2, 4}, stats) == doctest::Approx(-1.0 / 3.0));
    // version at the mean: zero for every client
    CHECK(version_reward(0, 0, {3, 3}, stats) == doctest::Approx(0.0));
    CHECK(version_reward(1, 0, {3, 3}, stats) == doctest::Approx(0.0));
}

TEST_CASE("version_reward: cold start yields zero") {
    ClientStats stats(3);
    CHECK(version_reward(0, 0, {5, 1, 0}, stats) == 0.0);
}

TEST_CASE("curiosity_reward: count floor and decay") {
    ClientStats stats(3);
    stats.count_table = {0, 4, 100};
    CHECK(curiosity_reward(0, stats) == doctest::Approx(1.0));
    CHECK(curiosity_reward(1, stats) == doctest::Approx(0.5));
    CHECK(curiosity_reward(2, stats) == doctest::Approx(0.1));
}

TEST_CASE("combined_reward: clamp at zero") {
    // R_v = -2 needs |v_ctrl| >= 2 and full time spread
    ClientStats stats(2);
    stats.time_table = {0.0, 300.0};
    stats.count_table = {4, 4};  // R_c = 0.5
    // V=[0,4]: v_ctrl(0) = -2; client 1: (300-150)/300 = 0.5 -> R_v = -1.0
    CHECK(version_reward(1, 0, {0, 4}, stats) == doctest::Approx(-1.0));
    CHECK(combined_reward(1, 0, {0, 4}, stats) == doctest::Approx(0.0));
    // clamp inactive
    ClientStats fresh(2);
    CHECK(combined_reward(0, 0, {1, 1}, fresh) == doctest::Approx(1.0));
}

TEST_CASE("selection_probabilities: normalization and fallback") {
    // cold start, counts [1,9] -> curiosity rewards [1, 1/3] -> [0.75, 0.25]
    ClientStats stats(2);
    stats.count_table = {1, 9};
    const std::vector<int> eligible{0, 1};
    const auto probs =
        selection_probabilities(0, {1, 1}, stats, eligible, SelectorVariant::CV);
    CHECK(probs[0] == doctest::Approx(0.75));
    CHECK(probs[1] == doctest::Approx(0.25));
    CHECK(probs[0] + probs[1] == doctest::Approx(1.0).epsilon(1e-12));

    // one eligible client: probability 1
    const auto one = selection_probabilities(0, {1, 1}, stats, {1});
    CHECK(one[0] == doctest::Approx(1.0));

    // all rewards zero (variant V, equal versions): uniform over 4
    ClientStats s4(4);
    s4.time_table = {1.0, 2.0, 3.0, 4.0};
    const auto u =
        selection_probabilities(0, {2, 2}, s4, {0, 1, 2, 3}, SelectorVariant::V);
    for (double p : u) CHECK(p == doctest::Approx(0.25));

    CHECK_THROWS_AS(selection_probabilities(0, {1, 1}, stats, {}), std::logic_error);
}

TEST_CASE("selection_probabilities: law, scale invariance, zero-reward exclusion") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(next_uniform(rng) * 20);
        const int k = 2 + static_cast<int>(next_uniform(rng) * 6);
        ClientStats stats(n);
        for (int c = 0; c < n; ++c) {
            stats.count_table[c] = static_cast<long>(next_uniform(rng) * 40);
            stats.time_table[c] = next_uniform(rng) * 500.0;
        }
        VersionVector v(k);
        for (long& x : v) x = static_cast<long>(next_uniform(rng) * 30);
        const int branch = static_cast<int>(next_uniform(rng) * k) % k;
        std::vector<int> eligible(n);
        std::iota(eligible.begin(), eligible.end(), 0);

        const auto probs = selection_probabilities(branch, v, stats, eligible);
        double sum = 0.0;
        bool any_positive = false;
        for (int c = 0; c < n; ++c) {
            CHECK(probs[c] >= 0.0);
            sum += probs[c];
            if (combined_reward(c, branch, v, stats) > 0.0) any_positive = true;
        }
        CHECK(std::fabs(sum - 1.0) < 1e-12);

        if (any_positive) {
            // matches rewards normalized, so zero-reward clients get 0
            double rsum = 0.0;
            for (int c = 0; c < n; ++c) rsum += combined_reward(c, branch, v, stats);
            for (int c = 0; c < n; ++c) {
                const double expect = combined_reward(c, branch, v, stats) / rsum;
                CHECK(probs[c] == doctest::Approx(expect).epsilon(1e-9));
                if (combined_reward(c, branch, v, stats) == 0.0) {
                    CHECK(probs[c] == 0.0);
                }
            }
        }
    }
}

TEST_CASE("version-neutral independence: V[i]=mean makes T_t irrelevant") {
    ClientStats a(5), b(5);
    a.count_table = b.count_table = {1, 2, 3, 4, 5};
    a.time_table = {10, 20, 30, 40, 50};
    b.time_table = {500, 1, 77, 3, 250};  // arbitrary perturbation
    const VersionVector v{6, 6, 6};       // every branch at the mean
    const std::vector<int> eligible{0, 1, 2, 3, 4};
    const auto pa = selection_probabilities(1, v, a, eligible);
    const auto pb = selection_probabilities(1, v, b, eligible);
    for (int c = 0; c < 5; ++c) CHECK(pa[c] == pb[c]);
}

TEST_CASE("select_client: degenerate distribution and frequencies") {
    // counts [big, 1, big] under cold start concentrates on client 1
    {
        ClientStats stats(3);
        stats.count_table = {100000000, 1, 100000000};
        Rng rng(5);
        // not literally 0 probability, so check the overwhelming mode
        int hits = 0;
        for (int i = 0; i < 100; ++i) {
            ClientStats copy = stats;
            if (select_client(0, {1, 1}, copy, SelectorVariant::C, rng) == 1) ++hits;
        }
        CHECK(hits >= 99);
    }
    // variant R over 10 eligible: each frequency within 3 sigma of 0.1
    {
        ClientStats stats(10);
        Rng rng(6);
        const int draws = 100000;
        std::vector<int> freq(10, 0);
        for (int i = 0; i < draws; ++i) {
            ClientStats copy = stats;
            freq[select_client(0, {1}, copy, SelectorVariant::R, rng)] += 1;
        }
        const double sigma = std::sqrt(draws * 0.1 * 0.9);
        for (int c = 0; c < 10; ++c) {
            CHECK(std::fabs(freq[c] - draws * 0.1) < 3.0 * sigma);
        }
    }
    // variant CV, cold-start curiosity rewards [1, 1/3] -> probs [.75, .25]
    {
        ClientStats stats(2);
        stats.count_table = {1, 9};
        Rng rng(7);
        const int draws = 100000;
        int first = 0;
        for (int i = 0; i < draws; ++i) {
            ClientStats copy = stats;
            if (select_client(0, {1, 1}, copy, SelectorVariant::CV, rng) == 0) ++first;
        }
        const double sigma = std::sqrt(draws * 0.75 * 0.25);
        CHECK(std::fabs(first - draws * 0.75) < 3.0 * sigma);
    }
}

TEST_CASE("record_completion: running mean and busy bookkeeping") {
    ClientStats stats(2);
    stats.mark_busy(0);
    record_completion(0, 100.0, stats);
    CHECK(stats.time_table[0] == doctest::Approx(100.0));
    CHECK(stats.count_table[0] == 1);
    CHECK_FALSE(stats.busy[0]);

    stats.mark_busy(0);
    record_completion(0, 200.0, stats);
    CHECK(stats.time_table[0] == doctest::Approx(150.0));

    ClientStats s2(1);
    for (double t : {50.0, 150.0, 250.0}) {
        s2.mark_busy(0);
        record_completion(0, t, s2);
    }
    CHECK(s2.time_table[0] == doctest::Approx(150.0));

    CHECK_THROWS_AS(record_completion(1, 1.0, stats), std::logic_error);
}

TEST_CASE("time_table equals brute-force mean over random sequences") {
    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 3;
        ClientStats stats(n);
        std::vector<std::vector<double>> seen(n);
        const int steps = 200;
        for (int s = 0; s < steps; ++s) {
            const int c = static_cast<int>(next_uniform(rng) * n) % n;
            const double t = next_uniform(rng) * 1000.0;
            stats.mark_busy(c);
            record_completion(c, t, stats);
            seen[c].push_back(t);
        }
        for (int c = 0; c < n; ++c) {
            CHECK(stats.count_table[c] == static_cast<long>(seen[c].size()));
            if (seen[c].empty()) continue;
            double mean = 0.0;
            for (double t : seen[c]) mean += t;
            mean /= seen[c].size();
            CHECK(stats.time_table[c] == doctest::Approx(mean).epsilon(1e-9));
        }
    }
}
