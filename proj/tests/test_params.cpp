#include "doctest.h"

#include <stdexcept>

#include <algorithm>

#include "gitfl/params.hpp"
#include "gitfl/rng.hpp"

using namespace gitfl;

TEST_CASE("axpy_combine: worked examples") {
    // single-element identity
    {
        std::vector<double> w{1.0};
        std::vector<ParamVector> m{{3.5}};
        CHECK(axpy_combine(w, m) == ParamVector{3.5});
    }
    // scalar oracle (2*1 + 6*3) / 4 = 5
    {
        std::vector<double> w{1.0, 3.0};
        std::vector<ParamVector> m{{2.0}, {6.0}};
        CHECK(axpy_combine(w, m)[0] == doctest::Approx(5.0));
    }
    // symmetry
    {
        std::vector<double> w{2.0, 2.0};
        std::vector<ParamVector> m{{1.0, 0.0}, {0.0, 1.0}};
        const ParamVector out = axpy_combine(w, m);
        CHECK(out[0] == doctest::Approx(0.5));
        CHECK(out[1] == doctest::Approx(0.5));
    }
}

TEST_CASE("axpy_combine: error paths") {
    std::vector<double> w{1.0, 1.0};
    std::vector<ParamVector> one{{1.0}};
    CHECK_THROWS_AS(axpy_combine(w, one), std::invalid_argument);

    std::vector<double> zero{0.0, 0.0};
    std::vector<ParamVector> two{{1.0}, {2.0}};
    CHECK_THROWS_AS(axpy_combine(zero, two), std::invalid_argument);

    std::vector<ParamVector> bad{{1.0}, {2.0, 3.0}};
    CHECK_THROWS_AS(axpy_combine(w, bad), std::invalid_argument);

    CHECK_THROWS_AS(axpy_combine(std::vector<double>{}, std::vector<ParamVector>{}),
                    std::invalid_argument);
}

TEST_CASE("axpy_combine: convexity, scale and permutation invariance") {
    Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const int count = 1 + static_cast<int>(next_uniform(rng) * 6);
        const int dim = 1 + static_cast<int>(next_uniform(rng) * 8);
        std::vector<double> w(count);
        std::vector<ParamVector> m(count, ParamVector(dim));
        for (int i = 0; i < count; ++i) {
            w[i] = next_uniform(rng) + 1e-6;
            for (int j = 0; j < dim; ++j) m[i][j] = next_normal(rng);
        }
        const ParamVector out = axpy_combine(w, m);
        REQUIRE(all_finite(out));

        for (int j = 0; j < dim; ++j) {
            double lo = m[0][j], hi = m[0][j];
            for (int i = 1; i < count; ++i) {
                lo = std::min(lo, m[i][j]);
                hi = std::max(hi, m[i][j]);
            }
            CHECK(out[j] >= lo - 1e-12);
            CHECK(out[j] <= hi + 1e-12);
        }

        const double c = 1e-3 + next_uniform(rng) * 1e4;
        std::vector<double> scaled = w;
        for (double& x : scaled) x *= c;
        const ParamVector out2 = axpy_combine(scaled, m);
        for (int j = 0; j < dim; ++j) {
            CHECK(out2[j] == doctest::Approx(out[j]).epsilon(1e-12));
        }

        // rotate pairs together
        std::vector<double> wp(w.begin() + 1, w.end());
        wp.push_back(w[0]);
        std::vector<ParamVector> mp(m.begin() + 1, m.end());
        mp.push_back(m[0]);
        const ParamVector out3 = axpy_combine(wp, mp);
        for (int j = 0; j < dim; ++j) {
            CHECK(out3[j] == doctest::Approx(out[j]).epsilon(1e-12));
        }
    }
}

TEST_CASE("Repository::make holds exactly K identical branches") {
    const ParamVector init{1.0, 2.0};
    const Repository repo = Repository::make(4, init);
    REQUIRE(repo.size() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(repo.branches[i].branch_id == i);
        CHECK(repo.branches[i].params == init);
        CHECK(repo.branches[i].version == 0);
    }
}
