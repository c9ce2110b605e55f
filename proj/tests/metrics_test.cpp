#include <doctest.h>

#include <cmath>
#include <random>

#include "icp/metrics.hpp"

using namespace icp;

namespace {

PredictionSet set_of(std::vector<int> labels) { return PredictionSet{std::move(labels), 0.1}; }

BatchOutcome batch(std::vector<std::vector<int>> sets, std::vector<int> truths, int n_classes) {
    BatchOutcome b;
    for (auto& s : sets) b.sets.push_back(set_of(std::move(s)));
    b.truths = std::move(truths);
    b.n_classes = n_classes;
    return b;
}

} // namespace

TEST_CASE("one_c counts singletons") {
    CHECK(one_c(batch({{0}, {0, 1}, {}}, {0, 0, 1}, 2)) == doctest::Approx(1.0 / 3));
    CHECK(one_c(batch({{0}, {1}, {0}}, {0, 1, 0}, 2)) == doctest::Approx(1.0));
    CHECK(one_c(batch({{}, {}, {}}, {0, 1, 0}, 2)) == doctest::Approx(0.0));
}

TEST_CASE("avg_c averages set sizes") {
    CHECK(avg_c(batch({{0}, {0, 1}, {}}, {0, 0, 1}, 2)) == doctest::Approx(1.0));
    CHECK(avg_c(batch({{0, 1, 2, 3}, {0, 1, 2, 3}}, {0, 1}, 4)) == doctest::Approx(4.0));
    CHECK(avg_c(batch({{0}, {1}}, {0, 1}, 2)) == doctest::Approx(1.0));
}

TEST_CASE("empirical_error counts missing truths") {
    CHECK(empirical_error(batch({{0}, {1}, {0, 1}}, {0, 0, 1}, 2)) == doctest::Approx(1.0 / 3));
    CHECK(empirical_error(batch({{0, 1}, {0, 1}}, {0, 1}, 2)) == doctest::Approx(0.0));
    CHECK(empirical_error(batch({{}, {}}, {0, 1}, 2)) == doctest::Approx(1.0));
}

TEST_CASE("effective_one_c looks only at singletons") {
    auto v = effective_one_c(batch({{0}, {1}, {0, 2}}, {0, 2, 0}, 3));
    REQUIRE(v.has_value());
    CHECK(*v == doctest::Approx(0.5));

    CHECK_FALSE(effective_one_c(batch({{0, 1}, {}}, {0, 1}, 2)).has_value());

    auto all = effective_one_c(batch({{0}, {1}}, {0, 1}, 2));
    REQUIRE(all.has_value());
    CHECK(*all == doctest::Approx(1.0));
}

TEST_CASE("effective_one_c ignores relabeling of non-singletons") {
    auto a = effective_one_c(batch({{0}, {1, 2}, {0, 1, 2}}, {0, 1, 2}, 3));
    auto b = effective_one_c(batch({{0}, {0, 1}, {}}, {0, 1, 2}, 3));
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(*a == *b);
}

TEST_CASE("pearson_correlation examples and edge cases") {
    std::vector<double> xs = {1, 2, 3};
    std::vector<double> ys = {2, 4, 7};
    auto r = pearson_correlation(xs, ys);
    REQUIRE(r.has_value());
    CHECK(*r == doctest::Approx(0.9934).epsilon(1e-3));

    // direct covariance oracle
    double mx = 2, my = 13.0 / 3;
    double cov = 0, vx = 0, vy = 0;
    for (int i = 0; i < 3; ++i) {
        cov += (xs[i] - mx) * (ys[i] - my);
        vx += (xs[i] - mx) * (xs[i] - mx);
        vy += (ys[i] - my) * (ys[i] - my);
    }
    CHECK(*r == doctest::Approx(cov / std::sqrt(vx * vy)).epsilon(1e-12));

    CHECK(*pearson_correlation(xs, xs) == doctest::Approx(1.0));
    std::vector<double> neg = {-1, -2, -3};
    CHECK(*pearson_correlation(xs, neg) == doctest::Approx(-1.0));

    std::vector<double> flat = {5, 5, 5};
    CHECK_FALSE(pearson_correlation(xs, flat).has_value());

    std::vector<double> one = {1};
    CHECK_THROWS_AS(pearson_correlation(one, one), std::invalid_argument);
    std::vector<double> two = {1, 2};
    CHECK_THROWS_AS(pearson_correlation(xs, two), std::invalid_argument);
}

TEST_CASE("pearson_correlation invariant under positive affine maps") {
    std::mt19937 rng(23);
    std::vector<double> xs, ys;
    for (int i = 0; i < 20; ++i) {
        xs.push_back((rng() % 1000) * 0.01);
        ys.push_back((rng() % 1000) * 0.01);
    }
    auto base = pearson_correlation(xs, ys);
    REQUIRE(base.has_value());
    std::vector<double> xs2 = xs, ys2 = ys;
    for (auto& v : xs2) v = 3.7 * v + 11.0;
    for (auto& v : ys2) v = 0.25 * v - 4.0;
    auto mapped = pearson_correlation(xs2, ys2);
    REQUIRE(mapped.has_value());
    CHECK(*mapped == doctest::Approx(*base).epsilon(1e-9));
}

TEST_CASE("error shrinks as sets grow (nesting consequence)") {
    std::mt19937 rng(31);
    for (int t = 0; t < 50; ++t) {
        int n = 20;
        int n_classes = 4;
        std::vector<std::vector<double>> p(n, std::vector<double>(n_classes));
        std::vector<int> truths(n);
        for (int i = 0; i < n; ++i) {
            for (int c = 0; c < n_classes; ++c) p[i][c] = (rng() % 100) * 0.01;
            truths[i] = static_cast<int>(rng() % n_classes);
        }
        double prev_err = -1;
        for (double eps : {0.2, 0.1, 0.05, 0.01}) { // decreasing -> bigger sets
            BatchOutcome b;
            b.n_classes = n_classes;
            b.truths = truths;
            for (int i = 0; i < n; ++i) {
                PredictionSet s;
                s.epsilon = eps;
                for (int c = 0; c < n_classes; ++c)
                    if (p[i][c] > eps) s.labels.push_back(c);
                b.sets.push_back(std::move(s));
            }
            double err = empirical_error(b);
            if (prev_err >= 0) CHECK(err <= prev_err);
            prev_err = err;
        }
    }
}

TEST_CASE("compute_metrics bundles the record") {
    MetricRecord rec = compute_metrics(batch({{0}, {1, 2}, {}, {2}}, {0, 1, 2, 1}, 3));
    CHECK(rec.one_c == doctest::Approx(0.5));
    CHECK(rec.avg_c == doctest::Approx(1.0));
    CHECK(rec.err == doctest::Approx(0.5));
    CHECK(rec.n_singletons == 2);
    REQUIRE(rec.e_one_c.has_value());
    CHECK(*rec.e_one_c == doctest::Approx(0.5));

    MetricRecord none = compute_metrics(batch({{0, 1}}, {0}, 2));
    CHECK_FALSE(none.e_one_c.has_value());
    CHECK(none.n_singletons == 0);
}

TEST_CASE("batch validation") {
    BatchOutcome bad;
    bad.n_classes = 2;
    CHECK_THROWS_AS(one_c(bad), std::invalid_argument);
    bad.sets.push_back(set_of({0}));
    CHECK_THROWS_AS(avg_c(bad), std::invalid_argument);
}
