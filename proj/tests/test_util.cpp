#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "latwave/util.hpp"

using namespace latwave;

TEST_CASE("wrap maps into [0, p)") {
    CHECK(wrap(-0.3, 1.0) == doctest::Approx(0.7));
    CHECK(wrap(2.5, 1.0) == doctest::Approx(0.5));
    CHECK(wrap(0.0, 2.0) == 0.0);
    CHECK(wrap(-4.0, 2.0) == 0.0);
}

TEST_CASE("wrap_index euclidean modulo") {
    CHECK(wrap_index(-3, 2) == 1);
    CHECK(wrap_index(-4, 2) == 0);
    CHECK(wrap_index(5, 3) == 2);
    CHECK(wrap_index(0, 7) == 0);
}

TEST_CASE("sup_diff and sup_abs") {
    std::vector<double> a{1.0, -2.0, 3.0};
    std::vector<double> b{1.5, -2.0, 2.0};
    CHECK(sup_diff(a, b) == doctest::Approx(1.0));
    CHECK(sup_abs(a) == doctest::Approx(3.0));
    CHECK(sup_diff(a, a) == 0.0);
}

TEST_CASE("lerp_grid reproduces linear data exactly and clamps ends") {
    // samples of g(x) = 3x - 1 on x = 0, 0.5, 1.0, 1.5
    std::vector<double> v{-1.0, 0.5, 2.0, 3.5};
    CHECK(lerp_grid(v, 0.0, 0.5, 0.75) == doctest::Approx(3.0 * 0.75 - 1.0));
    CHECK(lerp_grid(v, 0.0, 0.5, 0.5) == doctest::Approx(0.5));
    CHECK(lerp_grid(v, 0.0, 0.5, -2.0) == doctest::Approx(-1.0));  // clamp left
    CHECK(lerp_grid(v, 0.0, 0.5, 9.0) == doctest::Approx(3.5));    // clamp right
    CHECK_THROWS_AS(lerp_grid(std::vector<double>{}, 0.0, 1.0, 0.0), DomainError);
}

TEST_CASE("cumtrapz is exact on linear integrands") {
    // g(t) = 2t + 1 on [0, 1]: integral t^2 + t
    const int n = 10;
    std::vector<double> g(n + 1);
    double dx = 1.0 / n;
    for (int i = 0; i <= n; ++i) g[i] = 2.0 * (dx * i) + 1.0;
    auto I = cumtrapz(g, dx);
    CHECK(I.front() == 0.0);
    for (int i = 0; i <= n; ++i) {
        double t = dx * i;
        CHECK(I[i] == doctest::Approx(t * t + t).epsilon(1e-14));
    }
}

TEST_CASE("window_average_stats on a constant is the constant") {
    auto s = window_average_stats([](double) { return 2.5; }, 0.0, 10.0, 2.0, 0.01);
    CHECK(s.min_avg == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(s.max_avg == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("window_average_stats brackets a step function") {
    // g = 1 on [0,1), 3 on [1,2]; windows of length >= 0.5
    auto g = [](double t) { return t < 1.0 ? 1.0 : 3.0; };
    auto s = window_average_stats(g, 0.0, 2.0, 0.5, 0.002);
    CHECK(s.min_avg == doctest::Approx(1.0).epsilon(0.01));
    CHECK(s.max_avg == doctest::Approx(3.0).epsilon(0.01));
    // all window averages live inside the range of g
    CHECK(s.min_avg >= 1.0 - 1e-9);
    CHECK(s.max_avg <= 3.0 + 1e-9);
}

TEST_CASE("window_average_stats oracle: sinusoid about a mean") {
    // g(t) = 1 + 0.5 sin(2 pi t): a window [s, s+l] has average
    // 1 + (0.5/(2 pi l))(cos(2 pi s) - cos(2 pi (s+l))); the extreme over all
    // windows of length >= l0 is 1 -+ (1/(2 pi l0)) at cos difference +-2.
    auto g = [](double t) { return 1.0 + 0.5 * std::sin(2.0 * M_PI * t); };
    double l0 = 2.5;
    auto s = window_average_stats(g, 0.0, 40.0, l0, 0.001, 8000);
    double bound = 1.0 / (2.0 * M_PI * l0) * 0.5 * 2.0;
    CHECK(s.min_avg == doctest::Approx(1.0 - bound).epsilon(5e-3));
    CHECK(s.max_avg == doctest::Approx(1.0 + bound).epsilon(5e-3));
}

TEST_CASE("window_average_stats rejects short horizons and bad samples") {
    CHECK_THROWS_AS(window_average_stats([](double) { return 1.0; }, 0.0, 1.0, 2.0, 0.01),
                    InsufficientGridError);
    CHECK_THROWS_AS(window_average_stats([](double t) { return t > 0.5 ? 1.0 / 0.0 : 1.0; },
                                         0.0, 2.0, 0.5, 0.01),
                    MalformedFieldError);
}
