#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "loadcast/arima.hpp"
#include "loadcast/error.hpp"
#include "loadcast/nelder_mead.hpp"

using namespace loadcast;
using namespace loadcast::arima;

namespace {

std::vector<double> simulate_arma(std::span<const double> phi, std::span<const double> theta, std::size_t n,
                                  std::uint64_t seed, double sd = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, sd);
    const std::size_t burn = 200;
    std::vector<double> w(n + burn, 0.0), e(n + burn, 0.0);
    for (std::size_t t = 0; t < w.size(); ++t) {
        e[t] = z(rng);
        double v = e[t];
        for (std::size_t i = 0; i < phi.size() && i < t; ++i) v += phi[i] * w[t - 1 - i];
        for (std::size_t j = 0; j < theta.size() && j < t; ++j) v += theta[j] * e[t - 1 - j];
        w[t] = v;
    }
    return {w.begin() + static_cast<long>(burn), w.end()};
}

ArimaModel manual(ArimaSpec spec, std::vector<double> ar, std::vector<double> ma, double c, std::vector<double> history) {
    ArimaModel m;
    m.spec = spec;
    m.ar = std::move(ar);
    m.ma = std::move(ma);
    m.intercept = c;
    m.history = history;
    m.differenced = difference(history, spec.d);
    m.residuals = css_residuals(m.ar, m.ma, c, m.differenced);
    return m;
}

}  // namespace

TEST_CASE("differencing") {
    CHECK(difference(std::vector<double>{1, 2, 4}, 1) == std::vector<double>{1, 2});
    CHECK(difference(std::vector<double>{0, 1, 4, 9, 16, 25}, 2) == std::vector<double>{2, 2, 2, 2});
    CHECK(difference(std::vector<double>{3, 1, 4}, 0) == std::vector<double>{3, 1, 4});
    CHECK_THROWS_AS(difference(std::vector<double>{1, 2}, 2), ValidationError);
}

TEST_CASE("undifferencing") {
    CHECK(undifference(std::vector<double>{}, 0, std::vector<double>{5, 6}) == std::vector<double>{5, 6});
    const auto lin = undifference(std::vector<double>{10, 13}, 2, std::vector<double>{0, 0, 0});
    REQUIRE(lin.size() == 3);
    CHECK(lin[0] == Catch::Approx(16));
    CHECK(lin[1] == Catch::Approx(19));
    CHECK(lin[2] == Catch::Approx(22));
    CHECK_THROWS_AS(undifference(std::vector<double>{1}, 2, std::vector<double>{0}), ValidationError);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> z(50.0, 20.0);
    std::vector<double> y(40);
    for (auto& v : y) v = z(rng);
    for (int d = 0; d <= 2; ++d) {
        const std::size_t h = 7;
        const auto w = difference(y, d);
        const std::span<const double> head(y.data(), y.size() - h);
        const std::span<const double> w_tail(w.data() + w.size() - h, h);
        const auto back = undifference(head, d, w_tail);
        for (std::size_t i = 0; i < h; ++i) {
            CHECK(back[i] == Catch::Approx(y[y.size() - h + i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("conditional sum of squares") {
    const std::vector<double> w{1, 2, 3};
    const std::vector<double> none;
    const std::vector<double> half{0.5};
    SECTION("zero parameters sum the squares past the burn-in") {
        CHECK(css_loss(none, none, 0.0, w) == Catch::Approx(14.0));
        CHECK(css_loss(std::vector<double>{0.0}, none, 0.0, w) == Catch::Approx(13.0));
    }
    SECTION("hand recursion") {
        const auto e = css_residuals(half, none, 0.0, w);
        CHECK(e[1] == Catch::Approx(1.5));
        CHECK(e[2] == Catch::Approx(2.0));
        CHECK(css_loss(half, none, 0.0, w) == Catch::Approx(6.25));
    }
    SECTION("exact AR(1) path has zero loss") {
        std::vector<double> path{8.0};
        for (int i = 0; i < 20; ++i) path.push_back(0.5 * path.back());
        CHECK(css_loss(half, none, 0.0, path) == 0.0);
    }
    SECTION("noiseless ARMA(2,1) has zero loss at its parameters") {
        const std::vector<double> phi{0.6, -0.2}, theta{0.4};
        std::vector<double> wv(60, 0.0), e(60, 0.0);
        e[0] = 1.0;
        for (std::size_t t = 0; t < wv.size(); ++t) {
            double v = e[t];
            for (std::size_t i = 0; i < 2 && i < t; ++i) v += phi[i] * wv[t - 1 - i];
            if (t > 0) v += theta[0] * e[t - 1];
            wv[t] = v;
        }
        CHECK(std::abs(css_loss(phi, theta, 0.0, wv)) <= 1e-12);
    }
}

TEST_CASE("root checks") {
    CHECK(roots_outside_unit_circle(std::vector<double>{0.5, -0.3}, -1.0));
    CHECK_FALSE(roots_outside_unit_circle(std::vector<double>{1.0}, -1.0));
    CHECK_FALSE(roots_outside_unit_circle(std::vector<double>{1.2, -0.1}, -1.0));
    CHECK(roots_outside_unit_circle(std::vector<double>{0.9}, 1.0));
    CHECK_FALSE(roots_outside_unit_circle(std::vector<double>{-1.0}, 1.0));
    CHECK(roots_outside_unit_circle(std::vector<double>{}, 1.0));
}

TEST_CASE("fit recovers AR(2) coefficients") {
    const std::vector<double> phi{0.5, -0.3};
    int good = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto y = simulate_arma(phi, {}, 500, seed);
        const auto m = fit(y, ArimaSpec{2, 0, 0});
        if (std::abs(m.ar[0] - 0.5) <= 0.1 && std::abs(m.ar[1] + 0.3) <= 0.1) ++good;
        CHECK(m.residuals.size() == y.size());
        CHECK(m.sigma2 == Catch::Approx(1.0).margin(0.2));
    }
    CHECK(good >= 9);
}

TEST_CASE("fit on white noise keeps coefficients small", "[redundant]") {
    int small = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto y = simulate_arma({}, {}, 500, 1000 + seed);
        const auto m = fit(y, ArimaSpec{2, 0, 1});
        const bool ok = std::abs(m.ar[0]) <= 0.15 && std::abs(m.ar[1]) <= 0.15 && std::abs(m.ma[0]) <= 0.15;
        if (ok) ++small;
    }
    CHECK(small >= 27);
}

TEST_CASE("fit on a constant series with d = 2") {
    const std::vector<double> y(30, 12.5);
    const auto m = fit(y, ArimaSpec{2, 2, 1});
    CHECK(m.ar == std::vector<double>{0.0, 0.0});
    CHECK(m.ma == std::vector<double>{0.0});
    CHECK(m.sigma2 == 0.0);
    for (double f : forecast(m, 5)) CHECK(f == Catch::Approx(12.5));
}

TEST_CASE("fit is deterministic and validates input") {
    const auto y = simulate_arma(std::vector<double>{0.3}, std::vector<double>{0.2}, 200, 5);
    const auto a = fit(y, ArimaSpec{1, 0, 1});
    const auto b = fit(y, ArimaSpec{1, 0, 1});
    CHECK(a.ar == b.ar);
    CHECK(a.ma == b.ma);
    CHECK(a.intercept == b.intercept);
    CHECK(roots_outside_unit_circle(a.ar, -1.0));
    CHECK(roots_outside_unit_circle(a.ma, 1.0));

    CHECK_THROWS_AS(fit(std::vector<double>{1, 2, 3, 4, 5}, ArimaSpec{2, 2, 1}), ValidationError);
    CHECK_THROWS_AS(fit(y, ArimaSpec{-1, 0, 0}), ValidationError);
}

TEST_CASE("forecast closed forms") {
    SECTION("random walk stays flat") {
        const auto m = manual({0, 1, 0}, {}, {}, 0.0, {40, 41, 42});
        for (double f : forecast(m, 4)) CHECK(f == 42.0);
    }
    SECTION("double integration continues a line") {
        const auto m = manual({0, 2, 0}, {}, {}, 0.0, {4, 7, 10, 13});
        const auto f = forecast(m, 3);
        CHECK(f == std::vector<double>{16, 19, 22});
    }
    SECTION("AR(1) decays geometrically") {
        const auto m = manual({1, 0, 0}, {0.5}, {}, 0.0, {3, 1, 8});
        const auto f = forecast(m, 3);
        CHECK(f[0] == Catch::Approx(4));
        CHECK(f[1] == Catch::Approx(2));
        CHECK(f[2] == Catch::Approx(1));
    }
    SECTION("stationary forecasts converge to the process mean") {
        const auto y = simulate_arma(std::vector<double>{0.6, -0.2}, std::vector<double>{0.3}, 400, 11);
        std::vector<double> shifted(y);
        for (double& v : shifted) v += 6.0;
        const auto m = fit(shifted, ArimaSpec{2, 0, 1});
        const double mean = m.intercept / (1.0 - m.ar[0] - m.ar[1]);
        CHECK(forecast(m, 200).back() == Catch::Approx(mean).margin(1e-3));
        CHECK(mean == Catch::Approx(6.0).margin(0.5));
    }
    CHECK_THROWS_AS(forecast(manual({0, 1, 0}, {}, {}, 0.0, {1, 2}), 0), ValidationError);
}

TEST_CASE("noiseless quadratic continues exactly under (0,2,0)", "[drift]") {
    // Its second difference is a nonzero constant; with no intercept for d >= 1 the
    // forecast can only continue a line.
    std::vector<double> y;
    for (int t = 0; t < 30; ++t) y.push_back(5.0 + 2.0 * t + 0.5 * t * t);
    const auto m = fit(y, ArimaSpec{0, 2, 0});
    const auto f = forecast(m, 6);
    for (int k = 0; k < 6; ++k) {
        const double t = 30.0 + k;
        const double truth = 5.0 + 2.0 * t + 0.5 * t * t;
        CHECK(std::abs(f[static_cast<std::size_t>(k)] - truth) <= 1e-6 * truth);
    }
}

TEST_CASE("a fitted (0,2,0) continues a noiseless line exactly") {
    std::vector<double> y;
    for (int t = 0; t < 30; ++t) y.push_back(7.0 + 2.5 * t);
    const auto f = forecast(fit(y, ArimaSpec{0, 2, 0}), 6);
    for (int k = 0; k < 6; ++k) CHECK(f[static_cast<std::size_t>(k)] == Catch::Approx(7.0 + 2.5 * (30 + k)).epsilon(1e-12));
}

TEST_CASE("fitted values are one-step predictions on the original scale") {
    const auto m = manual({0, 1, 0}, {}, {}, 0.0, {5, 7, 6, 9});
    const auto fitted = m.fitted();
    CHECK(fitted == std::vector<double>{5, 5, 7, 6});
}

TEST_CASE("simplex minimizes the Rosenbrock valley") {
    const auto rosen = [](std::span<const double> x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    optim::NelderMeadOptions opt;
    opt.max_iterations = 5000;
    const auto r = optim::nelder_mead(rosen, {-1.2, 1.0}, opt);
    CHECK(r.converged);
    CHECK(r.x[0] == Catch::Approx(1.0).margin(1e-5));
    CHECK(r.x[1] == Catch::Approx(1.0).margin(1e-5));
}

TEST_CASE("simplex steps around infeasible regions") {
    const auto f = [](std::span<const double> x) {
        if (x[0] < 0.2) return std::numeric_limits<double>::infinity();
        return (x[0] - 0.1) * (x[0] - 0.1);
    };
    const auto r = optim::nelder_mead(f, {1.0});
    CHECK(r.x[0] >= 0.2);
    CHECK(r.x[0] == Catch::Approx(0.2).margin(1e-6));
}
