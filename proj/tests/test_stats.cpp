#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "loadcast/crossval.hpp"
#include "loadcast/error.hpp"
#include "loadcast/fixtures.hpp"
#include "loadcast/metrics.hpp"
#include "loadcast/paper_check.hpp"
#include "loadcast/stats.hpp"
#include "support.hpp"

using namespace loadcast;
using namespace loadcast::evalstat;

namespace {

const WinLoss& find(const std::vector<WinLoss>& rows, const std::string& model) {
    for (const auto& r : rows) {
        if (r.model == model) return r;
    }
    FAIL("no win/loss row for " << model);
    throw std::logic_error("unreachable");
}

/// P(W <= observed) by walking all 2^n sign assignments of the given ranks.
double brute_force_p(const std::vector<double>& ranks, double observed) {
    const std::size_t n = ranks.size();
    std::size_t hits = 0;
    const std::size_t total = std::size_t{1} << n;
    for (std::size_t mask = 0; mask < total; ++mask) {
        double w = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (std::size_t{1} << i)) w += ranks[i];
        }
        if (w <= observed + 1e-9) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

ComparisonMatrix two_column(const std::vector<double>& a, const std::vector<double>& b) {
    ComparisonMatrix m;
    m.models = {"A", "B"};
    for (std::size_t i = 0; i < a.size(); ++i) {
        m.rows.push_back(std::to_string(i + 1));
        m.cells.push_back({a[i], b[i]});
    }
    return m;
}

}  // namespace

TEST_CASE("percentage and absolute errors") {
    const std::vector<double> y{100, 200}, f{110, 180};
    CHECK(mape(y, f) == Catch::Approx(10.0).epsilon(1e-14));
    CHECK(mae(y, f) == Catch::Approx(15.0).epsilon(1e-14));
    CHECK(mape(std::vector<double>{50}, std::vector<double>{75}) == Catch::Approx(50.0));
    CHECK(mae(std::vector<double>{0}, std::vector<double>{-3}) == 3.0);
    CHECK(mape(y, y) == 0.0);
    CHECK(mae(y, y) == 0.0);
    CHECK_THROWS_AS(mape(std::vector<double>{0, 1}, std::vector<double>{1, 1}), ValidationError);
    CHECK_THROWS_AS(mae(std::vector<double>{1}, std::vector<double>{1, 2}), ValidationError);
    CHECK_THROWS_AS(mae(std::vector<double>{}, std::vector<double>{}), ValidationError);
}

TEST_CASE("absolute error is translation invariant") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> z(0.0, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> y(12), f(12), ys(12), fs(12);
        const double c = z(rng);
        for (std::size_t i = 0; i < 12; ++i) {
            y[i] = z(rng), f[i] = z(rng);
            ys[i] = y[i] + c, fs[i] = f[i] + c;
        }
        CHECK(mae(ys, fs) == Catch::Approx(mae(y, f)).epsilon(1e-12));
    }
}

TEST_CASE("fixture cells") {
    const auto& one = table_one().matrix;
    const auto& two = table_two().matrix;
    CHECK(one.rows.size() == 12);
    CHECK(one.models.size() == 10);
    CHECK(one.cells[1][one.model_index("XASXG")] == 0.01);
    CHECK(two.cells[11][two.model_index("XASXG")] == 17.21);
    CHECK(one.cells[2][one.model_index("XGBOOST")] == 32.80);
}

TEST_CASE("win/loss counts") {
    const auto& one = table_one().matrix;
    const auto wl = win_loss(one, "XASXG");
    CHECK(wl.size() == 9);
    CHECK(find(wl, "SVR").wins == 9);
    CHECK(find(wl, "SVR").losses == 3);
    CHECK(find(wl, "XGBOOST").wins == 9);
    CHECK(find(wl, "XGBOOST").losses == 3);
    for (const auto& r : wl) CHECK(r.wins + r.losses == 12);

    const std::vector<double> same{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    const auto tie = win_loss(two_column(same, same), "A");
    CHECK(tie.front().wins == 12);
    CHECK(tie.front().losses == 0);
    CHECK_THROWS_AS(win_loss(one, "NOPE"), ValidationError);
}

TEST_CASE("Friedman ranks on the first fixture") {
    const auto& one = table_one().matrix;
    const auto r = friedman_ranks(one);
    const std::vector<double> expected{4.0, 58.0 / 12, 73.0 / 12, 6.0, 86.0 / 12, 92.0 / 12, 87.0 / 12, 5.0, 5.0, 2.0};
    REQUIRE(r.average_ranks.size() == expected.size());
    for (std::size_t j = 0; j < expected.size(); ++j) CHECK(r.average_ranks[j] == Catch::Approx(expected[j]).epsilon(1e-12));
    CHECK(r.chi_square == Catch::Approx(34.78181818181815).epsilon(1e-12));
    CHECK(r.p_value == Catch::Approx(6.510032743842817e-05).epsilon(1e-9));
    CHECK(r.degrees_of_freedom == 9);
}

TEST_CASE("Friedman statistic on the second fixture") {
    const auto r = friedman_ranks(table_two().matrix);
    CHECK(r.chi_square == Catch::Approx(20.187468418393077).epsilon(1e-12));
    CHECK(r.p_value == Catch::Approx(0.016790065102114927).epsilon(1e-9));
}

TEST_CASE("Friedman mean rank is (k+1)/2") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Eigen::MatrixXd X = testing_support::random_matrix(8, 3 + static_cast<Eigen::Index>(seed % 5), seed);
        ComparisonMatrix m;
        for (Eigen::Index j = 0; j < X.cols(); ++j) m.models.push_back("m" + std::to_string(j));
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            m.rows.push_back(std::to_string(i));
            std::vector<double> row;
            // Rounding manufactures ties.
            for (Eigen::Index j = 0; j < X.cols(); ++j) row.push_back(std::round(std::abs(X(i, j)) * 2.0));
            m.cells.push_back(row);
        }
        const auto r = friedman_ranks(m);
        const double k = static_cast<double>(m.models.size());
        const double mean = std::accumulate(r.average_ranks.begin(), r.average_ranks.end(), 0.0) / k;
        CHECK(mean == Catch::Approx((k + 1.0) / 2.0).epsilon(1e-14));
        CHECK(r.p_value >= 0.0);
        CHECK(r.p_value <= 1.0);
    }
}

TEST_CASE("Friedman on two rows of two models") {
    const auto r = friedman_ranks(two_column({1, 1}, {2, 2}));
    CHECK(r.average_ranks == std::vector<double>{1.0, 2.0});
}

TEST_CASE("mid-ranks") {
    CHECK(midranks(std::vector<double>{3, 1, 2}) == std::vector<double>{3, 1, 2});
    CHECK(midranks(std::vector<double>{5, 5, 1, 5}) == std::vector<double>{3, 3, 1, 3});
}

TEST_CASE("Wilcoxon examples") {
    const auto& one = table_one().matrix;
    const auto ref = one.column(one.model_index("XASXG"));
    const auto svr = one.column(one.model_index("SVR"));
    const auto r = wilcoxon_signed_rank(ref, svr);
    CHECK(r.statistic == 6.0);
    CHECK(r.n == 12);
    CHECK(r.exact);
    CHECK(r.p_value == Catch::Approx(14.0 / 4096.0).epsilon(1e-12));

    const auto small = wilcoxon_signed_rank(std::vector<double>{1, 2, 3}, std::vector<double>{2, 3, 4});
    CHECK(small.statistic == 0.0);
    CHECK(small.p_value == Catch::Approx(0.125).epsilon(1e-14));

    CHECK_THROWS_AS(wilcoxon_signed_rank(ref, ref), NumericError);
    CHECK_THROWS_AS(wilcoxon_signed_rank(std::vector<double>{1}, std::vector<double>{1, 2}), ValidationError);
}

TEST_CASE("zero differences are dropped") {
    const auto r = wilcoxon_signed_rank(std::vector<double>{1, 2, 3, 5}, std::vector<double>{2, 3, 4, 5});
    CHECK(r.n == 3);
    CHECK(r.p_value == Catch::Approx(0.125));
}

TEST_CASE("exact Wilcoxon p matches sign enumeration") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 4 + static_cast<std::size_t>(trial % 13);
        std::vector<double> a(n), b(n), diffs(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = z(rng) - 0.3;
            b[i] = z(rng);
            if (trial % 3 == 0) {
                // Quarter-unit grid: differences are exact in binary, so ties are real ties.
                b[i] = std::round(b[i] * 4.0) / 4.0;
                a[i] = b[i] + std::round((a[i] - b[i]) * 2.0) / 2.0;
            }
        }
        std::vector<double> abs_d, a_kept, b_kept;
        for (std::size_t i = 0; i < n; ++i) {
            if (a[i] == b[i]) continue;
            abs_d.push_back(std::abs(a[i] - b[i]));
            a_kept.push_back(a[i]);
            b_kept.push_back(b[i]);
        }
        if (abs_d.empty()) continue;
        const auto ranks = midranks(abs_d);
        double w = 0.0;
        for (std::size_t i = 0; i < ranks.size(); ++i) {
            if (a_kept[i] > b_kept[i]) w += ranks[i];
        }
        const auto r = wilcoxon_signed_rank(a, b, Sided::OneLess, WilcoxonMethod::Exact);
        CHECK(r.statistic == Catch::Approx(w));
        CHECK(r.p_value == Catch::Approx(brute_force_p(ranks, w)).epsilon(1e-12));
        const double w_other = std::accumulate(ranks.begin(), ranks.end(), 0.0) - w;
        const auto two = wilcoxon_signed_rank(a, b, Sided::Two, WilcoxonMethod::Exact);
        CHECK(two.statistic == Catch::Approx(std::min(w, w_other)));
        CHECK(two.p_value == Catch::Approx(std::min(1.0, 2.0 * brute_force_p(ranks, std::min(w, w_other)))).epsilon(1e-12));
    }
}

TEST_CASE("normal approximation agrees with the exact tail at n = 20") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> a(20), b(20);
        for (std::size_t i = 0; i < 20; ++i) {
            a[i] = z(rng) - 0.2 * trial / 5.0;
            b[i] = z(rng);
        }
        const auto exact = wilcoxon_signed_rank(a, b, Sided::OneLess, WilcoxonMethod::Exact);
        const auto normal = wilcoxon_signed_rank(a, b, Sided::OneLess, WilcoxonMethod::Normal);
        CHECK_FALSE(normal.exact);
        CHECK(std::abs(exact.p_value - normal.p_value) <= 0.01);
    }
}

TEST_CASE("k-fold partitions") {
    const auto singletons = kfold(10, 10, 1);
    CHECK(singletons.size() == 10);
    for (const auto& f : singletons) CHECK(f.size() == 1);

    const auto uneven = kfold(12, 10, 1);
    std::multiset<std::size_t> sizes;
    std::set<std::size_t> seen;
    for (const auto& f : uneven) {
        sizes.insert(f.size());
        seen.insert(f.begin(), f.end());
    }
    CHECK(sizes.count(2) == 2);
    CHECK(sizes.count(1) == 8);
    CHECK(seen.size() == 12);

    CHECK(kfold(30, 7, 3) == kfold(30, 7, 3));
    CHECK(kfold(30, 7, 3) != kfold(30, 7, 4));
    CHECK_THROWS_AS(kfold(5, 6, 1), ValidationError);
    CHECK_THROWS_AS(kfold(5, 1, 1), ValidationError);
}

TEST_CASE("cross-validated RMSE") {
    const auto fit_mean = [](const Eigen::MatrixXd&, const Eigen::VectorXd& y) { return y.mean(); };
    const auto predict_const = [](double c, const Eigen::MatrixXd& X) {
        return Eigen::VectorXd::Constant(X.rows(), c).eval();
    };
    const Eigen::MatrixXd X = Eigen::MatrixXd::Zero(40, 1);

    const Eigen::VectorXd flat = Eigen::VectorXd::Constant(40, 3.0);
    CHECK(cross_val_rmse(X, flat, 5, 1, fit_mean, predict_const) == 0.0);

    Eigen::VectorXd pm(40);
    for (Eigen::Index i = 0; i < 40; ++i) pm(i) = i % 2 == 0 ? 1.0 : -1.0;
    CHECK(cross_val_rmse(X, pm, 10, 2, fit_mean, predict_const) == Catch::Approx(1.0).margin(0.05));

    // k = 2 by hand.
    const Eigen::VectorXd y = testing_support::random_matrix(9, 1, 6).col(0);
    const auto folds = kfold(9, 2, 8);
    double manual = 0.0;
    for (std::size_t f = 0; f < 2; ++f) {
        const Eigen::VectorXd train = take_rows(y, folds[1 - f]);
        const Eigen::VectorXd test = take_rows(y, folds[f]);
        manual += std::sqrt((test.array() - train.mean()).square().mean());
    }
    CHECK(cross_val_rmse(Eigen::MatrixXd::Zero(9, 1), y, 2, 8, fit_mean, predict_const) ==
          Catch::Approx(manual / 2.0).epsilon(1e-14));
}

TEST_CASE("multi-trial summaries") {
    const auto constant = multi_trial([](std::uint64_t) { return TrialMetrics{2.5, 7.0}; }, 30, 1);
    CHECK(constant.trials == 30);
    CHECK(constant.mean_mape == 2.5);
    CHECK(constant.std_mape == 0.0);
    CHECK(constant.std_mae == 0.0);

    const auto once = multi_trial([](std::uint64_t s) { return TrialMetrics{static_cast<double>(s), 1.0}; }, 1, 9);
    CHECK(once.mean_mape == 9.0);
    CHECK(once.std_mape == 0.0);

    const auto idx = multi_trial([](std::uint64_t s) { return TrialMetrics{static_cast<double>(s), 0.0}; }, 10, 100);
    CHECK(idx.mean_mape == Catch::Approx(100.0 + 4.5));
    CHECK(idx.values.size() == 10);

    const auto failing = [](std::uint64_t s) -> TrialMetrics {
        if (s == 5) throw NumericError("boom");
        return {};
    };
    try {
        multi_trial(failing, 10, 1);
        FAIL("expected a trial error");
    } catch (const TrialError& e) {
        CHECK(e.seed() == 5);
        CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("boom"));
    }
    CHECK_THROWS_AS(multi_trial(failing, 0, 1), ValidationError);
}

TEST_CASE("matrix parsing") {
    const auto m = parse_matrix("month,A,B\n1,1.5%,2\n2,3,4.25%\n");
    CHECK(m.models == std::vector<std::string>{"A", "B"});
    CHECK(m.cells[0][0] == 1.5);
    CHECK(m.cells[1][1] == 4.25);
    CHECK(parse_matrix(serialize_matrix(m)).cells == m.cells);
    CHECK_THROWS(parse_matrix("month,A\n1,x\n"));
    CHECK_THROWS(parse_matrix("month,A,B\n1,2\n"));
}

TEST_CASE("stat report refuses Friedman on one row") {
    const auto m = parse_matrix("month,A,B\n1,1,2\n");
    const auto r = stat_report(m, "A");
    CHECK_FALSE(r.friedman.has_value());
    CHECK_FALSE(r.friedman_note.empty());
}

TEST_CASE("fixture check") {
    const auto result = paper_check();
    CHECK(result.ok());
    CHECK(result.count(CheckStatus::Fail) == 0);

    auto broken = table_one();
    const auto x = broken.matrix.model_index("XASXG");
    for (auto& row : broken.matrix.cells) row[x] += 50.0;
    CHECK_FALSE(paper_check(broken, table_two()).ok());
}
