#include <catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

#include "loadcast/error.hpp"
#include "loadcast/kpca.hpp"
#include "support.hpp"

using namespace loadcast;
using namespace loadcast::featsel;

namespace {

/// Classical PCA scores from the covariance eigendecomposition, descending.
Eigen::MatrixXd pca_scores(const Eigen::MatrixXd& X) {
    const Eigen::MatrixXd Xc = X.rowwise() - X.colwise().mean();
    const Eigen::MatrixXd C = Xc.transpose() * Xc / static_cast<double>(X.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    return Xc * es.eigenvectors().rowwise().reverse();
}

void check_matches_pca(const Eigen::MatrixXd& X) {
    const auto m = kpca_fit(X, 1.0, 1.0, KpcaKernel::Linear);
    const Eigen::MatrixXd oracle = pca_scores(X);
    const Eigen::Index k = std::min<Eigen::Index>(static_cast<Eigen::Index>(m.retained), X.cols());
    REQUIRE(k == std::min(X.cols(), X.rows() - 1));
    for (Eigen::Index c = 0; c < k; ++c) {
        const double same = (m.projections.col(c) - oracle.col(c)).cwiseAbs().maxCoeff();
        const double flipped = (m.projections.col(c) + oracle.col(c)).cwiseAbs().maxCoeff();
        CHECK(std::min(same, flipped) <= 1e-8);
    }
}

}  // namespace

TEST_CASE("centered kernel rows sum to zero") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Eigen::MatrixXd X = testing_support::random_matrix(15, 4, seed);
        const Eigen::MatrixXd Kc = center_kernel(kernel_matrix(X, X, 0.3, KpcaKernel::Rbf));
        CHECK(Kc.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-9);
        CHECK(Kc.colwise().sum().cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("two identical rows give a zero centered kernel") {
    Eigen::MatrixXd X(2, 3);
    X << 1, 2, 3, 1, 2, 3;
    CHECK(center_kernel(kernel_matrix(X, X, 1.0, KpcaKernel::Rbf)).cwiseAbs().maxCoeff() == 0.0);
    const auto m = kpca_fit(X, 1.0, 0.95);
    CHECK(m.retained == 1);
    CHECK(m.eigenvalues(0) == 0.0);
    const auto t = kpca_transform(m, X);
    CHECK(t.skipped == std::vector<std::size_t>{0});
    CHECK(t.scores.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("linear kernel reproduces classical PCA") {
    Eigen::MatrixXd X(5, 3);
    X << 2.0, 0.5, 1.0,
         1.0, 1.5, -0.5,
         3.5, -1.0, 0.0,
         0.0, 2.0, 2.5,
         -1.0, 0.0, 1.5;
    check_matches_pca(X);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) check_matches_pca(testing_support::random_matrix(20, 5, 100 + seed));
}

TEST_CASE("transforming training rows reproduces the fitted projections") {
    const Eigen::MatrixXd X = testing_support::random_matrix(25, 4, 7);
    const auto m = kpca_fit(X, 0.2, 0.9);
    const auto t = kpca_transform(m, X);
    CHECK((t.scores - m.projections).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("duplicate rows land on the same point") {
    Eigen::MatrixXd X = testing_support::random_matrix(12, 3, 8);
    X.row(9) = X.row(2);
    const auto m = kpca_fit(X, 0.5, 0.95);
    CHECK((m.projections.row(9) - m.projections.row(2)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("vanishing kernel width collapses projections") {
    const Eigen::MatrixXd X = testing_support::random_matrix(10, 3, 9);
    const auto m = kpca_fit(X, 1e-12, 0.95);
    CHECK(kpca_transform(m, X).scores.norm() <= 1e-3);
}

TEST_CASE("projected variance equals the eigenvalue") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Eigen::MatrixXd X = testing_support::random_matrix(30, 4, 40 + seed);
        const auto m = kpca_fit(X, 0.25, 0.99);
        const double n = static_cast<double>(X.rows());
        for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(m.retained); ++k) {
            const Eigen::VectorXd s = m.projections.col(k);
            const double var = (s.array() - s.mean()).square().sum() / n;
            CHECK(std::abs(var - m.eigenvalues(k)) <= 1e-8);
        }
    }
}

TEST_CASE("retention honours the variance fraction") {
    const Eigen::MatrixXd X = testing_support::random_matrix(30, 4, 77);
    const auto m = kpca_fit(X, 0.25, 0.8);
    const double total = m.eigenvalues.sum();
    const auto r = static_cast<Eigen::Index>(m.retained);
    CHECK(m.eigenvalues.head(r).sum() >= 0.8 * total * (1.0 - 1e-12));
    if (r > 1) CHECK(m.eigenvalues.head(r - 1).sum() < 0.8 * total);
    for (Eigen::Index k = 1; k < m.eigenvalues.size(); ++k) CHECK(m.eigenvalues(k) <= m.eigenvalues(k - 1));
}

TEST_CASE("kpca preconditions") {
    const Eigen::MatrixXd X = testing_support::random_matrix(6, 2, 1);
    CHECK_THROWS_AS(kpca_fit(X.topRows(1), 1.0, 0.9), ValidationError);
    CHECK_THROWS_AS(kpca_fit(X, 0.0, 0.9), ValidationError);
    CHECK_THROWS_AS(kpca_fit(X, 1.0, 0.0), ValidationError);
    CHECK_THROWS_AS(kpca_fit(X, 1.0, 1.5), ValidationError);
    const auto m = kpca_fit(X, 1.0, 0.9);
    CHECK_THROWS_AS(kpca_transform(m, Eigen::MatrixXd::Ones(2, 3)), ValidationError);
}
