#include "loadcast/kpca.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "loadcast/error.hpp"

namespace loadcast::featsel {

namespace {

constexpr double kSkipEigenvalue = 1e-12;
constexpr double kNegativeTolerance = 1e-9;

}  // namespace

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double gamma, KpcaKernel kernel) {
    if (A.cols() != B.cols()) throw ValidationError("kernel inputs differ in column count");
    if (kernel == KpcaKernel::Linear) return A * B.transpose();
    Eigen::MatrixXd K(A.rows(), B.rows());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < B.rows(); ++j) K(i, j) = std::exp(-gamma * (A.row(i) - B.row(j)).squaredNorm());
    }
    return K;
}

Eigen::MatrixXd center_kernel(const Eigen::MatrixXd& K) {
    const Eigen::RowVectorXd col_mean = K.colwise().mean();
    const Eigen::VectorXd row_mean = K.rowwise().mean();
    const double grand = K.mean();
    Eigen::MatrixXd out = K;
    out.rowwise() -= col_mean;
    out.colwise() -= row_mean;
    out.array() += grand;
    return out;
}

KpcaModel kpca_fit(const Eigen::MatrixXd& X, double gamma, double variance_fraction, KpcaKernel kernel) {
    const Eigen::Index n = X.rows();
    if (n < 2) throw ValidationError("KPCA needs at least 2 rows");
    if (!(gamma > 0.0)) throw ValidationError("KPCA gamma must be > 0");
    if (!(variance_fraction > 0.0 && variance_fraction <= 1.0)) {
        throw ValidationError("KPCA variance fraction must be in (0, 1]");
    }

    KpcaModel model;
    model.training = X;
    model.gamma = gamma;
    model.kernel = kernel;
    const Eigen::MatrixXd K = kernel_matrix(X, X, gamma, kernel);
    model.kernel_column_mean = K.colwise().mean();
    model.kernel_grand_mean = K.mean();
    const Eigen::MatrixXd Kc = center_kernel(K);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Kc);
    if (solver.info() != Eigen::Success) throw NumericError("KPCA eigendecomposition did not converge");

    // Eigen returns ascending order.
    const Eigen::VectorXd mu = solver.eigenvalues().reverse();
    model.eigenvectors = solver.eigenvectors().rowwise().reverse();
    const double scale = std::max(1.0, std::abs(mu(0)));
    model.eigenvalues.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        if (mu(k) < -kNegativeTolerance * scale) {
            throw NumericError("centered kernel matrix has a negative eigenvalue " + std::to_string(mu(k)));
        }
        model.eigenvalues(k) = std::max(0.0, mu(k)) / static_cast<double>(n);
    }

    const double total = model.eigenvalues.sum();
    std::size_t retained = 1;
    if (total > 0.0) {
        double running = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            running += model.eigenvalues(k);
            retained = static_cast<std::size_t>(k + 1);
            if (running >= variance_fraction * total * (1.0 - 1e-12)) break;
        }
    }
    model.retained = retained;
    model.projections = kpca_transform(model, X).scores;
    return model;
}

KpcaProjection kpca_transform(const KpcaModel& model, const Eigen::MatrixXd& X_new) {
    if (X_new.cols() != model.training.cols()) throw ValidationError("KPCA input column count mismatch");
    const double n = static_cast<double>(model.training.rows());
    Eigen::MatrixXd Kn = kernel_matrix(X_new, model.training, model.gamma, model.kernel);
    const Eigen::VectorXd row_mean = Kn.rowwise().mean();
    Kn.rowwise() -= model.kernel_column_mean;
    Kn.colwise() -= row_mean;
    Kn.array() += model.kernel_grand_mean;

    KpcaProjection out;
    out.scores = Eigen::MatrixXd::Zero(X_new.rows(), static_cast<Eigen::Index>(model.retained));
    for (std::size_t k = 0; k < model.retained; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        const double lambda = model.eigenvalues(kk);
        if (lambda <= kSkipEigenvalue) {
            out.skipped.push_back(k);
            continue;
        }
        // Unit eigenvector of K' scaled by 1/sqrt(n * lambda), the centered-kernel eigenvalue.
        out.scores.col(kk) = Kn * model.eigenvectors.col(kk) / std::sqrt(n * lambda);
    }
    return out;
}

}  // namespace loadcast::featsel
