#pragma once

#include <vector>

#include <Eigen/Dense>

namespace loadcast::featsel {

enum class KpcaKernel { Rbf, Linear };

/// Kernel PCA fitted on a fixed set of training rows.
///
/// Eigenvalues are those of the centered kernel matrix divided by the row count, so the
/// training projections on component k have (1/n) variance equal to eigenvalues(k).
struct KpcaModel {
    Eigen::MatrixXd training;
    double gamma = 1.0;
    KpcaKernel kernel = KpcaKernel::Rbf;
    Eigen::VectorXd eigenvalues;   // descending, clamped at 0
    Eigen::MatrixXd eigenvectors;  // unit-norm columns of the centered kernel matrix
    std::size_t retained = 1;
    Eigen::RowVectorXd kernel_column_mean;
    double kernel_grand_mean = 0.0;
    Eigen::MatrixXd projections;  // training scores, n x retained
};

struct KpcaProjection {
    Eigen::MatrixXd scores;
    /// Retained components with eigenvalue <= 1e-12; their score columns are zero.
    std::vector<std::size_t> skipped;
};

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double gamma, KpcaKernel kernel);

/// K' = K - 1K - K1 + 1K1 with 1 the all-(1/n) matrix.
Eigen::MatrixXd center_kernel(const Eigen::MatrixXd& K);

/// Retains the fewest leading components whose eigenvalues reach `variance_fraction` of the
/// positive spectrum (at least one).
KpcaModel kpca_fit(const Eigen::MatrixXd& X, double gamma, double variance_fraction,
                   KpcaKernel kernel = KpcaKernel::Rbf);

KpcaProjection kpca_transform(const KpcaModel& model, const Eigen::MatrixXd& X_new);

}  // namespace loadcast::featsel
