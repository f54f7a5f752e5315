#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace loadcast::svr {

enum class Kernel { Rbf, Linear };

struct SvrParams {
    double C = 10.0;
    /// Tube half-width on the standardized target scale.
    double epsilon = 0.01;
    /// RBF width; unset means 1 / column count.
    std::optional<double> gamma;
    /// Stop when the maximal KKT violation falls to this level.
    double tol = 1e-3;
    /// Iteration budget in units of full sweeps over the 2n dual variables.
    int max_passes = 1000;
    /// Linear is a test hook only.
    Kernel kernel = Kernel::Rbf;

    void validate() const;
};

double rbf(std::span<const double> u, std::span<const double> v, double gamma);

/// Immutable epsilon-SVR. Inputs and target are standardized with training statistics.
struct SvrModel {
    SvrParams params;  // gamma always resolved
    Eigen::MatrixXd support;       // standardized support rows
    Eigen::VectorXd coefficients;  // beta_i = alpha_i - alpha_i*, |beta_i| <= C
    double bias = 0.0;
    Eigen::RowVectorXd x_mean;
    Eigen::RowVectorXd x_scale;
    double y_mean = 0.0;
    double y_scale = 1.0;

    /// Diagnostics from training: every dual coefficient before pruning and the final
    /// maximal KKT violation.
    Eigen::VectorXd dual;
    double kkt_violation = 0.0;
    long iterations = 0;

    double predict(std::span<const double> x) const;
    Eigen::VectorXd predict(const Eigen::MatrixXd& rows) const;
    /// Decision value on the standardized target scale for an already standardized row.
    double decision(const Eigen::RowVectorXd& standardized_row) const;
};

/// Dual objective after every accepted pair update.
struct FitTrace {
    std::vector<double> objective;
};

SvrModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const SvrParams& params,
             FitTrace* trace = nullptr);

struct GridSearchResult {
    SvrParams best;
    std::vector<double> scores;  // mean CV RMSE per grid point; +inf when the fit failed
};

/// k-fold CV over the grid. Ties go to smaller C, then smaller gamma, then larger epsilon.
GridSearchResult grid_search(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::span<const SvrParams> grid,
                             std::size_t k, std::uint64_t seed);

/// C in {1, 10, 100}, epsilon in {0.01, 0.05, 0.1}, gamma in {0.5, 1, 2} / columns.
std::vector<SvrParams> default_grid(std::size_t columns);

}  // namespace loadcast::svr
