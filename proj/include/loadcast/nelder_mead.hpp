#pragma once

#include <functional>
#include <span>
#include <vector>

namespace loadcast::optim {

struct NelderMeadOptions {
    int max_iterations = 2000;
    /// Stop once every vertex lies within this distance (max-norm) of the best one.
    double x_tolerance = 1e-8;
    /// Edge length of the initial simplex along each axis.
    double initial_step = 0.1;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Derivative-free simplex minimization (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
/// The objective may return +inf to mark infeasible points; `x0` itself must be finite-valued.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> x0, const NelderMeadOptions& options = {});

}  // namespace loadcast::optim
