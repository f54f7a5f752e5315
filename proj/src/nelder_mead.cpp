#include "loadcast/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "loadcast/error.hpp"

namespace loadcast::optim {

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> x0, const NelderMeadOptions& options) {
    const std::size_t dim = x0.size();
    NelderMeadResult result;
    if (dim == 0) {
        result.value = objective(x0);
        result.x = std::move(x0);
        result.converged = true;
        return result;
    }

    std::vector<std::vector<double>> simplex(dim + 1, x0);
    for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += options.initial_step;
    std::vector<double> values(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) values[i] = objective(simplex[i]);
    if (!std::isfinite(values[0])) throw NumericError("simplex start point has a non-finite objective");

    std::vector<std::size_t> order(dim + 1);
    std::vector<double> centroid(dim), trial(dim), second(dim);
    auto point = [&](double t, const std::vector<double>& toward, std::vector<double>& out) {
        for (std::size_t k = 0; k < dim; ++k) out[k] = centroid[k] + t * (toward[k] - centroid[k]);
    };

    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        // Stable so that equal-valued vertices keep their original precedence.
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<std::vector<double>> sorted_simplex(dim + 1);
        std::vector<double> sorted_values(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) {
            sorted_simplex[i] = std::move(simplex[order[i]]);
            sorted_values[i] = values[order[i]];
        }
        simplex = std::move(sorted_simplex);
        values = std::move(sorted_values);

        double diameter = 0.0;
        for (std::size_t i = 1; i <= dim; ++i) {
            for (std::size_t k = 0; k < dim; ++k) diameter = std::max(diameter, std::abs(simplex[i][k] - simplex[0][k]));
        }
        if (diameter <= options.x_tolerance || values[0] == values[dim]) {
            result.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[i][k];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);

        const auto& worst = simplex[dim];
        point(-1.0, worst, trial);
        const double reflected = objective(trial);

        if (reflected < values[0]) {
            point(-2.0, worst, second);
            const double expanded = objective(second);
            if (expanded < reflected) {
                simplex[dim] = second;
                values[dim] = expanded;
            } else {
                simplex[dim] = trial;
                values[dim] = reflected;
            }
            continue;
        }
        if (reflected < values[dim - 1]) {
            simplex[dim] = trial;
            values[dim] = reflected;
            continue;
        }
        // Outside contraction when the reflection improved on the worst vertex, inside otherwise.
        const bool outside = reflected < values[dim];
        point(outside ? -0.5 : 0.5, worst, second);
        const double contracted = objective(second);
        if (contracted < (outside ? reflected : values[dim])) {
            simplex[dim] = second;
            values[dim] = contracted;
            continue;
        }
        for (std::size_t i = 1; i <= dim; ++i) {
            for (std::size_t k = 0; k < dim; ++k) simplex[i][k] = simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]);
            values[i] = objective(simplex[i]);
        }
    }

    const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    result.x = simplex[best];
    result.value = values[best];
    result.iterations = iter;
    return result;
}

}  // namespace loadcast::optim
