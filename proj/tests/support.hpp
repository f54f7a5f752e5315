#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "loadcast/synth.hpp"

namespace testing_support {

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = z(rng);
    return m;
}

/// Linear trend times fixed indices with no irregular and no exogenous coupling.
inline loadcast::SynthConfig clean_config(std::size_t length = 72) {
    loadcast::SynthConfig c;
    c.length = length;
    c.trend = loadcast::TrendShape::Linear;
    c.base = 1000.0;
    c.slope = 4.0;
    c.irregular_log_sd = 0.0;
    c.coupling.temp_effect = 0.0;
    c.coupling.holiday_effect = 0.0;
    return c;
}

}  // namespace testing_support
