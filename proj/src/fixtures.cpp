#include "loadcast/fixtures.hpp"

namespace loadcast::evalstat {

namespace {

const std::vector<std::string> kModels{"X12-ARIMA", "ETS",     "LSTM",        "NBEATS", "MLP",
                                       "GRNN",      "SVR",     "XGBOOST",     "RD-ETS+LSTM", "XASXG"};

ComparisonMatrix make(std::vector<std::vector<double>> cells) {
    ComparisonMatrix m;
    m.models = kModels;
    for (std::size_t r = 0; r < cells.size(); ++r) m.rows.push_back(std::to_string(r + 1));
    m.cells = std::move(cells);
    return m;
}

}  // namespace

TableFixture table_one() {
    return TableFixture{
        "Table I",
        make({
            {6.60, 7.83, 1.00, 3.08, 12.69, 2.23, 14.84, 8.40, 3.59, 0.12},
            {13.48, 11.21, 14.93, 6.15, 10.67, 18.81, 19.53, 0.11, 13.69, 0.01},
            {0.95, 2.61, 1.69, 4.76, 6.41, 3.38, 5.39, 32.80, 1.87, 1.50},
            {1.33, 0.21, 7.07, 9.64, 5.48, 12.40, 7.57, 0.01, 3.11, 0.18},
            {1.24, 1.17, 6.67, 5.37, 5.93, 1.21, 2.53, 19.42, 3.28, 0.03},
            {4.46, 4.44, 0.29, 4.22, 1.39, 5.60, 2.40, 6.45, 2.00, 3.10},
            {1.15, 0.17, 5.54, 2.14, 14.69, 2.26, 18.81, 2.89, 1.07, 0.16},
            {1.75, 2.82, 0.76, 2.69, 16.66, 5.28, 18.70, 0.91, 3.40, 0.06},
            {0.44, 3.30, 13.34, 4.47, 3.48, 14.28, 0.05, 0.01, 2.95, 1.09},
            {0.38, 1.75, 13.36, 4.66, 7.50, 13.75, 5.01, 3.30, 2.97, 0.10},
            {0.67, 2.94, 6.27, 7.06, 2.51, 11.41, 0.96, 0.00, 2.20, 1.38},
            {1.00, 1.50, 2.43, 0.40, 12.07, 4.65, 12.09, 0.21, 1.71, 0.03},
        }),
        PrintedSummary{
            {"11/1", "12/0", "12/0", "12/0", "11/1", "12/0", "9/3", "9/3", "12/0"},
            {4, 4.833, 6.083, 6, 7.166, 7.666, 7.25, 5, 5, 2},
            {0.0080, 0.0002, 0.0024, 0.0002, 0.0007, 0.0002, 0.003, 0.0212, 0.0017},
        },
    };
}

TableFixture table_two() {
    return TableFixture{
        "Table II",
        make({
            {5.77, 7.15, 1.33, 5.45, 5.19, 3.20, 8.42, 10.32, 3.11, 0.05},
            {18.13, 15.03, 8.00, 13.23, 55.47, 14.75, 65.68, 0.31, 16.92, 0.02},
            {1.49, 3.83, 5.12, 5.35, 4.81, 17.15, 0.25, 33.50, 1.97, 0.05},
            {1.60, 2.77, 1.61, 6.37, 5.53, 7.92, 6.71, 0.00, 2.43, 0.43},
            {1.40, 1.22, 4.19, 4.32, 2.01, 4.04, 3.75, 17.17, 2.50, 0.04},
            {3.19, 3.91, 1.26, 0.34, 1.75, 1.64, 0.12, 4.91, 1.21, 1.64},
            {1.04, 0.55, 0.35, 0.96, 11.66, 5.80, 12.68, 9.95, 0.78, 1.52},
            {0.77, 2.16, 10.08, 7.28, 16.05, 4.82, 14.22, 4.75, 1.33, 1.11},
            {5.40, 8.48, 20.10, 5.72, 6.07, 8.07, 6.14, 0.01, 6.89, 0.16},
            {1.80, 3.77, 11.37, 6.32, 6.08, 7.04, 7.00, 1.50, 3.88, 0.04},
            {0.58, 2.37, 5.30, 3.32, 0.20, 5.21, 0.65, 0.00, 2.77, 0.01},
            {16.99, 12.59, 9.99, 8.19, 24.56, 14.48, 22.65, 14.02, 14.64, 17.21},
        }),
        PrintedSummary{
            {"9/3", "10/2", "11/1", "11/1", "12/0", "11/1", "11/1", "9/3", "11/1"},
            {4.67, 5.33, 5.75, 5.66, 6.75, 7.17, 7, 5.33, 4.75, 2.58},
            {0.001, 0.011, 0.013, 0.0261, 0.0002, 0.0007, 0.001, 0.021, 0.008},
        },
    };
}

}  // namespace loadcast::evalstat
