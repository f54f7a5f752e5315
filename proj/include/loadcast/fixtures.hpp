#pragma once

#include <string>
#include <vector>

#include "loadcast/stats.hpp"

namespace loadcast::evalstat {

/// Summary rows as printed beneath a published comparison table, one entry per
/// non-reference model in column order.
struct PrintedSummary {
    std::vector<std::string> win_loss;
    std::vector<double> f_rank;  // includes the reference (last column)
    std::vector<double> p_value;
};

struct TableFixture {
    std::string name;
    ComparisonMatrix matrix;
    PrintedSummary printed;
};

/// Monthly absolute percentage errors of ten models on two city test years. The reference
/// model XASXG is the last column.
TableFixture table_one();
TableFixture table_two();

inline constexpr const char* kReferenceModel = "XASXG";

}  // namespace loadcast::evalstat
