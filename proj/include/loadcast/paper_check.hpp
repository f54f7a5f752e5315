#pragma once

#include <string>
#include <vector>

#include "loadcast/fixtures.hpp"

namespace loadcast::evalstat {

enum class CheckStatus { Pass, ExpectedDeviation, Fail };

struct CheckLine {
    std::string table;
    std::string check;  // "F-rank", "Win/Loss", "Wilcoxon"
    std::string model;
    std::string computed;
    std::string printed;
    CheckStatus status = CheckStatus::Pass;
    std::string note;
};

struct PaperCheckResult {
    std::vector<CheckLine> lines;
    bool ok() const;
    std::size_t count(CheckStatus status) const;
};

/// Recomputes the summary rows of both tables from their cells and compares them with the
/// printed rows. Known inconsistencies of the printed rows are reported as expected
/// deviations only when the recomputed value is the known one; anything else that
/// disagrees fails.
PaperCheckResult paper_check(const TableFixture& first, const TableFixture& second);
PaperCheckResult paper_check();

std::string format_paper_check(const PaperCheckResult& result);

}  // namespace loadcast::evalstat
