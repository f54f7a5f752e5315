#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace loadcast::evalstat {

/// Rows are matched observations (months), columns are models; cells are absolute
/// percentage errors.
struct ComparisonMatrix {
    std::vector<std::string> rows;
    std::vector<std::string> models;
    std::vector<std::vector<double>> cells;  // cells[row][model]

    void validate() const;
    std::size_t model_index(std::string_view name) const;
    std::vector<double> column(std::size_t model) const;
};

/// `month,<model1>,<model2>,...`; cells may carry a trailing '%'.
ComparisonMatrix parse_matrix(std::string_view csv_text);
std::string serialize_matrix(const ComparisonMatrix& matrix);

struct WinLoss {
    std::string model;
    int wins = 0;
    int losses = 0;
};

/// Reference wins a row when its error is <= the other model's (ties are wins).
std::vector<WinLoss> win_loss(const ComparisonMatrix& matrix, std::string_view reference);

struct FriedmanResult {
    std::vector<double> average_ranks;  // per model, 1 = best
    double chi_square = 0.0;            // tie-corrected
    double p_value = 1.0;
    int degrees_of_freedom = 0;
};

FriedmanResult friedman_ranks(const ComparisonMatrix& matrix);

/// Mid-ranks (1-based) with ties averaged.
std::vector<double> midranks(std::span<const double> values);

enum class Sided { OneLess, Two };
enum class WilcoxonMethod { Auto, Exact, Normal };

struct WilcoxonResult {
    /// One-sided: rank sum of pairs with a > b. Two-sided: min of both rank sums.
    double statistic = 0.0;
    std::size_t n = 0;  // pairs after dropping zero differences
    double p_value = 1.0;
    bool exact = true;
};

/// Signed-rank test on a - b. Auto uses the exact null distribution up to 25 pairs and the
/// continuity-corrected normal approximation above.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                    Sided sided = Sided::OneLess,
                                    WilcoxonMethod method = WilcoxonMethod::Auto);

struct StatReport {
    std::string reference;
    std::vector<std::string> models;
    std::vector<WinLoss> win_loss;          // every model except the reference
    std::optional<FriedmanResult> friedman; // unset when the matrix has fewer than 2 rows
    std::string friedman_note;
    std::vector<std::optional<WilcoxonResult>> wilcoxon;  // aligned with win_loss
};

StatReport stat_report(const ComparisonMatrix& matrix, std::string_view reference, Sided sided = Sided::OneLess);

/// Table layout: the matrix rows followed by Win/Loss, F-rank and P-value rows.
std::string stat_report_csv(const ComparisonMatrix& matrix, const StatReport& report);

struct TrialMetrics {
    double mape = 0.0;
    double mae = 0.0;
};

struct TrialSummary {
    std::size_t trials = 0;
    double mean_mape = 0.0;
    double std_mape = 0.0;
    double mean_mae = 0.0;
    double std_mae = 0.0;
    std::vector<TrialMetrics> values;
};

class TrialError : public std::runtime_error {
public:
    TrialError(std::uint64_t seed, const std::string& what)
        : std::runtime_error("trial with seed " + std::to_string(seed) + " failed: " + what), seed_(seed) {}
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
};

/// Runs seeds base_seed .. base_seed + trials - 1 and reports sample mean / standard deviation.
TrialSummary multi_trial(const std::function<TrialMetrics(std::uint64_t)>& runner, std::size_t trials,
                         std::uint64_t base_seed);

}  // namespace loadcast::evalstat
