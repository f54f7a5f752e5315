#include "loadcast/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>

#include <boost/math/special_functions/gamma.hpp>

#include "loadcast/crossval.hpp"
#include "loadcast/error.hpp"
#include "loadcast/series.hpp"

namespace loadcast::evalstat {

namespace {

constexpr std::size_t kExactWilcoxonLimit = 25;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto at = line.find(sep, pos);
        out.push_back(trim(line.substr(pos, at == std::string_view::npos ? line.npos : at - pos)));
        if (at == std::string_view::npos) break;
        pos = at + 1;
    }
    return out;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Groups of equal values inside a sorted copy, for tie corrections: sum of (t^3 - t).
double tie_term(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size();) {
        std::size_t j = i;
        while (j < values.size() && values[j] == values[i]) ++j;
        const double t = static_cast<double>(j - i);
        sum += t * t * t - t;
        i = j;
    }
    return sum;
}

}  // namespace

// --------------------------------------------------------- ComparisonMatrix

void ComparisonMatrix::validate() const {
    if (models.empty()) throw ValidationError("comparison matrix has no models");
    if (rows.size() != cells.size()) throw ValidationError("comparison matrix row labels do not match cells");
    for (std::size_t r = 0; r < cells.size(); ++r) {
        if (cells[r].size() != models.size()) {
            throw ValidationError("comparison matrix row " + rows[r] + " is not rectangular");
        }
        for (double v : cells[r]) {
            if (!std::isfinite(v) || v < 0.0) {
                throw ValidationError("comparison matrix cells must be finite and >= 0 (row " + rows[r] + ")");
            }
        }
    }
}

std::size_t ComparisonMatrix::model_index(std::string_view name) const {
    const auto it = std::find(models.begin(), models.end(), name);
    if (it == models.end()) throw ValidationError("unknown model '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - models.begin());
}

std::vector<double> ComparisonMatrix::column(std::size_t model) const {
    std::vector<double> out;
    out.reserve(cells.size());
    for (const auto& row : cells) out.push_back(row.at(model));
    return out;
}

ComparisonMatrix parse_matrix(std::string_view csv_text) {
    ComparisonMatrix m;
    std::size_t pos = 0;
    bool header = true;
    std::size_t row_number = 0;
    while (pos <= csv_text.size()) {
        auto nl = csv_text.find('\n', pos);
        if (nl == std::string_view::npos) nl = csv_text.size();
        const auto line = trim(csv_text.substr(pos, nl - pos));
        pos = nl + 1;
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (header) {
            if (fields.size() < 2 || fields[0] != "month") {
                throw ParseError(ParseError::Kind::Header, 0, "header must be 'month,<model>,...'");
            }
            for (std::size_t j = 1; j < fields.size(); ++j) m.models.emplace_back(fields[j]);
            header = false;
            continue;
        }
        ++row_number;
        if (fields.size() != m.models.size() + 1) {
            throw ParseError(ParseError::Kind::MissingCell, row_number, "expected " + std::to_string(m.models.size() + 1) + " fields");
        }
        m.rows.emplace_back(fields[0]);
        std::vector<double> row;
        for (std::size_t j = 1; j < fields.size(); ++j) {
            auto cell = fields[j];
            if (cell.ends_with('%')) cell.remove_suffix(1);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
                throw ParseError(ParseError::Kind::Unparsable, row_number,
                                 "cannot parse '" + std::string(fields[j]) + "' for model " + m.models[j - 1]);
            }
            row.push_back(v);
        }
        m.cells.push_back(std::move(row));
    }
    if (header) throw ParseError(ParseError::Kind::Header, 0, "empty file");
    if (m.cells.empty()) throw ParseError(ParseError::Kind::Header, 0, "no data rows");
    m.validate();
    return m;
}

std::string serialize_matrix(const ComparisonMatrix& matrix) {
    std::string out = "month";
    for (const auto& name : matrix.models) out += "," + name;
    out += '\n';
    for (std::size_t r = 0; r < matrix.rows.size(); ++r) {
        out += matrix.rows[r];
        for (double v : matrix.cells[r]) out += "," + format_double(v);
        out += '\n';
    }
    return out;
}

// ------------------------------------------------------------- statistics

std::vector<WinLoss> win_loss(const ComparisonMatrix& matrix, std::string_view reference) {
    matrix.validate();
    const std::size_t ref = matrix.model_index(reference);
    std::vector<WinLoss> out;
    for (std::size_t j = 0; j < matrix.models.size(); ++j) {
        if (j == ref) continue;
        WinLoss wl{matrix.models[j]};
        for (const auto& row : matrix.cells) (row[ref] <= row[j] ? wl.wins : wl.losses) += 1;
        out.push_back(wl);
    }
    return out;
}

std::vector<double> midranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of i+1 .. j
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
        i = j;
    }
    return ranks;
}

FriedmanResult friedman_ranks(const ComparisonMatrix& matrix) {
    matrix.validate();
    const std::size_t k = matrix.models.size();
    const std::size_t n = matrix.rows.size();
    if (k < 2) throw ValidationError("Friedman test needs at least 2 models");
    if (n < 2) throw ValidationError("Friedman test needs at least 2 rows");

    FriedmanResult out;
    out.average_ranks.assign(k, 0.0);
    double ties = 0.0;
    for (const auto& row : matrix.cells) {
        const auto ranks = midranks(row);
        for (std::size_t j = 0; j < k; ++j) out.average_ranks[j] += ranks[j];
        ties += tie_term(row);
    }
    for (double& r : out.average_ranks) r /= static_cast<double>(n);

    const double kd = static_cast<double>(k);
    const double nd = static_cast<double>(n);
    double sum_sq = 0.0;
    for (double r : out.average_ranks) sum_sq += r * r;
    double chi = 12.0 * nd / (kd * (kd + 1.0)) * (sum_sq - kd * (kd + 1.0) * (kd + 1.0) / 4.0);
    const double correction = 1.0 - ties / (nd * kd * (kd * kd - 1.0));
    if (correction > 0.0) chi /= correction;
    out.chi_square = chi;
    out.degrees_of_freedom = static_cast<int>(k) - 1;
    out.p_value = chi > 0.0 ? boost::math::gamma_q(0.5 * (kd - 1.0), 0.5 * chi) : 1.0;
    return out;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b, Sided sided,
                                    WilcoxonMethod method) {
    if (a.size() != b.size()) throw ValidationError("Wilcoxon samples differ in length");
    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diffs.push_back(d);
    }
    if (diffs.empty()) throw NumericError("Wilcoxon test is degenerate: all differences are zero");

    // |d| equal up to rounding noise count as ties.
    std::vector<double> magnitude(diffs.size());
    double largest = 0.0;
    for (double d : diffs) largest = std::max(largest, std::abs(d));
    const double quantum = largest * 1e-9;
    for (std::size_t i = 0; i < diffs.size(); ++i) magnitude[i] = std::round(std::abs(diffs[i]) / quantum) * quantum;
    const auto ranks = midranks(magnitude);

    double w_plus = 0.0, w_minus = 0.0;
    for (std::size_t i = 0; i < diffs.size(); ++i) (diffs[i] > 0.0 ? w_plus : w_minus) += ranks[i];

    WilcoxonResult out;
    out.n = diffs.size();
    out.statistic = sided == Sided::OneLess ? w_plus : std::min(w_plus, w_minus);
    out.exact = method == WilcoxonMethod::Exact || (method == WilcoxonMethod::Auto && out.n <= kExactWilcoxonLimit);

    double lower_tail = 0.0;
    if (out.exact) {
        // Null distribution of the positive-rank sum over all 2^n sign patterns, in half-rank units.
        std::vector<long> doubled(ranks.size());
        long total = 0;
        for (std::size_t i = 0; i < ranks.size(); ++i) {
            doubled[i] = std::lround(2.0 * ranks[i]);
            total += doubled[i];
        }
        std::vector<double> counts(static_cast<std::size_t>(total + 1), 0.0);
        counts[0] = 1.0;
        long reach = 0;
        for (long r : doubled) {
            for (long s = reach; s >= 0; --s) counts[static_cast<std::size_t>(s + r)] += counts[static_cast<std::size_t>(s)];
            reach += r;
        }
        const long observed = std::lround(2.0 * out.statistic);
        double hits = 0.0;
        for (long s = 0; s <= std::min(observed, total); ++s) hits += counts[static_cast<std::size_t>(s)];
        lower_tail = hits / std::ldexp(1.0, static_cast<int>(out.n));
    } else {
        const double nd = static_cast<double>(out.n);
        const double mean = nd * (nd + 1.0) / 4.0;
        const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term(magnitude) / 48.0;
        lower_tail = normal_cdf((out.statistic - mean + 0.5) / std::sqrt(var));
    }
    out.p_value = sided == Sided::OneLess ? lower_tail : std::min(1.0, 2.0 * lower_tail);
    return out;
}

StatReport stat_report(const ComparisonMatrix& matrix, std::string_view reference, Sided sided) {
    matrix.validate();
    StatReport report;
    report.reference = std::string(reference);
    report.models = matrix.models;
    report.win_loss = win_loss(matrix, reference);
    if (matrix.rows.size() >= 2 && matrix.models.size() >= 2) {
        report.friedman = friedman_ranks(matrix);
    } else {
        report.friedman_note = "Friedman test needs at least 2 rows and 2 models";
    }
    const auto ref = matrix.column(matrix.model_index(reference));
    for (const auto& wl : report.win_loss) {
        try {
            report.wilcoxon.emplace_back(wilcoxon_signed_rank(ref, matrix.column(matrix.model_index(wl.model)), sided));
        } catch (const NumericError&) {
            report.wilcoxon.emplace_back(std::nullopt);
        }
    }
    return report;
}

std::string stat_report_csv(const ComparisonMatrix& matrix, const StatReport& report) {
    std::string out = serialize_matrix(matrix);
    const std::size_t ref = matrix.model_index(report.reference);
    auto find = [&](const std::string& model) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < report.win_loss.size(); ++i) {
            if (report.win_loss[i].model == model) return i;
        }
        return std::nullopt;
    };
    std::string wl_row = "Win/Loss", rank_row = "F-rank", p_row = "P-value";
    for (std::size_t j = 0; j < matrix.models.size(); ++j) {
        const auto i = find(matrix.models[j]);
        if (j == ref || !i) {
            wl_row += ",-";
            p_row += ",-";
        } else {
            wl_row += "," + std::to_string(report.win_loss[*i].wins) + "/" + std::to_string(report.win_loss[*i].losses);
            const auto& w = report.wilcoxon[*i];
            p_row += "," + (w ? format_double(w->p_value) : std::string("NA"));
        }
        rank_row += "," + (report.friedman ? format_double(report.friedman->average_ranks[j]) : std::string("NA"));
    }
    return out + wl_row + "\n" + rank_row + "\n" + p_row + "\n";
}

// -------------------------------------------------------- cross validation

std::vector<std::vector<std::size_t>> kfold(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw ValidationError("k-fold needs k >= 2");
    if (k > n) throw ValidationError("k-fold needs k <= n (k = " + std::to_string(k) + ", n = " + std::to_string(n) + ")");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = n / k + (f < n % k ? 1 : 0);
        folds[f].assign(order.begin() + static_cast<long>(pos), order.begin() + static_cast<long>(pos + size));
        pos += size;
    }
    return folds;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, const std::vector<std::size_t>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
    return out;
}

Eigen::VectorXd take_rows(const Eigen::VectorXd& y, const std::vector<std::size_t>& rows) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(rows[i]));
    return out;
}

// ------------------------------------------------------------------ trials

TrialSummary multi_trial(const std::function<TrialMetrics(std::uint64_t)>& runner, std::size_t trials,
                         std::uint64_t base_seed) {
    if (trials < 1) throw ValidationError("trials must be >= 1");
    TrialSummary out;
    out.trials = trials;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::uint64_t seed = base_seed + t;
        try {
            out.values.push_back(runner(seed));
        } catch (const std::exception& e) {
            throw TrialError(seed, e.what());
        }
    }
    const double n = static_cast<double>(trials);
    for (const auto& v : out.values) {
        out.mean_mape += v.mape;
        out.mean_mae += v.mae;
    }
    out.mean_mape /= n;
    out.mean_mae /= n;
    const auto same = [&](auto field) {
        return std::all_of(out.values.begin(), out.values.end(),
                           [&](const TrialMetrics& v) { return field(v) == field(out.values.front()); });
    };
    // Identical trials report their common value exactly, with zero spread.
    if (same([](const TrialMetrics& v) { return v.mape; })) out.mean_mape = out.values.front().mape;
    if (same([](const TrialMetrics& v) { return v.mae; })) out.mean_mae = out.values.front().mae;
    if (trials > 1) {
        double sm = 0.0, sa = 0.0;
        for (const auto& v : out.values) {
            sm += (v.mape - out.mean_mape) * (v.mape - out.mean_mape);
            sa += (v.mae - out.mean_mae) * (v.mae - out.mean_mae);
        }
        out.std_mape = std::sqrt(sm / (n - 1.0));
        out.std_mae = std::sqrt(sa / (n - 1.0));
    }
    return out;
}

}  // namespace loadcast::evalstat
