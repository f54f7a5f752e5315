#include "loadcast/arima.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "loadcast/error.hpp"

namespace loadcast::arima {

namespace {

constexpr double kRootMargin = 1e-6;

struct Params {
    std::vector<double> ar;
    std::vector<double> ma;
    double intercept = 0.0;
};

/// Layout: [ar..., ma..., scaled intercept (d == 0 only)].
Params unpack(std::span<const double> x, const ArimaSpec& spec, double intercept_scale) {
    Params out;
    out.ar.assign(x.begin(), x.begin() + spec.p);
    out.ma.assign(x.begin() + spec.p, x.begin() + spec.p + spec.q);
    if (spec.d == 0) out.intercept = x[static_cast<std::size_t>(spec.p + spec.q)] * intercept_scale;
    return out;
}

bool admissible(const Params& params) {
    return roots_outside_unit_circle(params.ar, -1.0) && roots_outside_unit_circle(params.ma, 1.0);
}

}  // namespace

void ArimaSpec::validate() const {
    if (p < 0 || d < 0 || q < 0) {
        throw ValidationError("ARIMA orders must be non-negative, got (" + std::to_string(p) + "," +
                              std::to_string(d) + "," + std::to_string(q) + ")");
    }
}

std::vector<double> difference(std::span<const double> values, int d) {
    if (d < 0) throw ValidationError("difference order must be non-negative");
    if (values.size() <= static_cast<std::size_t>(d)) {
        throw ValidationError("differencing of order " + std::to_string(d) + " needs more than " +
                              std::to_string(d) + " values");
    }
    std::vector<double> out(values.begin(), values.end());
    for (int k = 0; k < d; ++k) {
        for (std::size_t i = 0; i + 1 < out.size(); ++i) out[i] = out[i + 1] - out[i];
        out.pop_back();
    }
    return out;
}

std::vector<double> undifference(std::span<const double> tail, int d, std::span<const double> forecasts) {
    if (d < 0) throw ValidationError("difference order must be non-negative");
    if (tail.size() < static_cast<std::size_t>(d)) {
        throw ValidationError("undifferencing of order " + std::to_string(d) + " needs a tail of at least " +
                              std::to_string(d) + " values");
    }
    // anchors[k] = last value of the k-th difference of the tail.
    std::vector<double> level(tail.end() - d, tail.end());
    std::vector<double> anchors;
    for (int k = 0; k < d; ++k) {
        anchors.push_back(level.back());
        for (std::size_t i = 0; i + 1 < level.size(); ++i) level[i] = level[i + 1] - level[i];
        level.pop_back();
    }
    std::vector<double> out(forecasts.begin(), forecasts.end());
    for (int k = d - 1; k >= 0; --k) {
        double running = anchors[static_cast<std::size_t>(k)];
        for (double& v : out) {
            running += v;
            v = running;
        }
    }
    return out;
}

std::vector<double> css_residuals(std::span<const double> ar, std::span<const double> ma, double intercept,
                                  std::span<const double> w) {
    std::vector<double> e(w.size(), 0.0);
    for (std::size_t t = 0; t < w.size(); ++t) {
        double pred = intercept;
        for (std::size_t i = 0; i < ar.size() && i < t; ++i) pred += ar[i] * w[t - 1 - i];
        for (std::size_t j = 0; j < ma.size() && j < t; ++j) pred += ma[j] * e[t - 1 - j];
        e[t] = w[t] - pred;
    }
    return e;
}

double css_loss(std::span<const double> ar, std::span<const double> ma, double intercept,
                std::span<const double> w) {
    const auto e = css_residuals(ar, ma, intercept, w);
    const std::size_t skip = std::max(ar.size(), ma.size());
    double loss = 0.0;
    for (std::size_t t = skip; t < e.size(); ++t) loss += e[t] * e[t];
    return loss;
}

bool roots_outside_unit_circle(std::span<const double> coefficients, double sign) {
    std::size_t k = coefficients.size();
    while (k > 0 && coefficients[k - 1] == 0.0) --k;
    if (k == 0) return true;
    // Roots of 1 + sign*(c_1 z + ... + c_k z^k) are reciprocals of the companion eigenvalues.
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) companion(0, static_cast<Eigen::Index>(i)) = -sign * coefficients[i];
    for (std::size_t i = 1; i < k; ++i) companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) return false;
    const double limit = 1.0 / (1.0 + kRootMargin);
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        if (!(std::abs(solver.eigenvalues()(i)) < limit)) return false;
    }
    return true;
}

std::vector<double> ArimaModel::fitted() const {
    std::vector<double> out(history);
    const auto d = static_cast<std::size_t>(spec.d);
    for (std::size_t t = d; t < history.size(); ++t) out[t] = history[t] - residuals[t - d];
    return out;
}

ArimaModel fit(std::span<const double> values, const ArimaSpec& spec, const FitOptions& options) {
    spec.validate();
    if (values.size() <= static_cast<std::size_t>(spec.d)) {
        throw ValidationError("ARIMA series too short for d = " + std::to_string(spec.d));
    }
    const auto w = difference(values, spec.d);
    const std::size_t min_length = static_cast<std::size_t>(spec.p + spec.q + 2);
    if (w.size() < min_length) {
        throw ValidationError("ARIMA(" + std::to_string(spec.p) + "," + std::to_string(spec.d) + "," +
                              std::to_string(spec.q) + ") needs at least " + std::to_string(min_length) +
                              " differenced values, got " + std::to_string(w.size()));
    }

    const bool with_intercept = spec.d == 0;
    const std::size_t dim = static_cast<std::size_t>(spec.p + spec.q) + (with_intercept ? 1 : 0);

    double mean = 0.0;
    for (double v : w) mean += v;
    mean /= static_cast<double>(w.size());
    double var = 0.0;
    for (double v : w) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(w.size()));
    // The intercept is optimized in units of the data scale so one simplex step fits all axes.
    const double intercept_scale = sd > 0.0 ? sd : (std::abs(mean) > 0.0 ? std::abs(mean) : 1.0);

    const auto objective = [&](std::span<const double> x) {
        const Params params = unpack(x, spec, intercept_scale);
        if (!admissible(params)) return std::numeric_limits<double>::infinity();
        return css_loss(params.ar, params.ma, params.intercept, w);
    };

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> jitter(-options.jitter, options.jitter);

    std::vector<double> best_x;
    double best_value = std::numeric_limits<double>::infinity();
    // Nothing to estimate, e.g. (0, d, 0) with d >= 1.
    if (dim == 0) best_value = objective(best_x);
    for (int s = 0; dim > 0 && s < std::max(1, options.starts); ++s) {
        std::vector<double> x0(dim, 0.0);
        if (s > 0) {
            for (int attempt = 0; attempt < 100; ++attempt) {
                for (std::size_t i = 0; i < static_cast<std::size_t>(spec.p + spec.q); ++i) x0[i] = jitter(rng);
                if (with_intercept) x0[dim - 1] = mean / intercept_scale + jitter(rng);
                if (admissible(unpack(x0, spec, intercept_scale))) break;
                std::fill(x0.begin(), x0.end(), 0.0);
            }
        }
        const auto result = optim::nelder_mead(objective, x0, options.simplex);
        if (result.value < best_value) {
            best_value = result.value;
            best_x = result.x;
        }
    }
    if (!std::isfinite(best_value)) {
        throw NumericError("ARIMA fit found no stationary and invertible parameters");
    }

    const Params params = unpack(best_x, spec, intercept_scale);
    if (!admissible(params)) throw NumericError("ARIMA fit is not stationary/invertible");

    ArimaModel model;
    model.spec = spec;
    model.ar = params.ar;
    model.ma = params.ma;
    model.intercept = params.intercept;
    model.residuals = css_residuals(model.ar, model.ma, model.intercept, w);
    model.css = css_loss(model.ar, model.ma, model.intercept, w);
    const std::size_t effective = w.size() - static_cast<std::size_t>(std::max(spec.p, spec.q));
    model.sigma2 = model.css / static_cast<double>(effective);
    model.differenced = w;
    model.history.assign(values.begin(), values.end());
    return model;
}

std::vector<double> forecast(const ArimaModel& model, std::size_t horizon) {
    if (horizon < 1) throw ValidationError("forecast horizon must be >= 1");
    std::vector<double> w(model.differenced);
    std::vector<double> e(model.residuals);
    const std::size_t n = w.size();
    for (std::size_t k = 0; k < horizon; ++k) {
        const std::size_t t = n + k;
        double pred = model.intercept;
        for (std::size_t i = 0; i < model.ar.size() && i < t; ++i) pred += model.ar[i] * w[t - 1 - i];
        for (std::size_t j = 0; j < model.ma.size() && j < t; ++j) pred += model.ma[j] * e[t - 1 - j];
        w.push_back(pred);
        e.push_back(0.0);
    }
    const std::span<const double> ahead(w.data() + n, horizon);
    return undifference(model.history, model.spec.d, ahead);
}

}  // namespace loadcast::arima
