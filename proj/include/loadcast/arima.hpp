#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "loadcast/nelder_mead.hpp"

namespace loadcast::arima {

struct ArimaSpec {
    int p = 2;
    int d = 2;
    int q = 1;

    void validate() const;
};

/// A fitted ARIMA(p,d,q). On the differenced scale w:
///   w_t = c + sum_i ar[i] w_{t-1-i} + e_t + sum_j ma[j] e_{t-1-j}
struct ArimaModel {
    ArimaSpec spec;
    std::vector<double> ar;
    std::vector<double> ma;
    double intercept = 0.0;
    /// Conditional sum of squares at the optimum.
    double css = 0.0;
    double sigma2 = 0.0;
    /// One-step residuals, one per differenced observation.
    std::vector<double> residuals;
    std::vector<double> differenced;
    std::vector<double> history;

    /// In-sample one-step predictions on the original scale. The first d entries have no
    /// predecessor and echo the observation.
    std::vector<double> fitted() const;
};

struct FitOptions {
    std::uint64_t seed = 42;
    /// Zero start plus (starts - 1) jittered ones.
    int starts = 5;
    double jitter = 0.3;
    optim::NelderMeadOptions simplex{};
};

std::vector<double> difference(std::span<const double> values, int d);

/// Inverts `difference`: integrates `forecasts` d times anchored at the last values of the
/// original series (`tail`, at least d long).
std::vector<double> undifference(std::span<const double> tail, int d, std::span<const double> forecasts);

/// Residual recursion with zero pre-sample values. Returns one residual per element of w.
std::vector<double> css_residuals(std::span<const double> ar, std::span<const double> ma, double intercept,
                                  std::span<const double> w);

/// Sum of squared residuals for t > max(p, q).
double css_loss(std::span<const double> ar, std::span<const double> ma, double intercept,
                std::span<const double> w);

/// True when every root of 1 + sign * (c_1 z + ... + c_k z^k) has modulus > 1 + 1e-6.
/// Use sign = -1 for AR polynomials and +1 for MA polynomials.
bool roots_outside_unit_circle(std::span<const double> coefficients, double sign);

ArimaModel fit(std::span<const double> values, const ArimaSpec& spec, const FitOptions& options = {});

std::vector<double> forecast(const ArimaModel& model, std::size_t horizon);

}  // namespace loadcast::arima
