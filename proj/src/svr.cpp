#include "loadcast/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "loadcast/crossval.hpp"
#include "loadcast/error.hpp"

namespace loadcast::svr {

namespace {

constexpr double kTau = 1e-12;
constexpr double kPruneThreshold = 1e-12;

struct Standardizer {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd scale;
};

Standardizer column_stats(const Eigen::MatrixXd& X) {
    Standardizer s;
    s.mean = X.colwise().mean();
    s.scale.resize(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double var = (X.col(j).array() - s.mean(j)).square().mean();
        s.scale(j) = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return s;
}

double kernel_value(const SvrParams& params, const Eigen::RowVectorXd& u, const Eigen::RowVectorXd& v) {
    if (params.kernel == Kernel::Linear) return u.dot(v);
    return std::exp(-*params.gamma * (u - v).squaredNorm());
}

}  // namespace

void SvrParams::validate() const {
    if (!(C > 0.0)) throw ValidationError("SVR C must be > 0");
    if (!(epsilon >= 0.0)) throw ValidationError("SVR epsilon must be >= 0");
    if (gamma && !(*gamma > 0.0)) throw ValidationError("SVR gamma must be > 0");
    if (!(tol > 0.0)) throw ValidationError("SVR tolerance must be > 0");
    if (max_passes < 1) throw ValidationError("SVR max passes must be >= 1");
}

double rbf(std::span<const double> u, std::span<const double> v, double gamma) {
    if (u.size() != v.size()) throw ValidationError("rbf dimension mismatch");
    double sq = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) sq += (u[i] - v[i]) * (u[i] - v[i]);
    return std::exp(-gamma * sq);
}

double SvrModel::decision(const Eigen::RowVectorXd& standardized_row) const {
    double sum = bias;
    for (Eigen::Index i = 0; i < support.rows(); ++i) {
        sum += coefficients(i) * kernel_value(params, support.row(i), standardized_row);
    }
    return sum;
}

double SvrModel::predict(std::span<const double> x) const {
    if (static_cast<Eigen::Index>(x.size()) != x_mean.size()) throw ValidationError("SVR input dimension mismatch");
    Eigen::RowVectorXd row(x_mean.size());
    for (Eigen::Index j = 0; j < row.size(); ++j) row(j) = (x[static_cast<std::size_t>(j)] - x_mean(j)) / x_scale(j);
    return y_mean + y_scale * decision(row);
}

Eigen::VectorXd SvrModel::predict(const Eigen::MatrixXd& rows) const {
    if (rows.cols() != x_mean.size()) throw ValidationError("SVR input dimension mismatch");
    Eigen::VectorXd out(rows.rows());
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        const Eigen::RowVectorXd row = (rows.row(i) - x_mean).cwiseQuotient(x_scale);
        out(i) = y_mean + y_scale * decision(row);
    }
    return out;
}

SvrModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const SvrParams& params, FitTrace* trace) {
    params.validate();
    const Eigen::Index l = X.rows();
    if (l < 1) throw ValidationError("SVR needs at least one training row");
    if (y.size() != l) throw ValidationError("SVR target length does not match rows");

    SvrModel model;
    model.params = params;
    if (!model.params.gamma) model.params.gamma = 1.0 / static_cast<double>(std::max<Eigen::Index>(1, X.cols()));

    const auto stats = column_stats(X);
    model.x_mean = stats.mean;
    model.x_scale = stats.scale;
    model.y_mean = y.mean();
    const double y_var = (y.array() - model.y_mean).square().mean();
    model.y_scale = y_var > 0.0 ? std::sqrt(y_var) : 1.0;

    Eigen::MatrixXd Z(l, X.cols());
    for (Eigen::Index i = 0; i < l; ++i) Z.row(i) = (X.row(i) - stats.mean).cwiseQuotient(stats.scale);
    const Eigen::VectorXd target = (y.array() - model.y_mean) / model.y_scale;

    Eigen::MatrixXd K(l, l);
    for (Eigen::Index i = 0; i < l; ++i) {
        for (Eigen::Index j = i; j < l; ++j) K(i, j) = K(j, i) = kernel_value(model.params, Z.row(i), Z.row(j));
    }

    // Variables 0..l-1 are alpha (sign +1), l..2l-1 are alpha* (sign -1).
    const Eigen::Index n2 = 2 * l;
    const double C = params.C;
    const double eps = params.epsilon;
    std::vector<double> alpha(static_cast<std::size_t>(n2), 0.0);
    std::vector<double> sign(static_cast<std::size_t>(n2));
    std::vector<double> linear(static_cast<std::size_t>(n2));
    for (Eigen::Index i = 0; i < l; ++i) {
        sign[static_cast<std::size_t>(i)] = 1.0;
        sign[static_cast<std::size_t>(i + l)] = -1.0;
        linear[static_cast<std::size_t>(i)] = eps - target(i);
        linear[static_cast<std::size_t>(i + l)] = eps + target(i);
    }
    std::vector<double> grad(linear);
    auto Q = [&](Eigen::Index a, Eigen::Index b) {
        return sign[static_cast<std::size_t>(a)] * sign[static_cast<std::size_t>(b)] * K(a % l, b % l);
    };
    auto in_up = [&](std::size_t t) { return sign[t] > 0 ? alpha[t] < C : alpha[t] > 0.0; };
    auto in_low = [&](std::size_t t) { return sign[t] > 0 ? alpha[t] > 0.0 : alpha[t] < C; };
    auto objective = [&] {
        // Maximized dual: -(1/2 a'Qa + p'a) = -1/2 sum a_t (G_t + p_t).
        double sum = 0.0;
        for (std::size_t t = 0; t < alpha.size(); ++t) sum += alpha[t] * (grad[t] + linear[t]);
        return -0.5 * sum;
    };
    if (trace) trace->objective.push_back(objective());

    const long max_iterations = static_cast<long>(params.max_passes) * std::max<long>(n2, 100);
    double violation = 0.0;
    long iter = 0;
    for (;; ++iter) {
        // Maximal violating pair: i maximizes -y G over I_up, j minimizes it over I_low.
        double g_max = -std::numeric_limits<double>::infinity();
        double g_min = std::numeric_limits<double>::infinity();
        std::size_t i = 0, j = 0;
        for (std::size_t t = 0; t < alpha.size(); ++t) {
            const double v = -sign[t] * grad[t];
            if (in_up(t) && v > g_max) {
                g_max = v;
                i = t;
            }
            if (in_low(t) && v < g_min) {
                g_min = v;
                j = t;
            }
        }
        violation = std::max(0.0, g_max - g_min);
        if (g_max - g_min <= params.tol) break;
        if (iter >= max_iterations) {
            throw NumericError("SVR SMO did not converge; largest KKT violation " + std::to_string(violation));
        }

        const auto ii = static_cast<Eigen::Index>(i);
        const auto jj = static_cast<Eigen::Index>(j);
        const double old_i = alpha[i];
        const double old_j = alpha[j];
        if (sign[i] != sign[j]) {
            double quad = Q(ii, ii) + Q(jj, jj) + 2.0 * Q(ii, jj);
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = C - diff;
                }
            } else if (alpha[j] > C) {
                alpha[j] = C;
                alpha[i] = C + diff;
            }
        } else {
            double quad = Q(ii, ii) + Q(jj, jj) - 2.0 * Q(ii, jj);
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = sum - C;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > C) {
                if (alpha[j] > C) {
                    alpha[j] = C;
                    alpha[i] = sum - C;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        const double d_i = alpha[i] - old_i;
        const double d_j = alpha[j] - old_j;
        for (Eigen::Index t = 0; t < n2; ++t) grad[static_cast<std::size_t>(t)] += Q(t, ii) * d_i + Q(t, jj) * d_j;
        if (trace) trace->objective.push_back(objective());
    }

    // Bias from free variables, or the midpoint of the feasible interval when none are free.
    double upper = std::numeric_limits<double>::infinity();
    double lower = -std::numeric_limits<double>::infinity();
    double free_sum = 0.0;
    int free_count = 0;
    for (std::size_t t = 0; t < alpha.size(); ++t) {
        const double yg = sign[t] * grad[t];
        if (alpha[t] >= C) {
            if (sign[t] < 0) upper = std::min(upper, yg);
            else lower = std::max(lower, yg);
        } else if (alpha[t] <= 0.0) {
            if (sign[t] > 0) upper = std::min(upper, yg);
            else lower = std::max(lower, yg);
        } else {
            ++free_count;
            free_sum += yg;
        }
    }
    const double rho = free_count > 0 ? free_sum / free_count : 0.5 * (upper + lower);
    model.bias = -rho;

    model.dual.resize(l);
    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < l; ++i) {
        model.dual(i) = alpha[static_cast<std::size_t>(i)] - alpha[static_cast<std::size_t>(i + l)];
        if (std::abs(model.dual(i)) >= kPruneThreshold) kept.push_back(i);
    }
    model.support.resize(static_cast<Eigen::Index>(kept.size()), X.cols());
    model.coefficients.resize(static_cast<Eigen::Index>(kept.size()));
    for (std::size_t k = 0; k < kept.size(); ++k) {
        model.support.row(static_cast<Eigen::Index>(k)) = Z.row(kept[k]);
        model.coefficients(static_cast<Eigen::Index>(k)) = model.dual(kept[k]);
    }
    model.kkt_violation = violation;
    model.iterations = iter;
    return model;
}

std::vector<SvrParams> default_grid(std::size_t columns) {
    const double base = 1.0 / static_cast<double>(std::max<std::size_t>(1, columns));
    std::vector<SvrParams> grid;
    for (double C : {1.0, 10.0, 100.0}) {
        for (double eps : {0.01, 0.05, 0.1}) {
            for (double g : {0.5, 1.0, 2.0}) {
                SvrParams p;
                p.C = C;
                p.epsilon = eps;
                p.gamma = g * base;
                grid.push_back(p);
            }
        }
    }
    return grid;
}

GridSearchResult grid_search(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::span<const SvrParams> grid,
                             std::size_t k, std::uint64_t seed) {
    if (grid.empty()) throw ValidationError("SVR grid is empty");
    if (k < 2) throw ValidationError("grid search needs k >= 2");
    if (static_cast<std::size_t>(y.size()) < k) throw ValidationError("grid search needs at least k rows");

    GridSearchResult result;
    const double default_gamma = 1.0 / static_cast<double>(std::max<Eigen::Index>(1, X.cols()));
    auto gamma_of = [&](const SvrParams& p) { return p.gamma.value_or(default_gamma); };

    std::size_t best = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double score = std::numeric_limits<double>::infinity();
        try {
            score = evalstat::cross_val_rmse(
                X, y, k, seed, [&](const Eigen::MatrixXd& Xt, const Eigen::VectorXd& yt) { return fit(Xt, yt, grid[g]); },
                [](const SvrModel& m, const Eigen::MatrixXd& Xv) { return m.predict(Xv); });
        } catch (const std::runtime_error&) {
            // scored as +inf
        }
        result.scores.push_back(score);
        if (g == 0) continue;
        const SvrParams& a = grid[g];
        const SvrParams& b = grid[best];
        const double sb = result.scores[best];
        bool better = score < sb;
        if (score == sb) {
            if (a.C != b.C) better = a.C < b.C;
            else if (gamma_of(a) != gamma_of(b)) better = gamma_of(a) < gamma_of(b);
            else better = a.epsilon > b.epsilon;
        }
        if (better) best = g;
    }
    result.best = grid[best];
    return result;
}

}  // namespace loadcast::svr
