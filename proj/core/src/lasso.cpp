#include "sgpvsel/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "sgpvsel/error.hpp"

namespace sgpvsel {

namespace {

double soft_threshold(double z, double lambda) noexcept
{
    if (z > lambda) {
        return z - lambda;
    }
    if (z < -lambda) {
        return z + lambda;
    }
    return 0.0;
}

std::vector<Index> support_of(const Vector& beta)
{
    std::vector<Index> active;
    for (Index j = 0; j < beta.size(); ++j) {
        if (beta(j) != 0.0) {
            active.push_back(j);
        }
    }
    return active;
}

// Coordinate descent in covariance form. The gradient g = X'(y - Xb)/n is
// kept current for every coordinate; a change in b_k costs one pass over the
// k-th Gram column, which is formed the first time b_k leaves zero.
// Active-set sweeps between attempts at the fixed-sign direct solve.
constexpr std::size_t kDirectRetry = 10;

class CovarianceSolver
{
public:
    CovarianceSolver(const Matrix& X, const Vector& y)
        : X_(X),
          inv_n_(1.0 / static_cast<double>(X.rows())),
          beta_(Vector::Zero(X.cols())),
          grad_(X.transpose() * y * inv_n_),
          diag_(X.colwise().squaredNorm().transpose() * inv_n_),
          gram_(static_cast<std::size_t>(X.cols()))
    {}

    // Returns sweeps used; `converged` reports whether tol was met.
    std::size_t solve(double lambda, const LassoOptions& options, bool& converged)
    {
        const double kkt_guard = 0.1 * options.tol;
        std::size_t sweeps = 0;
        converged = false;
        while (sweeps < options.max_iter) {
            const double change = sweep_all(lambda);
            ++sweeps;
            if (change < options.tol) {
                if (violation(lambda) <= kkt_guard) {
                    converged = true;
                    break;
                }
                continue;
            }
            sweeps += solve_active(lambda, options, options.max_iter - sweeps);
        }
        return sweeps;
    }

    const Vector& beta() const noexcept { return beta_; }

private:
    double update(Index j, double lambda)
    {
        const double d = diag_(j);
        if (d <= 0.0) {
            return 0.0;
        }
        const double old = beta_(j);
        const double fresh = soft_threshold(grad_(j) + d * old, lambda) / d;
        const double delta = fresh - old;
        if (delta != 0.0) {
            grad_.noalias() -= gram_column(j) * delta;
            beta_(j) = fresh;
        }
        return std::abs(delta);
    }

    double sweep_all(double lambda)
    {
        double change = 0.0;
        for (Index j = 0; j < beta_.size(); ++j) {
            change = std::max(change, update(j, lambda));
        }
        return change;
    }

    // Sweeps restricted to the current nonzero set until the largest change
    // drops below tol. Only the active gradient entries are read here, so the
    // sweeps run on the |A| x |A| Gram block and the full gradient is brought
    // up to date once at the end.
    std::size_t solve_active(double lambda, const LassoOptions& options, std::size_t budget)
    {
        std::vector<Index> active;
        for (Index j = 0; j < beta_.size(); ++j) {
            if (beta_(j) != 0.0) {
                active.push_back(j);
            }
        }
        const auto m = static_cast<Index>(active.size());
        if (m == 0 || budget == 0) {
            return 0;
        }
        Matrix block(m, m);
        Vector g(m), start(m), d(m);
        for (Index b = 0; b < m; ++b) {
            const Vector& col = gram_column(active[static_cast<std::size_t>(b)]);
            for (Index a = 0; a < m; ++a) {
                block(a, b) = col(active[static_cast<std::size_t>(a)]);
            }
            g(b) = grad_(active[static_cast<std::size_t>(b)]);
            start(b) = beta_(active[static_cast<std::size_t>(b)]);
            d(b) = diag_(active[static_cast<std::size_t>(b)]);
        }
        Vector b_active = start;

        // With the signs fixed the active stationarity conditions are linear,
        // G_AA b = c_A - lambda s. Take the direct solution when it keeps every
        // sign; the sweeps then confirm it (or repair rounding). Retried
        // periodically because the signs settle long before the magnitudes
        // do on ill-conditioned blocks.
        // Coordinates the sweeps have zeroed stay out of the system.
        auto try_direct = [&] {
            std::vector<Index> nz;
            for (Index b = 0; b < m; ++b) {
                if (b_active(b) != 0.0) {
                    nz.push_back(b);
                }
            }
            if (nz.empty()) {
                return;
            }
            const Vector sign = b_active(nz).array().sign();
            const Vector rhs = (g + block * b_active)(nz) - lambda * sign;
            const Eigen::LDLT<Matrix> ldlt(block(nz, nz));
            if (ldlt.info() != Eigen::Success) {
                return;
            }
            const Vector direct = ldlt.solve(rhs);
            if (direct.allFinite() && (direct.array() * sign.array() > 0.0).all()) {
                Vector next = Vector::Zero(m);
                next(nz) = direct;
                g += block * (b_active - next);
                b_active = next;
            }
        };

        std::size_t sweeps = 0;
        while (sweeps < budget) {
            if (sweeps % kDirectRetry == 0) {
                try_direct();
            }
            double change = 0.0;
            for (Index b = 0; b < m; ++b) {
                const double old = b_active(b);
                const double fresh = soft_threshold(g(b) + d(b) * old, lambda) / d(b);
                const double delta = fresh - old;
                if (delta != 0.0) {
                    g.noalias() -= block.col(b) * delta;
                    b_active(b) = fresh;
                    change = std::max(change, std::abs(delta));
                }
            }
            ++sweeps;
            if (change < options.tol) {
                break;
            }
        }

        for (Index b = 0; b < m; ++b) {
            const double delta = b_active(b) - start(b);
            if (delta != 0.0) {
                const Index j = active[static_cast<std::size_t>(b)];
                grad_.noalias() -= gram_column(j) * delta;
                beta_(j) = b_active(b);
            }
        }
        return sweeps;
    }

    double violation(double lambda) const
    {
        double worst = 0.0;
        for (Index j = 0; j < beta_.size(); ++j) {
            if (diag_(j) <= 0.0) {
                continue;
            }
            const double v = beta_(j) != 0.0
                ? std::abs(grad_(j) - lambda * (beta_(j) > 0.0 ? 1.0 : -1.0))
                : std::max(std::abs(grad_(j)) - lambda, 0.0);
            worst = std::max(worst, v);
        }
        return worst;
    }

    const Vector& gram_column(Index j)
    {
        auto& slot = gram_[static_cast<std::size_t>(j)];
        if (!slot) {
            slot = Vector(X_.transpose() * X_.col(j) * inv_n_);
        }
        return *slot;
    }

    const Matrix& X_;
    double inv_n_;
    Vector beta_;
    Vector grad_;
    Vector diag_;
    std::vector<std::optional<Vector>> gram_;
};

} // namespace

bool LassoPath::all_converged() const
{
    return std::all_of(converged.begin(), converged.end(), [](bool c) { return c; });
}

double default_grid_ratio(Index n, Index p) noexcept
{
    return n > p ? 1e-4 : 1e-2;
}

double lambda_max(const Matrix& X, const Vector& y)
{
    const Vector g = X.transpose() * y * (1.0 / static_cast<double>(X.rows()));
    return g.cwiseAbs().maxCoeff();
}

Vector lambda_grid(const Matrix& X, const Vector& y, Index length, double ratio)
{
    if (length < 2) {
        throw Error(ErrorCode::InvalidArgument, "lambda grid needs at least 2 points");
    }
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "lambda grid ratio must lie in (0, 1)");
    }
    const double top = lambda_max(X, y);
    if (!(top > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "outcome is orthogonal to every column; lambda_max is 0");
    }
    Vector grid(length);
    const double log_top = std::log(top);
    const double step = std::log(ratio) / static_cast<double>(length - 1);
    grid(0) = top;
    for (Index k = 1; k < length - 1; ++k) {
        grid(k) = std::exp(log_top + step * static_cast<double>(k));
    }
    grid(length - 1) = top * ratio;
    return grid;
}

Vector lambda_grid(const StandardizedDataset& data, Index length, double ratio)
{
    return lambda_grid(data.data.X(), data.data.y(), length, ratio);
}

Vector lambda_grid(const StandardizedDataset& data, const GridOptions& options)
{
    const double ratio = options.ratio > 0.0 ? options.ratio
                                             : default_grid_ratio(data.data.n(), data.data.p());
    return lambda_grid(data, options.length, ratio);
}

LassoPath cd_solve(const Matrix& X, const Vector& y, const Vector& lambdas, const LassoOptions& options)
{
    if (y.size() != X.rows()) {
        throw Error(ErrorCode::InvalidArgument, "outcome length does not match design rows");
    }
    if (lambdas.size() < 1) {
        throw Error(ErrorCode::InvalidArgument, "empty lambda grid");
    }
    if (!(options.tol > 0.0) || options.max_iter == 0) {
        throw Error(ErrorCode::InvalidArgument, "tol must be positive and max_iter nonzero");
    }
    for (Index k = 0; k < lambdas.size(); ++k) {
        if (!(lambdas(k) >= 0.0) || (k > 0 && !(lambdas(k) < lambdas(k - 1)))) {
            throw Error(ErrorCode::InvalidArgument, "lambdas must be nonnegative and strictly decreasing");
        }
    }

    const Index K = lambdas.size();
    LassoPath path;
    path.lambdas = lambdas;
    path.betas.resize(K, X.cols());
    path.active_sets.reserve(static_cast<std::size_t>(K));
    path.n_iters.reserve(static_cast<std::size_t>(K));
    path.converged.reserve(static_cast<std::size_t>(K));

    CovarianceSolver solver(X, y);
    for (Index k = 0; k < K; ++k) {
        bool converged = false;
        path.n_iters.push_back(solver.solve(lambdas(k), options, converged));
        path.converged.push_back(converged);
        path.betas.row(k) = solver.beta().transpose();
        path.active_sets.push_back(support_of(solver.beta()));
    }
    return path;
}

LassoPath cd_solve(const StandardizedDataset& data, const Vector& lambdas, const LassoOptions& options)
{
    return cd_solve(data.data.X(), data.data.y(), lambdas, options);
}

LassoPath weighted_cd_solve(const Matrix& X, const Vector& y, const Vector& weights,
                            const Vector& lambdas, const LassoOptions& options)
{
    if (weights.size() != X.cols()) {
        throw Error(ErrorCode::InvalidArgument, "one penalty weight per column required");
    }
    Matrix scaled(X.rows(), X.cols());
    for (Index j = 0; j < X.cols(); ++j) {
        if (!(weights(j) > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "penalty weights must be positive");
        }
        if (std::isinf(weights(j))) {
            scaled.col(j).setZero();
        } else {
            scaled.col(j) = X.col(j) / weights(j);
        }
    }
    LassoPath path = cd_solve(scaled, y, lambdas, options);
    for (Index j = 0; j < X.cols(); ++j) {
        if (std::isinf(weights(j))) {
            path.betas.col(j).setZero();
        } else {
            path.betas.col(j) /= weights(j);
        }
    }
    return path;
}

double kkt_violation(const Matrix& X, const Vector& y, const Vector& beta, double lambda)
{
    const Vector grad = X.transpose() * (y - X * beta) / static_cast<double>(X.rows());
    double worst = 0.0;
    for (Index j = 0; j < beta.size(); ++j) {
        const double v = beta(j) != 0.0
            ? std::abs(grad(j) - lambda * (beta(j) > 0.0 ? 1.0 : -1.0))
            : std::max(std::abs(grad(j)) - lambda, 0.0);
        worst = std::max(worst, v);
    }
    return worst;
}

double lasso_objective(const Matrix& X, const Vector& y, const Vector& beta, double lambda)
{
    return 0.5 * (y - X * beta).squaredNorm() / static_cast<double>(X.rows())
        + lambda * beta.lpNorm<1>();
}

double gic_value(double rss, Index n, Index p, Index df)
{
    if (n < 3) {
        throw Error(ErrorCode::DegenerateGic, "GIC needs n >= 3 so that log(log n) > 0");
    }
    const double nd = static_cast<double>(n);
    const double safe_rss = std::max(rss, std::numeric_limits<double>::min());
    return nd * std::log(safe_rss / nd)
        + static_cast<double>(df) * std::log(std::log(nd)) * std::log(static_cast<double>(p));
}

GicSelection gic_select(const LassoPath& path, const Matrix& X, const Vector& y)
{
    if (path.size() < 1) {
        throw Error(ErrorCode::InvalidArgument, "empty lasso path");
    }
    GicSelection sel;
    sel.gic_values.resize(path.size());
    double best = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < path.size(); ++k) {
        const double rss = (y - X * path.betas.row(k).transpose()).squaredNorm();
        const auto df = static_cast<Index>(path.active_sets[static_cast<std::size_t>(k)].size());
        const double value = gic_value(rss, X.rows(), X.cols(), df);
        sel.gic_values(k) = value;
        if (value < best) {
            best = value;
            sel.chosen_index = k;
        }
    }
    sel.lambda_gic = path.lambdas(sel.chosen_index);
    sel.candidate_set = path.active_sets[static_cast<std::size_t>(sel.chosen_index)];
    return sel;
}

GicSelection gic_select(const LassoPath& path, const StandardizedDataset& data)
{
    return gic_select(path, data.data.X(), data.data.y());
}

} // namespace sgpvsel
