#pragma once

#include <cstddef>
#include <vector>

#include "sgpvsel/linalg.hpp"

namespace sgpvsel {

/// Solutions of (1/2n)||y - X b||^2 + lambda ||b||_1 along a decreasing grid.
struct LassoPath
{
    Vector lambdas;                          ///< strictly decreasing
    Matrix betas;                            ///< K x p, row k solves lambdas(k)
    std::vector<std::vector<Index>> active_sets;
    std::vector<std::size_t> n_iters;        ///< coordinate sweeps spent per lambda
    std::vector<bool> converged;

    Index size() const noexcept { return lambdas.size(); }
    Index p() const noexcept { return betas.cols(); }
    bool all_converged() const;
};

struct LassoOptions
{
    double tol = 1e-7;              ///< max coefficient change per sweep
    std::size_t max_iter = 100000;  ///< coordinate sweeps per lambda
};

struct GridOptions
{
    Index length = 100;
    /// lambda_min / lambda_max; unset picks 1e-4 when n > p, 1e-2 otherwise.
    double ratio = 0.0;
};

/// max_j |X_j' y| / n, the smallest penalty with an all-zero solution.
double lambda_max(const Matrix& X, const Vector& y);

/// Geometric grid from lambda_max(X, y) down to lambda_max * ratio.
Vector lambda_grid(const Matrix& X, const Vector& y, Index length, double ratio);
Vector lambda_grid(const StandardizedDataset& data, Index length, double ratio);
Vector lambda_grid(const StandardizedDataset& data, const GridOptions& options = {});

double default_grid_ratio(Index n, Index p) noexcept;

/// Warm-started cyclic coordinate descent along `lambdas`.
///
/// Columns need not be standardized; each coordinate is scaled by its own
/// X_j'X_j / n. Columns with zero norm stay at zero. A lambda whose sweep
/// budget runs out is flagged in `converged` instead of throwing.
LassoPath cd_solve(const Matrix& X, const Vector& y, const Vector& lambdas,
                   const LassoOptions& options = {});
LassoPath cd_solve(const StandardizedDataset& data, const Vector& lambdas,
                   const LassoOptions& options = {});

/// Weighted-penalty path: lambda * sum_j w_j |b_j|. Solved by rescaling
/// column j to X_j / w_j, running cd_solve, and mapping coefficients back.
/// Infinite weights pin the coefficient at zero.
LassoPath weighted_cd_solve(const Matrix& X, const Vector& y, const Vector& weights,
                            const Vector& lambdas, const LassoOptions& options = {});

/// Largest stationarity violation of `beta` at `lambda`, recomputed from
/// scratch: |g_j - lambda sign(b_j)| on the active set and
/// max(|g_j| - lambda, 0) elsewhere, with g = X'(y - X b) / n.
double kkt_violation(const Matrix& X, const Vector& y, const Vector& beta, double lambda);

/// (1/2n)||y - X b||^2 + lambda ||b||_1.
double lasso_objective(const Matrix& X, const Vector& y, const Vector& beta, double lambda);

struct GicSelection
{
    double lambda_gic = 0.0;
    Vector gic_values;
    Index chosen_index = 0;
    std::vector<Index> candidate_set;
};

/// GIC(lambda) = n log(RSS / n) + |A| log(log n) log(p); the first minimum
/// along the grid wins, so ties go to the larger penalty.
GicSelection gic_select(const LassoPath& path, const Matrix& X, const Vector& y);
GicSelection gic_select(const LassoPath& path, const StandardizedDataset& data);

/// GIC for one fit; exposed for tests and for ranking other candidate models.
double gic_value(double rss, Index n, Index p, Index df);

} // namespace sgpvsel
