#include "sgpvsel/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sgpvsel/error.hpp"
#include "sgpvsel/prosgpv.hpp"

namespace sgpvsel {

namespace {

FittedModel to_original(const StandardizedDataset& std_data, const Vector& beta_std)
{
    FittedModel model;
    model.coefficients = std_data.slopes_to_original(beta_std);
    model.intercept = std_data.intercept_for(model.coefficients);
    for (Index j = 0; j < beta_std.size(); ++j) {
        if (beta_std(j) != 0.0) {
            model.selected.push_back(j);
        }
    }
    return model;
}

} // namespace

AdaptiveLassoFit adaptive_lasso_fit(const Dataset& data, const AdaptiveLassoConfig& config)
{
    if (!(config.gamma > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "adaptive lasso gamma must be positive");
    }
    if (data.n() < 3) {
        throw Error(ErrorCode::TooFewRows, "adaptive lasso needs n >= 3");
    }
    const StandardizedDataset std_data = standardize(data);
    const Matrix& X = std_data.data.X();
    const Vector& y = std_data.data.y();
    const Index p = X.cols();

    AdaptiveLassoFit fit;
    fit.gamma = config.gamma;
    if (config.initial == InitialEstimator::Ols) {
        if (p >= data.n()) {
            throw Error(ErrorCode::Underdetermined, "OLS initial weights need p < n");
        }
        fit.initial = ols_fit(X, y, false).beta_hat;
    } else {
        ProSgpvConfig stage_one;
        stage_one.grid = config.grid;
        stage_one.lasso = config.lasso;
        fit.initial = lasso_gic_candidates(std_data, stage_one).coefficients;
    }

    fit.weights.resize(p);
    Matrix rescaled(X.rows(), p);
    for (Index j = 0; j < p; ++j) {
        const double magnitude = std::abs(fit.initial(j));
        if (magnitude == 0.0) {
            fit.weights(j) = std::numeric_limits<double>::infinity();
            rescaled.col(j).setZero();
        } else {
            fit.weights(j) = 1.0 / std::pow(magnitude, config.gamma);
            rescaled.col(j) = X.col(j) / fit.weights(j);
        }
    }

    if (std::all_of(fit.weights.begin(), fit.weights.end(), [](double w) { return std::isinf(w); })) {
        fit.all_weights_infinite = true;
        fit.model = refit_original_scale(data, {});
        return fit;
    }

    const double ratio = config.grid.ratio > 0.0 ? config.grid.ratio : default_grid_ratio(data.n(), p);
    const Vector grid = lambda_grid(rescaled, y, config.grid.length, ratio);
    fit.path = weighted_cd_solve(X, y, fit.weights, grid, config.lasso);
    const GicSelection gic = gic_select(fit.path, X, y);
    fit.chosen_index = gic.chosen_index;
    fit.lambda = gic.lambda_gic;

    const Vector beta_std = fit.path.betas.row(gic.chosen_index).transpose();
    fit.model = to_original(std_data, beta_std);
    if (config.ols_refit) {
        fit.model = refit_original_scale(data, fit.model.selected);
    }
    return fit;
}

LassoGicFit lasso_gic_fit(const Dataset& data, const GridOptions& grid, const LassoOptions& lasso)
{
    if (data.n() < 3) {
        throw Error(ErrorCode::TooFewRows, "lasso-GIC needs n >= 3");
    }
    const StandardizedDataset std_data = standardize(data);
    LassoGicFit fit;
    fit.path = cd_solve(std_data, lambda_grid(std_data, grid), lasso);
    fit.gic = gic_select(fit.path, std_data);
    fit.lambda = fit.gic.lambda_gic;
    fit.model = to_original(std_data, fit.path.betas.row(fit.gic.chosen_index).transpose());
    return fit;
}

OlsFit oracle_ols(const Dataset& data, const std::vector<Index>& true_support)
{
    if (static_cast<Index>(true_support.size()) >= data.n()) {
        throw Error(ErrorCode::Underdetermined, "oracle OLS needs |support| < n");
    }
    return ols_fit(columns_of(data.X(), true_support), data.y(), true);
}

FittedModel oracle_model(const Dataset& data, const std::vector<Index>& true_support)
{
    if (static_cast<Index>(true_support.size()) >= data.n()) {
        throw Error(ErrorCode::Underdetermined, "oracle OLS needs |support| < n");
    }
    return refit_original_scale(data, true_support);
}

} // namespace sgpvsel
