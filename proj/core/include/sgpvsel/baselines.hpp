#pragma once

#include <vector>

#include "sgpvsel/lasso.hpp"
#include "sgpvsel/linalg.hpp"
#include "sgpvsel/model.hpp"

namespace sgpvsel {

enum class InitialEstimator { Lasso, Ols };

struct AdaptiveLassoConfig
{
    double gamma = 1.0;
    InitialEstimator initial = InitialEstimator::Lasso;
    GridOptions grid;
    LassoOptions lasso;
    /// Report an original-scale OLS refit on the selected set instead of the
    /// penalized estimates.
    bool ols_refit = false;
};

struct AdaptiveLassoFit
{
    FittedModel model;
    Vector initial;               ///< standardized-scale initial estimates
    Vector weights;               ///< 1 / |initial|^gamma, +inf where initial is 0
    double gamma = 1.0;
    double lambda = 0.0;          ///< GIC-chosen penalty on the weighted path
    LassoPath path;               ///< weighted path on the standardized scale
    Index chosen_index = 0;
    bool all_weights_infinite = false;
};

/// Adaptive lasso on the standardized data with weights from a lasso-GIC (or
/// OLS) initial fit, tuned by GIC over its own path. An empty initial fit
/// returns the intercept-only model with all_weights_infinite set.
AdaptiveLassoFit adaptive_lasso_fit(const Dataset& data, const AdaptiveLassoConfig& config = {});

struct LassoGicFit
{
    FittedModel model;            ///< penalized estimates on the original scale
    double lambda = 0.0;
    LassoPath path;
    GicSelection gic;
};

/// Plain lasso at lambda_gic with coefficients mapped back to the original scale.
LassoGicFit lasso_gic_fit(const Dataset& data, const GridOptions& grid = {}, const LassoOptions& lasso = {});

/// OLS with intercept on exactly `true_support`. Throws Underdetermined when
/// |true_support| >= n.
OlsFit oracle_ols(const Dataset& data, const std::vector<Index>& true_support);

/// oracle_ols spread into an original-scale FittedModel.
FittedModel oracle_model(const Dataset& data, const std::vector<Index>& true_support);

} // namespace sgpvsel
