#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sgpvsel/generate.hpp"
#include "sgpvsel/linalg.hpp"
#include "sgpvsel/model.hpp"

namespace sgpvsel {

struct MetricsRecord
{
    bool captured = false;   ///< selected set equals the true support
    double power = 0.0;      ///< |S ∩ S0| / max(s, 1)
    double type1 = 0.0;      ///< |S \ S0| / max(p - s, 1)
    double pfdr = 0.0;       ///< |S \ S0| / max(|S|, 1)
    double pfnr = 0.0;       ///< |S0 \ S| / max(p - |S|, 1)
    double mae = 0.0;        ///< mean |b_j - b0_j| over all p coefficients
    std::optional<double> relative_mae;
    double test_rmse = 0.0;
    std::optional<double> relative_rmse;
    double runtime_seconds = 0.0;
    Index selected_size = 0;
};

/// Support-recovery, estimation and prediction metrics for one fit.
/// `oracle` is the true-support OLS fit on the same training data; when its
/// MAE or RMSE is zero the matching relative metric is left empty.
MetricsRecord eval_metrics(const FittedModel& fit, const TrueModel& truth, const Dataset& test,
                           const FittedModel* oracle = nullptr);

double mean_absolute_error(const Vector& estimate, const Vector& truth);
double prediction_rmse(const FittedModel& fit, const Dataset& test);

} // namespace sgpvsel
