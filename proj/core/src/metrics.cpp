#include "sgpvsel/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "sgpvsel/error.hpp"

namespace sgpvsel {

double mean_absolute_error(const Vector& estimate, const Vector& truth)
{
    if (estimate.size() != truth.size() || truth.size() == 0) {
        throw Error(ErrorCode::InvalidArgument, "coefficient vectors must have equal nonzero length");
    }
    return (estimate - truth).cwiseAbs().mean();
}

double prediction_rmse(const FittedModel& fit, const Dataset& test)
{
    const Vector resid = test.y() - fit.predict(test.X());
    return std::sqrt(resid.squaredNorm() / static_cast<double>(resid.size()));
}

MetricsRecord eval_metrics(const FittedModel& fit, const TrueModel& truth, const Dataset& test,
                           const FittedModel* oracle)
{
    const Index p = truth.beta0.size();
    if (fit.coefficients.size() != p || test.p() != p) {
        throw Error(ErrorCode::InvalidArgument, "fit, truth and test data disagree on p");
    }
    std::vector<bool> in_truth(static_cast<std::size_t>(p), false);
    for (Index j : truth.support) {
        in_truth[static_cast<std::size_t>(j)] = true;
    }
    Index true_pos = 0;
    Index false_pos = 0;
    for (Index j : fit.selected) {
        if (in_truth[static_cast<std::size_t>(j)]) {
            ++true_pos;
        } else {
            ++false_pos;
        }
    }
    const auto s = static_cast<Index>(truth.support.size());
    const auto selected = static_cast<Index>(fit.selected.size());
    const Index false_neg = s - true_pos;
    auto ratio = [](Index num, Index den) {
        return static_cast<double>(num) / static_cast<double>(std::max<Index>(den, 1));
    };

    MetricsRecord rec;
    rec.selected_size = selected;
    rec.captured = false_pos == 0 && false_neg == 0;
    rec.power = ratio(true_pos, s);
    rec.type1 = ratio(false_pos, p - s);
    rec.pfdr = ratio(false_pos, selected);
    rec.pfnr = ratio(false_neg, p - selected);
    rec.mae = mean_absolute_error(fit.coefficients, truth.beta0);
    rec.test_rmse = prediction_rmse(fit, test);

    if (oracle != nullptr) {
        const double oracle_mae = mean_absolute_error(oracle->coefficients, truth.beta0);
        if (oracle_mae > 0.0) {
            rec.relative_mae = rec.mae / oracle_mae;
        }
        const double oracle_rmse = prediction_rmse(*oracle, test);
        if (oracle_rmse > 0.0) {
            rec.relative_rmse = rec.test_rmse / oracle_rmse;
        }
    }
    return rec;
}

} // namespace sgpvsel
