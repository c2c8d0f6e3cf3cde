#include "sgpvsel/prosgpv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sgpvsel/error.hpp"

namespace sgpvsel {

namespace {

// Keep the `limit` columns with the largest |stage-one coefficient|, ties to
// the lower index, returned in ascending order.
std::vector<Index> truncate_candidates(const std::vector<Index>& columns, const Vector& coefficients,
                                       Index limit)
{
    std::vector<Index> ranked = columns;
    std::stable_sort(ranked.begin(), ranked.end(), [&](Index a, Index b) {
        return std::abs(coefficients(a)) > std::abs(coefficients(b));
    });
    ranked.resize(static_cast<std::size_t>(limit));
    std::sort(ranked.begin(), ranked.end());
    return ranked;
}

SelectionResult screen_candidates(const Dataset& data, const StandardizedDataset& std_data,
                                  const ProSgpvConfig& config, CandidateSet candidates, StageMode mode)
{
    SelectionResult result;
    result.mode = mode;
    result.stage1_lambda = candidates.lambda;

    const Index n = data.n();
    if (static_cast<Index>(candidates.columns.size()) >= n) {
        const Index limit = config.max_candidates > 0 ? config.max_candidates : n / 2;
        if (limit >= n) {
            throw Error(ErrorCode::CandidateTooLarge, "candidate cap must be below n");
        }
        candidates.columns = truncate_candidates(candidates.columns, candidates.coefficients, limit);
        candidates.truncated = true;
    }
    result.stage1_candidate_set = candidates.columns;
    result.stage1_truncated = candidates.truncated;

    std::vector<Index> selected;
    if (!candidates.columns.empty()) {
        const Dataset cand = std_data.data.select_columns(candidates.columns);
        OlsFit fit = ols_fit(cand, false);
        const double bound = null_bound(fit, config.null_bound, n, data.p());
        result.sgpv_report = screen(fit, candidates.columns, bound, config.screen);
        selected = result.sgpv_report.kept();
        result.candidate_fit = std::move(fit);
    }
    result.model = refit_original_scale(data, selected, &result.refit);
    return result;
}

} // namespace

std::string_view to_string(StageMode mode) noexcept
{
    return mode == StageMode::TwoStage ? "two_stage" : "one_stage";
}

CandidateSet lasso_gic_candidates(const StandardizedDataset& data, const ProSgpvConfig& config)
{
    const Vector grid = lambda_grid(data, config.grid);
    const LassoPath path = cd_solve(data, grid, config.lasso);
    const GicSelection gic = gic_select(path, data);
    CandidateSet out;
    out.columns = gic.candidate_set;
    out.lambda = gic.lambda_gic;
    out.coefficients = path.betas.row(gic.chosen_index).transpose();
    return out;
}

FittedModel refit_original_scale(const Dataset& data, const std::vector<Index>& selected, OlsFit* refit_out)
{
    FittedModel model;
    model.selected = selected;
    std::sort(model.selected.begin(), model.selected.end());
    model.coefficients = Vector::Zero(data.p());
    OlsFit fit = ols_fit(columns_of(data.X(), model.selected), data.y(), true);
    for (std::size_t k = 0; k < model.selected.size(); ++k) {
        model.coefficients(model.selected[k]) = fit.beta_hat(static_cast<Index>(k));
    }
    model.intercept = *fit.intercept;
    if (refit_out != nullptr) {
        *refit_out = std::move(fit);
    }
    return model;
}

SelectionResult fit_two_stage(const Dataset& data, const ProSgpvConfig& config)
{
    return fit_two_stage(data, config, lasso_gic_candidates);
}

SelectionResult fit_two_stage(const Dataset& data, const ProSgpvConfig& config, const CandidateProvider& provider)
{
    if (data.n() < 3) {
        throw Error(ErrorCode::TooFewRows, "two-stage selection needs n >= 3");
    }
    const StandardizedDataset std_data = standardize(data);
    CandidateSet candidates = provider(std_data, config);
    std::sort(candidates.columns.begin(), candidates.columns.end());
    return screen_candidates(data, std_data, config, std::move(candidates), StageMode::TwoStage);
}

SelectionResult fit_one_stage(const Dataset& data, const ProSgpvConfig& config)
{
    if (data.p() >= data.n()) {
        throw Error(ErrorCode::Underdetermined, "one-stage selection needs p < n");
    }
    const StandardizedDataset std_data = standardize(data);
    CandidateSet all;
    all.columns.resize(static_cast<std::size_t>(data.p()));
    std::iota(all.columns.begin(), all.columns.end(), Index{0});
    all.coefficients = Vector::Zero(data.p());
    return screen_candidates(data, std_data, config, std::move(all), StageMode::OneStage);
}

} // namespace sgpvsel
