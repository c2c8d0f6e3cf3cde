#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "sgpvsel/lasso.hpp"
#include "sgpvsel/linalg.hpp"
#include "sgpvsel/model.hpp"
#include "sgpvsel/sgpv.hpp"

namespace sgpvsel {

struct ProSgpvConfig
{
    NullBound null_bound = NullBound::SeBar;
    GridOptions grid;
    LassoOptions lasso;
    ScreenOptions screen;
    /// Candidate cap applied when the stage-one set has >= n members;
    /// 0 means n / 2.
    Index max_candidates = 0;
};

enum class StageMode { TwoStage, OneStage };

std::string_view to_string(StageMode mode) noexcept;

/// Output of a stage-one screener on the standardized data.
struct CandidateSet
{
    std::vector<Index> columns;     ///< ascending
    double lambda = 0.0;            ///< penalty that produced the set (0 for none)
    Vector coefficients;            ///< standardized-scale stage-one estimates, length p
    bool truncated = false;
};

using CandidateProvider = std::function<CandidateSet(const StandardizedDataset&, const ProSgpvConfig&)>;

/// Lasso path + GIC: the active set at lambda_gic.
CandidateSet lasso_gic_candidates(const StandardizedDataset& data, const ProSgpvConfig& config);

struct SelectionResult
{
    FittedModel model;
    OlsFit refit;                       ///< original-scale OLS on the selected columns
    std::vector<Index> stage1_candidate_set;
    double stage1_lambda = 0.0;
    bool stage1_truncated = false;
    std::optional<OlsFit> candidate_fit;  ///< standardized OLS on the candidate set
    SgpvReport sgpv_report;
    StageMode mode = StageMode::TwoStage;

    const std::vector<Index>& selected() const noexcept { return model.selected; }
};

/// Two-stage selection: lasso-GIC candidates, SGPV screening of their
/// standardized OLS fit, then an original-scale OLS refit with intercept on
/// the survivors. An empty candidate or selected set yields the
/// intercept-only model.
SelectionResult fit_two_stage(const Dataset& data, const ProSgpvConfig& config = {});

/// Same pipeline with a caller-supplied stage-one screener.
SelectionResult fit_two_stage(const Dataset& data, const ProSgpvConfig& config,
                              const CandidateProvider& provider);

/// Screens the full OLS fit directly. Throws Underdetermined when p >= n.
SelectionResult fit_one_stage(const Dataset& data, const ProSgpvConfig& config = {});

/// Original-scale OLS with intercept on `selected`, spread into a length-p
/// coefficient vector.
FittedModel refit_original_scale(const Dataset& data, const std::vector<Index>& selected,
                                 OlsFit* refit_out = nullptr);

} // namespace sgpvsel
