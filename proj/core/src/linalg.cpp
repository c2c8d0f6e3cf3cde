#include "sgpvsel/linalg.hpp"

#include <cmath>
#include <limits>
#include <unordered_set>

#include "sgpvsel/error.hpp"

namespace sgpvsel {

namespace {

constexpr double kConstantColumnSd = 1e-12;

} // namespace

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::ConstantColumn: return "ConstantColumn";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::Underdetermined: return "Underdetermined";
    case ErrorCode::DegenerateGic: return "DegenerateGic";
    case ErrorCode::ZeroLengthInterval: return "ZeroLengthInterval";
    case ErrorCode::EmptyCandidateSet: return "EmptyCandidateSet";
    case ErrorCode::CandidateTooLarge: return "CandidateTooLarge";
    case ErrorCode::AllWeightsInfinite: return "AllWeightsInfinite";
    case ErrorCode::OracleDenominatorZero: return "OracleDenominatorZero";
    case ErrorCode::NonNumericColumn: return "NonNumericColumn";
    case ErrorCode::OutcomeMissing: return "OutcomeMissing";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

std::vector<std::string> default_column_names(Index p)
{
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) {
        names.push_back("V" + std::to_string(j + 1));
    }
    return names;
}

Matrix columns_of(const Matrix& X, std::span<const Index> columns)
{
    Matrix sub(X.rows(), static_cast<Index>(columns.size()));
    for (std::size_t k = 0; k < columns.size(); ++k) {
        sub.col(static_cast<Index>(k)) = X.col(columns[k]);
    }
    return sub;
}

Dataset::Dataset(Vector y, Matrix X, std::vector<std::string> column_names)
    : y_(std::move(y)), X_(std::move(X)), names_(std::move(column_names))
{
    if (X_.rows() < 1 || X_.cols() < 1) {
        throw Error(ErrorCode::InvalidArgument, "dataset needs n >= 1 and p >= 1");
    }
    if (y_.size() != X_.rows()) {
        throw Error(ErrorCode::InvalidArgument, "outcome length does not match design rows");
    }
    if (!y_.allFinite() || !X_.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, "dataset contains non-finite values");
    }
    if (static_cast<Index>(names_.size()) != X_.cols()) {
        throw Error(ErrorCode::InvalidArgument, "column_names must have exactly p entries");
    }
    std::unordered_set<std::string> seen(names_.begin(), names_.end());
    if (seen.size() != names_.size()) {
        throw Error(ErrorCode::InvalidArgument, "column_names must be unique");
    }
}

Dataset::Dataset(Vector y, Matrix X)
    : Dataset(std::move(y), X, default_column_names(X.cols()))
{}

Dataset Dataset::select_columns(std::span<const Index> columns) const
{
    std::vector<std::string> names;
    names.reserve(columns.size());
    for (Index c : columns) {
        names.push_back(names_[static_cast<std::size_t>(c)]);
    }
    return Dataset(y_, columns_of(X_, columns), std::move(names));
}

Dataset Dataset::select_rows(std::span<const Index> rows) const
{
    Matrix sub(static_cast<Index>(rows.size()), p());
    Vector ysub(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        sub.row(static_cast<Index>(i)) = X_.row(rows[i]);
        ysub(static_cast<Index>(i)) = y_(rows[i]);
    }
    return Dataset(std::move(ysub), std::move(sub), names_);
}

double sample_sd(const Vector& v)
{
    if (v.size() < 2) {
        return 0.0;
    }
    const double mean = v.mean();
    return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size() - 1));
}

StandardizedDataset standardize(const Dataset& data)
{
    if (data.n() < 2) {
        throw Error(ErrorCode::TooFewRows, "standardization needs at least 2 rows");
    }
    const Index p = data.p();
    Vector centers = data.X().colwise().mean().transpose();
    Vector scales(p);
    Matrix Xs = data.X();
    for (Index j = 0; j < p; ++j) {
        Xs.col(j).array() -= centers(j);
        const double sd = sample_sd(Xs.col(j));
        if (!(sd >= kConstantColumnSd)) {
            throw Error(ErrorCode::ConstantColumn, data.column_names()[static_cast<std::size_t>(j)]);
        }
        scales(j) = sd;
        Xs.col(j) /= sd;
    }

    const double y_center = data.y().mean();
    Vector ys = data.y().array() - y_center;
    const double y_sd = sample_sd(ys);
    if (!(y_sd >= kConstantColumnSd)) {
        throw Error(ErrorCode::ConstantColumn, "outcome");
    }
    ys /= y_sd;

    return StandardizedDataset{
        Dataset(std::move(ys), std::move(Xs), data.column_names()),
        y_center,
        y_sd,
        std::move(centers),
        std::move(scales),
    };
}

Vector StandardizedDataset::slopes_to_original(const Vector& beta_std) const
{
    return (beta_std.array() * y_scale / x_scales.array()).matrix();
}

double StandardizedDataset::intercept_for(const Vector& beta_original) const
{
    return y_center - x_centers.dot(beta_original);
}

Dataset StandardizedDataset::destandardize() const
{
    Matrix X = data.X();
    for (Index j = 0; j < X.cols(); ++j) {
        X.col(j) = X.col(j).array() * x_scales(j) + x_centers(j);
    }
    Vector y = data.y().array() * y_scale + y_center;
    return Dataset(std::move(y), std::move(X), data.column_names());
}

Vector OlsFit::predict(const Matrix& X) const
{
    Vector out = X * beta_hat;
    if (intercept) {
        out.array() += *intercept;
    }
    return out;
}

OlsFit ols_fit(const Matrix& X, const Vector& y, bool with_intercept)
{
    const Index n = X.rows();
    const Index p = X.cols();
    const Index p_fit = p + (with_intercept ? 1 : 0);
    if (y.size() != n) {
        throw Error(ErrorCode::InvalidArgument, "outcome length does not match design rows");
    }
    if (p_fit > n) {
        throw Error(ErrorCode::Underdetermined,
                    std::to_string(p_fit) + " fitted columns with only " + std::to_string(n) + " rows");
    }

    OlsFit fit;
    fit.df_resid = n - p_fit;

    if (p_fit == 0) {
        fit.beta_hat = Vector(0);
        fit.se = Vector(0);
        fit.rss = y.squaredNorm();
        fit.sigma2_hat = fit.df_resid > 0 ? fit.rss / static_cast<double>(fit.df_resid)
                                          : std::numeric_limits<double>::quiet_NaN();
        return fit;
    }

    Matrix design(n, p_fit);
    if (with_intercept) {
        design.col(0).setOnes();
        design.rightCols(p) = X;
    } else {
        design = X;
    }

    Eigen::ColPivHouseholderQR<Matrix> qr(design);
    if (qr.rank() < p_fit) {
        throw Error(ErrorCode::RankDeficient,
                    "design rank " + std::to_string(qr.rank()) + " < " + std::to_string(p_fit));
    }
    const Vector coef = qr.solve(y);
    const Vector resid = y - design * coef;
    fit.rss = resid.squaredNorm();
    fit.sigma2_hat = fit.df_resid > 0 ? fit.rss / static_cast<double>(fit.df_resid)
                                      : std::numeric_limits<double>::quiet_NaN();

    // (X'X)^-1 = P R^-1 R^-T P', so its diagonal is the squared row norms of
    // R^-1 mapped back through the column permutation.
    const Matrix R = qr.matrixR().topLeftCorner(p_fit, p_fit).template triangularView<Eigen::Upper>();
    const Matrix Rinv = R.template triangularView<Eigen::Upper>().solve(Matrix::Identity(p_fit, p_fit));
    const Vector diag_perm = Rinv.rowwise().squaredNorm();
    Vector diag(p_fit);
    const auto& perm = qr.colsPermutation().indices();
    for (Index k = 0; k < p_fit; ++k) {
        diag(perm(k)) = diag_perm(k);
    }
    const Vector se_all = (fit.sigma2_hat * diag.array()).sqrt();

    if (with_intercept) {
        fit.intercept = coef(0);
        fit.intercept_se = se_all(0);
        fit.beta_hat = coef.tail(p);
        fit.se = se_all.tail(p);
    } else {
        fit.beta_hat = coef;
        fit.se = se_all;
    }
    return fit;
}

OlsFit ols_fit(const Dataset& data, bool with_intercept)
{
    return ols_fit(data.X(), data.y(), with_intercept);
}

} // namespace sgpvsel
