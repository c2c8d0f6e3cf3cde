#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sgpvsel {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Outcome vector plus n x p design matrix with one label per column.
///
/// The constructor enforces the invariants (finite entries, matching sizes,
/// unique labels) so every Dataset that exists is valid.
class Dataset
{
public:
    Dataset(Vector y, Matrix X, std::vector<std::string> column_names);

    /// Labels default to "V1".."Vp".
    Dataset(Vector y, Matrix X);

    const Vector& y() const noexcept { return y_; }
    const Matrix& X() const noexcept { return X_; }
    const std::vector<std::string>& column_names() const noexcept { return names_; }
    Index n() const noexcept { return X_.rows(); }
    Index p() const noexcept { return X_.cols(); }

    /// Dataset restricted to the given columns, in the given order.
    Dataset select_columns(std::span<const Index> columns) const;

    /// Dataset restricted to the given rows, in the given order.
    Dataset select_rows(std::span<const Index> rows) const;

private:
    Vector y_;
    Matrix X_;
    std::vector<std::string> names_;
};

std::vector<std::string> default_column_names(Index p);

/// Columns of X in the given order; an empty selection gives an n x 0 matrix.
Matrix columns_of(const Matrix& X, std::span<const Index> columns);

/// Centered and unit-variance copy of a Dataset with the transform recorded.
struct StandardizedDataset
{
    Dataset data;
    double y_center = 0.0;
    double y_scale = 1.0;
    Vector x_centers;
    Vector x_scales;

    /// Map standardized-scale slopes to original-scale slopes.
    Vector slopes_to_original(const Vector& beta_std) const;

    /// Intercept on the original scale for original-scale slopes.
    double intercept_for(const Vector& beta_original) const;

    /// Undo the transform on the design and outcome.
    Dataset destandardize() const;
};

/// Center every column and the outcome, then divide by the sample standard
/// deviation (denominator n - 1). Throws ConstantColumn / TooFewRows.
StandardizedDataset standardize(const Dataset& data);

/// Sample standard deviation with denominator n - 1.
double sample_sd(const Vector& v);

struct OlsFit
{
    Vector beta_hat;                 ///< slopes, one per fitted column
    Vector se;                       ///< classical standard errors of beta_hat
    double sigma2_hat = 0.0;         ///< RSS / df_resid
    double rss = 0.0;
    Index df_resid = 0;
    std::optional<double> intercept;
    std::optional<double> intercept_se;

    /// X * beta_hat (+ intercept) for a design with the fitted columns.
    Vector predict(const Matrix& X) const;
};

/// Least squares via column-pivoted Householder QR.
///
/// Standard errors come from diag((X'X)^-1) = row norms of R^-1, so the
/// normal equations are never formed. Throws Underdetermined when the
/// fitted column count exceeds n and RankDeficient when QR finds rank loss.
OlsFit ols_fit(const Matrix& X, const Vector& y, bool with_intercept);

OlsFit ols_fit(const Dataset& data, bool with_intercept);

} // namespace sgpvsel
