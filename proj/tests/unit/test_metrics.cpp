#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "sgpvsel/baselines.hpp"
#include "sgpvsel/error.hpp"
#include "sgpvsel/metrics.hpp"

using namespace sgpvsel;
using Catch::Matchers::WithinAbs;

namespace {

FittedModel model_on(const std::vector<Index>& selected, const Vector& values, double intercept = 0.0)
{
    FittedModel m;
    m.selected = selected;
    m.intercept = intercept;
    m.coefficients = Vector::Zero(values.size());
    for (Index j : selected) {
        m.coefficients(j) = values(j);
    }
    return m;
}

TrueModel truth_on(Index p, const std::vector<Index>& support)
{
    TrueModel t;
    t.beta0 = Vector::Zero(p);
    for (Index j : support) {
        t.beta0(j) = 1.0 + static_cast<double>(j);
    }
    t.support = support;
    return t;
}

Dataset test_data(Index n, Index p, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return Dataset(oracle::random_vector(n, rng), oracle::random_design(n, p, 0.2, rng), default_column_names(p));
}

} // namespace

TEST_CASE("eval_metrics: perfect recovery")
{
    const TrueModel t = truth_on(20, {1, 5, 9, 13});
    const Dataset test = test_data(30, 20, 1);
    const MetricsRecord r = eval_metrics(model_on(t.support, t.beta0), t, test);
    CHECK(r.captured);
    CHECK(r.power == 1.0);
    CHECK(r.type1 == 0.0);
    CHECK(r.pfdr == 0.0);
    CHECK(r.pfnr == 0.0);
    CHECK(r.mae == 0.0);
    CHECK(r.selected_size == 4);
    CHECK_FALSE(r.relative_mae.has_value());
}

TEST_CASE("eval_metrics: empty selection")
{
    const TrueModel t = truth_on(20, {0, 1, 2, 3});
    const Dataset test = test_data(30, 20, 2);
    const MetricsRecord r = eval_metrics(model_on({}, t.beta0), t, test);
    CHECK_FALSE(r.captured);
    CHECK(r.power == 0.0);
    CHECK(r.type1 == 0.0);
    CHECK(r.pfdr == 0.0);
    CHECK_THAT(r.pfnr, WithinAbs(0.2, 1e-15));
    CHECK_THAT(r.mae, WithinAbs((1.0 + 2.0 + 3.0 + 4.0) / 20.0, 1e-15));
    CHECK_THAT(r.test_rmse, WithinAbs(std::sqrt(test.y().squaredNorm() / 30.0), 1e-12));
}

TEST_CASE("eval_metrics: matches an independent confusion count")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const Index p = 5 + static_cast<Index>(rng() % 20);
        std::vector<Index> all(static_cast<std::size_t>(p));
        std::iota(all.begin(), all.end(), Index{0});
        std::shuffle(all.begin(), all.end(), rng);
        const auto s = static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(p + 1));
        std::vector<Index> support(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(s));
        std::sort(support.begin(), support.end());
        std::shuffle(all.begin(), all.end(), rng);
        const auto k = static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(p + 1));
        std::vector<Index> selected(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
        std::sort(selected.begin(), selected.end());

        const TrueModel t = truth_on(p, support);
        const FittedModel fit = model_on(selected, oracle::random_vector(p, rng));
        const Dataset test = test_data(15, p, static_cast<std::uint64_t>(trial));
        const MetricsRecord r = eval_metrics(fit, t, test);
        const oracle::Confusion c = oracle::confusion(selected, support, p, fit.coefficients, t.beta0);
        CHECK_THAT(r.power, WithinAbs(c.power, 1e-12));
        CHECK_THAT(r.type1, WithinAbs(c.type1, 1e-12));
        CHECK_THAT(r.pfdr, WithinAbs(c.pfdr, 1e-12));
        CHECK_THAT(r.pfnr, WithinAbs(c.pfnr, 1e-12));
        CHECK_THAT(r.mae, WithinAbs(c.mae, 1e-12));
        CHECK(r.captured == c.captured);
        if (r.captured) {
            CHECK(r.power == (support.empty() ? 0.0 : 1.0));
            CHECK(r.type1 == 0.0);
        }
        // Counting identities: TP + FN = s and FP + TN = p - s.
        const double tp = r.power * static_cast<double>(std::max<std::size_t>(s, 1));
        const double fp = r.type1 * static_cast<double>(std::max<Index>(p - static_cast<Index>(s), 1));
        CHECK_THAT(tp + fp, WithinAbs(static_cast<double>(k), 1e-9));
    }
}

TEST_CASE("eval_metrics: relative metrics against the oracle fit")
{
    std::mt19937_64 rng(4);
    const Index n = 60, p = 6;
    const Matrix X = oracle::random_design(n, p, 0.3, rng);
    TrueModel t = truth_on(p, {0, 2});
    const Vector y = X * t.beta0 + 0.5 * oracle::random_vector(n, rng);
    const Dataset train(y, X, default_column_names(p));
    const Dataset test = test_data(40, p, 5);

    const FittedModel oracle_fit = oracle_model(train, t.support);
    const FittedModel other = model_on({0, 1, 2}, oracle::random_vector(p, rng), 0.1);
    const MetricsRecord r = eval_metrics(other, t, test, &oracle_fit);
    REQUIRE(r.relative_mae.has_value());
    REQUIRE(r.relative_rmse.has_value());
    CHECK_THAT(*r.relative_mae, WithinAbs(r.mae / mean_absolute_error(oracle_fit.coefficients, t.beta0), 1e-12));
    CHECK_THAT(*r.relative_rmse, WithinAbs(r.test_rmse / prediction_rmse(oracle_fit, test), 1e-12));

    const MetricsRecord self = eval_metrics(oracle_fit, t, test, &oracle_fit);
    CHECK(*self.relative_mae == 1.0);
    CHECK(*self.relative_rmse == 1.0);

    // A noiseless training set makes the oracle exact, so relative MAE is undefined.
    const Dataset exact(X * t.beta0, X, default_column_names(p));
    const FittedModel exact_oracle = oracle_model(exact, t.support);
    const FittedModel exact_model = model_on(t.support, t.beta0);
    const MetricsRecord e = eval_metrics(exact_model, t, test, &exact_oracle);
    CHECK(mean_absolute_error(exact_oracle.coefficients, t.beta0) < 1e-12);
    if (mean_absolute_error(exact_oracle.coefficients, t.beta0) == 0.0) {
        CHECK_FALSE(e.relative_mae.has_value());
    }
    FittedModel zero_oracle = model_on(t.support, t.beta0);
    const MetricsRecord z = eval_metrics(other, t, test, &zero_oracle);
    CHECK_FALSE(z.relative_mae.has_value());
    CHECK(z.relative_rmse.has_value());
}

TEST_CASE("eval_metrics: dimension mismatch")
{
    const TrueModel t = truth_on(5, {0});
    const Dataset test = test_data(10, 4, 6);
    CHECK_THROWS_AS(eval_metrics(model_on({0}, t.beta0), t, test), Error);
}
