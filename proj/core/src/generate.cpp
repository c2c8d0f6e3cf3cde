#include "sgpvsel/generate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sgpvsel/error.hpp"

namespace sgpvsel {

namespace {

enum Stream : std::uint64_t { kDesignStream = 1, kBetaStream = 2, kNoiseStream = 3 };

} // namespace

void ScenarioSpec::validate() const
{
    if (n < 3 || p < 1) {
        throw Error(ErrorCode::InvalidArgument, "scenario needs n >= 3 and p >= 1");
    }
    if (!(rho >= 0.0 && rho < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "rho must lie in [0, 1)");
    }
    if (reps < 1) {
        throw Error(ErrorCode::InvalidArgument, "reps must be at least 1");
    }
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "test_fraction must lie in (0, 1)");
    }
    if (beta) {
        if (beta->size() != p) {
            throw Error(ErrorCode::InvalidArgument, "explicit beta must have length p");
        }
    } else if (s < 1 || s > p) {
        throw Error(ErrorCode::InvalidArgument, "scenario needs 1 <= s <= p");
    }
    if (sigma2) {
        if (!(*sigma2 >= 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "sigma2 must be nonnegative");
        }
    } else if (!(snr > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "snr must be positive");
    }
}

std::string ScenarioSpec::label() const
{
    if (!name.empty()) {
        return name;
    }
    std::ostringstream os;
    os << "n" << n << "_p" << p << "_s" << (beta ? Index((beta->array() != 0.0).count()) : s)
       << "_rho" << rho << "_snr" << snr;
    return os.str();
}

std::uint64_t mix_seed(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replication, std::uint64_t stream) noexcept
{
    return mix_seed(mix_seed(mix_seed(master) ^ replication) ^ stream);
}

double ar1_correlation(double rho, Index i, Index j) noexcept
{
    const auto lag = static_cast<double>(i > j ? i - j : j - i);
    return lag == 0.0 ? 1.0 : std::pow(rho, lag);
}

Matrix ar1_covariance(Index p, double rho)
{
    Matrix sigma(p, p);
    for (Index i = 0; i < p; ++i) {
        for (Index j = 0; j < p; ++j) {
            sigma(i, j) = ar1_correlation(rho, i, j);
        }
    }
    return sigma;
}

Matrix gen_design(Index n, Index p, double rho, Rng& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    const double innovation = std::sqrt(1.0 - rho * rho);
    Matrix X(n, p);
    for (Index i = 0; i < n; ++i) {
        double prev = normal(rng);
        X(i, 0) = prev;
        for (Index j = 1; j < p; ++j) {
            prev = rho * prev + innovation * normal(rng);
            X(i, j) = prev;
        }
    }
    return X;
}

double signal_variance(const Vector& beta0, double rho)
{
    std::vector<Index> nz;
    for (Index j = 0; j < beta0.size(); ++j) {
        if (beta0(j) != 0.0) {
            nz.push_back(j);
        }
    }
    double total = 0.0;
    for (Index a : nz) {
        for (Index b : nz) {
            total += beta0(a) * beta0(b) * ar1_correlation(rho, a, b);
        }
    }
    return total;
}

TrueModel make_beta(const ScenarioSpec& spec, Rng& rng)
{
    TrueModel model;
    if (spec.beta) {
        model.beta0 = *spec.beta;
    } else {
        const Index s = spec.s;
        std::vector<Index> positions(static_cast<std::size_t>(spec.p));
        std::iota(positions.begin(), positions.end(), Index{0});
        // Partial Fisher-Yates: the first s slots become the support, in draw order.
        for (Index i = 0; i < s; ++i) {
            std::uniform_int_distribution<Index> pick(i, spec.p - 1);
            std::swap(positions[static_cast<std::size_t>(i)], positions[static_cast<std::size_t>(pick(rng))]);
        }
        model.beta0 = Vector::Zero(spec.p);
        for (Index i = 0; i < s; ++i) {
            const double magnitude = s == 1 ? 1.0 : 1.0 + 4.0 * static_cast<double>(i) / static_cast<double>(s - 1);
            const double sign = (s - 1 - i) % 2 == 0 ? 1.0 : -1.0;
            model.beta0(positions[static_cast<std::size_t>(i)]) = sign * magnitude;
        }
    }
    for (Index j = 0; j < model.beta0.size(); ++j) {
        if (model.beta0(j) != 0.0) {
            model.support.push_back(j);
        }
    }
    model.sigma2 = spec.sigma2 ? *spec.sigma2 : signal_variance(model.beta0, spec.rho) / spec.snr;
    return model;
}

Vector gen_response(const Matrix& X, const TrueModel& model, Rng& rng)
{
    if (X.cols() != model.beta0.size()) {
        throw Error(ErrorCode::InvalidArgument, "design and beta0 dimensions disagree");
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sd = std::sqrt(model.sigma2);
    Vector y = X * model.beta0;
    for (Index i = 0; i < y.size(); ++i) {
        y(i) += sd * normal(rng);
    }
    return y;
}

Replication generate_replication(const ScenarioSpec& spec, Index replication)
{
    const auto rep = static_cast<std::uint64_t>(replication);
    Rng beta_rng(spec.beta_seed ? derive_seed(*spec.beta_seed, 0, kBetaStream)
                                : derive_seed(spec.master_seed, rep, kBetaStream));
    Rng design_rng(derive_seed(spec.master_seed, rep, kDesignStream));
    Rng noise_rng(derive_seed(spec.master_seed, rep, kNoiseStream));

    TrueModel truth = make_beta(spec, beta_rng);

    Index n_train = spec.n;
    Index n_test = 0;
    if (spec.test_mode == TestSetMode::Inflated) {
        n_test = static_cast<Index>(std::llround(static_cast<double>(spec.n) * spec.test_fraction
                                                 / (1.0 - spec.test_fraction)));
    } else {
        n_test = static_cast<Index>(std::llround(static_cast<double>(spec.n) * spec.test_fraction));
        n_train = spec.n - n_test;
    }
    n_test = std::max<Index>(n_test, 1);
    const Index total = n_train + n_test;

    const Matrix X = gen_design(total, spec.p, spec.rho, design_rng);
    const Vector y = gen_response(X, truth, noise_rng);

    Dataset train(y.head(n_train), X.topRows(n_train));
    Dataset test(y.tail(n_test), X.bottomRows(n_test));
    return Replication{std::move(truth), std::move(train), std::move(test)};
}

} // namespace sgpvsel
