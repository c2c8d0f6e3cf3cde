#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sgpvsel/linalg.hpp"

namespace sgpvsel {

enum class TestSetMode {
    Inflated,  ///< draw n / (1 - test_fraction) rows and hold out the surplus
    Split,     ///< draw n rows and hold out test_fraction of them
};

struct ScenarioSpec
{
    std::string name;              ///< free-form label; empty uses a generated one
    Index n = 100;
    Index p = 10;
    Index s = 4;
    double rho = 0.0;
    double snr = 2.0;
    std::uint64_t master_seed = 1;
    /// Pins beta0 (support positions) across replications when set.
    std::optional<std::uint64_t> beta_seed;
    Index reps = 1;
    double test_fraction = 0.4;
    TestSetMode test_mode = TestSetMode::Inflated;
    /// Explicit coefficient vector; overrides the s / magnitude construction.
    std::optional<Vector> beta;
    /// Explicit noise variance; overrides the SNR calibration.
    std::optional<double> sigma2;

    /// Throws InvalidArgument on violated invariants.
    void validate() const;
    std::string label() const;
};

struct TrueModel
{
    Vector beta0;
    std::vector<Index> support;  ///< ascending
    double sigma2 = 0.0;
};

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

/// Seed for (master, replication, stream). A pure function, so replications
/// can be generated in any order or on any thread.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replication, std::uint64_t stream) noexcept;

/// Entry (i, j) of the AR(1) correlation matrix, rho^|i-j|.
double ar1_correlation(double rho, Index i, Index j) noexcept;
Matrix ar1_covariance(Index p, double rho);

/// n rows i.i.d. N_p(0, Sigma) with Sigma_ij = rho^|i-j|, via
/// x_1 = z_1, x_j = rho x_{j-1} + sqrt(1 - rho^2) z_j.
Matrix gen_design(Index n, Index p, double rho, Rng& rng);

/// s magnitudes equally spaced on [1, 5] at random positions with alternating
/// signs (largest magnitude positive), sigma2 = beta0' Sigma beta0 / snr.
TrueModel make_beta(const ScenarioSpec& spec, Rng& rng);

/// beta0' Sigma beta0 under the AR(1) covariance.
double signal_variance(const Vector& beta0, double rho);

/// X beta0 + N(0, sigma2) noise.
Vector gen_response(const Matrix& X, const TrueModel& model, Rng& rng);

struct Replication
{
    TrueModel truth;
    Dataset train;
    Dataset test;
};

/// Training and held-out data for one replication, fully determined by
/// (spec, replication index).
Replication generate_replication(const ScenarioSpec& spec, Index replication);

} // namespace sgpvsel
