#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "sgpvsel/error.hpp"
#include "sgpvsel/generate.hpp"
#include "sgpvsel/prosgpv.hpp"

using namespace sgpvsel;
using Catch::Matchers::WithinAbs;

namespace {

ScenarioSpec illustration_spec(std::uint64_t seed)
{
    ScenarioSpec spec;
    spec.n = 400;
    spec.p = 5;
    spec.rho = 0.5;
    spec.beta = Vector::Zero(5);
    (*spec.beta)(2) = 0.28;
    spec.sigma2 = 1.0;
    spec.master_seed = seed;
    return spec;
}

ScenarioSpec sparse_spec(Index n, Index p, Index s, double rho, double snr, std::uint64_t seed)
{
    ScenarioSpec spec;
    spec.n = n;
    spec.p = p;
    spec.s = s;
    spec.rho = rho;
    spec.snr = snr;
    spec.master_seed = seed;
    return spec;
}

void check_result_invariants(const Dataset& data, const SelectionResult& res)
{
    const auto& S = res.selected();
    const auto& C = res.stage1_candidate_set;
    CHECK(std::is_sorted(S.begin(), S.end()));
    for (Index k : S) {
        CHECK(std::find(C.begin(), C.end(), k) != C.end());
    }
    for (Index j = 0; j < data.p(); ++j) {
        if (std::find(S.begin(), S.end(), j) == S.end()) {
            CHECK(res.model.coefficients(j) == 0.0);
        }
    }
    Matrix XS(data.n(), static_cast<Index>(S.size()));
    for (std::size_t k = 0; k < S.size(); ++k) {
        XS.col(static_cast<Index>(k)) = data.X().col(S[k]);
    }
    const auto ref = oracle::normal_equations(XS, data.y(), true);
    CHECK_THAT(res.model.intercept, WithinAbs(ref.beta(0), 1e-10 * std::max(1.0, std::abs(ref.beta(0)))));
    for (std::size_t k = 0; k < S.size(); ++k) {
        CHECK_THAT(res.model.coefficients(S[k]), WithinAbs(ref.beta(static_cast<Index>(k) + 1), 1e-10));
    }

    // Threshold form of the SGPV screen.
    if (res.candidate_fit) {
        const double se_bar = res.candidate_fit->se.mean();
        std::vector<Index> expected;
        for (std::size_t k = 0; k < C.size(); ++k) {
            const auto pos = static_cast<Index>(k);
            if (std::abs(res.candidate_fit->beta_hat(pos)) > 1.96 * res.candidate_fit->se(pos) + se_bar) {
                expected.push_back(C[k]);
            }
        }
        CHECK(expected == S);
    } else {
        CHECK(S.empty());
    }
}

} // namespace

TEST_CASE("fit_two_stage: illustration scenario selects V3 more often than the candidate set does")
{
    int pro_exact = 0;
    int stage1_exact = 0;
    const int reps = 200;
    for (int r = 0; r < reps; ++r) {
        const Replication rep = generate_replication(illustration_spec(77), r);
        const SelectionResult res = fit_two_stage(rep.train);
        check_result_invariants(rep.train, res);
        pro_exact += res.selected() == std::vector<Index>{2} ? 1 : 0;
        stage1_exact += res.stage1_candidate_set == std::vector<Index>{2} ? 1 : 0;
    }
    INFO("ProSGPV {V3}: " << pro_exact << ", candidate set {V3}: " << stage1_exact);
    CHECK(pro_exact > stage1_exact);
    CHECK(pro_exact > reps / 2);
}

TEST_CASE("fit_two_stage: pure noise gives the empty model in most replications")
{
    ScenarioSpec spec;
    spec.n = 200;
    spec.p = 10;
    spec.beta = Vector::Zero(10);
    spec.sigma2 = 1.0;
    spec.master_seed = 5;
    int empty = 0;
    Index false_selections = 0;
    const int reps = 200;
    for (int r = 0; r < reps; ++r) {
        const Replication rep = generate_replication(spec, r);
        const SelectionResult res = fit_two_stage(rep.train);
        check_result_invariants(rep.train, res);
        empty += res.selected().empty() ? 1 : 0;
        false_selections += static_cast<Index>(res.selected().size());
        if (res.selected().empty()) {
            CHECK_THAT(res.model.intercept, WithinAbs(rep.train.y().mean(), 1e-12));
        }
    }
    const double type1 = static_cast<double>(false_selections) / (reps * 10.0);
    INFO("empty models " << empty << "/" << reps << ", per-feature type I error " << type1);
    CHECK(empty >= 0.8 * reps);
    CHECK(type1 < 0.05);
}

TEST_CASE("fit_two_stage: noiseless strong signal recovers the support exactly")
{
    for (int r = 0; r < 20; ++r) {
        ScenarioSpec spec = sparse_spec(100, 10, 3, 0.35, 2.0, 101);
        spec.sigma2 = 0.0;
        const Replication rep = generate_replication(spec, r);
        const SelectionResult res = fit_two_stage(rep.train);
        CHECK(res.selected() == rep.truth.support);
    }
}

TEST_CASE("fit_two_stage: invariants on random sparse problems")
{
    for (int r = 0; r < 30; ++r) {
        const ScenarioSpec spec = sparse_spec(120, 15, 4, 0.35 * (r % 3), 1.0, 300);
        const Replication rep = generate_replication(spec, r);
        check_result_invariants(rep.train, fit_two_stage(rep.train));
        check_result_invariants(rep.train, fit_one_stage(rep.train));
    }
}

TEST_CASE("fit_two_stage: selection is invariant to outcome scale")
{
    for (int r = 0; r < 10; ++r) {
        const Replication rep = generate_replication(sparse_spec(150, 12, 4, 0.35, 1.0, 41), r);
        const SelectionResult base = fit_two_stage(rep.train);
        for (double c : {0.01, 3.0, 250.0}) {
            const Dataset scaled(rep.train.y() * c, rep.train.X());
            const SelectionResult res = fit_two_stage(scaled);
            CHECK(res.selected() == base.selected());
            CHECK((res.model.coefficients - c * base.model.coefficients).cwiseAbs().maxCoeff()
                  <= 1e-8 * std::max(1.0, c));
        }
    }
}

TEST_CASE("fit_two_stage: column permutation permutes the selection")
{
    std::mt19937_64 rng(9);
    for (int r = 0; r < 10; ++r) {
        const Replication rep = generate_replication(sparse_spec(150, 12, 4, 0.0, 2.0, 57), r);
        std::vector<Index> perm(12);
        std::iota(perm.begin(), perm.end(), Index{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        const Dataset permuted = rep.train.select_columns(perm);
        const auto base = fit_two_stage(rep.train).selected();
        std::vector<Index> mapped;
        const SelectionResult permuted_fit = fit_two_stage(permuted);
        for (Index k : permuted_fit.selected()) {
            mapped.push_back(perm[static_cast<std::size_t>(k)]);
        }
        std::sort(mapped.begin(), mapped.end());
        CHECK(mapped == base);
    }
}

TEST_CASE("fit_two_stage: repeated fits are bit-identical")
{
    const Replication rep = generate_replication(sparse_spec(200, 30, 5, 0.7, 0.7, 8), 0);
    const SelectionResult a = fit_two_stage(rep.train);
    const SelectionResult b = fit_two_stage(rep.train);
    CHECK(a.selected() == b.selected());
    CHECK(a.stage1_lambda == b.stage1_lambda);
    CHECK((a.model.coefficients.array() == b.model.coefficients.array()).all());
    CHECK(a.model.intercept == b.model.intercept);
}

TEST_CASE("fit_two_stage: oversized candidate sets are truncated to n / 2")
{
    const Replication rep = generate_replication(sparse_spec(30, 60, 3, 0.0, 2.0, 12), 0);
    CandidateProvider everything = [](const StandardizedDataset& d, const ProSgpvConfig&) {
        CandidateSet c;
        c.columns.resize(static_cast<std::size_t>(d.data.p()));
        std::iota(c.columns.begin(), c.columns.end(), Index{0});
        c.coefficients = d.data.X().transpose() * d.data.y();
        return c;
    };
    const SelectionResult res = fit_two_stage(rep.train, {}, everything);
    CHECK(res.stage1_truncated);
    CHECK(res.stage1_candidate_set.size() == 15);
    CHECK(std::is_sorted(res.stage1_candidate_set.begin(), res.stage1_candidate_set.end()));
    check_result_invariants(rep.train, res);

    ProSgpvConfig cfg;
    cfg.max_candidates = 8;
    CHECK(fit_two_stage(rep.train, cfg, everything).stage1_candidate_set.size() == 8);
    cfg.max_candidates = 30;
    CHECK_THROWS_AS(fit_two_stage(rep.train, cfg, everything), Error);
}

TEST_CASE("fit_two_stage: high-dimensional data runs through the lasso stage")
{
    const Replication rep = generate_replication(sparse_spec(80, 200, 4, 0.0, 2.0, 13), 0);
    const SelectionResult res = fit_two_stage(rep.train);
    CHECK(res.stage1_candidate_set.size() < 80);
    check_result_invariants(rep.train, res);
}

TEST_CASE("fit_one_stage: preconditions and agreement with two-stage")
{
    const Replication wide = generate_replication(sparse_spec(20, 20, 3, 0.0, 2.0, 1), 0);
    CHECK_THROWS_MATCHES(fit_one_stage(wide.train), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::Underdetermined;
                         }));

    int agree = 0;
    const int reps = 50;
    for (int r = 0; r < reps; ++r) {
        const Replication rep = generate_replication(sparse_spec(400, 10, 3, 0.0, 2.0, 66), r);
        const SelectionResult one = fit_one_stage(rep.train);
        CHECK(one.mode == StageMode::OneStage);
        CHECK(one.stage1_candidate_set.size() == 10);
        agree += one.selected() == fit_two_stage(rep.train).selected() ? 1 : 0;
    }
    INFO("one-stage and two-stage agree in " << agree << "/" << reps);
    CHECK(agree >= 0.9 * reps);
}

TEST_CASE("fit_one_stage: single strong feature is selected")
{
    std::mt19937_64 rng(4);
    const Vector x = oracle::random_vector(60, rng);
    const Vector y = 2.0 * x + oracle::random_vector(60, rng, 0.5);
    const SelectionResult res = fit_one_stage(Dataset(y, Matrix(x)));
    REQUIRE(res.candidate_fit);
    CHECK(std::abs(res.candidate_fit->beta_hat(0)) > 3.0 * res.candidate_fit->se(0));
    CHECK(res.selected() == std::vector<Index>{0});
    CHECK(res.sgpv_report.bound == res.candidate_fit->se(0));
}

TEST_CASE("fit_two_stage: null-bound variants are wired through")
{
    const Replication rep = generate_replication(sparse_spec(300, 20, 4, 0.0, 0.7, 3), 0);
    ProSgpvConfig zero;
    zero.null_bound = NullBound::Zero;
    const auto loose = fit_two_stage(rep.train, zero);
    const auto strict = fit_two_stage(rep.train);
    CHECK(loose.sgpv_report.bound == 0.0);
    CHECK(loose.selected().size() >= strict.selected().size());
    CHECK(std::includes(loose.selected().begin(), loose.selected().end(), strict.selected().begin(),
                        strict.selected().end()));
}
