#include "sgpvsel/sgpv.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "sgpvsel/error.hpp"

namespace sgpvsel {

namespace {

constexpr double kNormal975 = 1.96;

} // namespace

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_)
{
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
        throw Error(ErrorCode::InvalidArgument,
                    "interval needs finite lo <= hi, got [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
}

double overlap_length(const Interval& a, const Interval& b) noexcept
{
    return std::max(0.0, std::min(a.hi, b.hi) - std::max(a.lo, b.lo));
}

double sgpv_value(const Interval& estimate, const Interval& null)
{
    const double len_i = estimate.length();
    const double len_h = null.length();
    if (!(len_i > 0.0) || !(len_h > 0.0)) {
        throw Error(ErrorCode::ZeroLengthInterval, "SGPV needs |I| > 0 and |H0| > 0");
    }
    const double fraction = overlap_length(estimate, null) / len_i;
    const double correction = std::max(len_i / (2.0 * len_h), 1.0);
    return std::clamp(fraction * correction, 0.0, 1.0);
}

std::string_view to_string(NullBound bound) noexcept
{
    switch (bound) {
    case NullBound::SeBar: return "sebar";
    case NullBound::SeBarLogInfl: return "sebar-loginfl";
    case NullBound::SeBarLogDefl: return "sebar-logdefl";
    case NullBound::Constant: return "const";
    case NullBound::Zero: return "zero";
    }
    return "sebar";
}

NullBound parse_null_bound(std::string_view name)
{
    for (auto b : {NullBound::SeBar, NullBound::SeBarLogInfl, NullBound::SeBarLogDefl,
                   NullBound::Constant, NullBound::Zero}) {
        if (name == to_string(b)) {
            return b;
        }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown null bound '" + std::string(name) + "'");
}

double null_bound(const OlsFit& candidate_fit, NullBound variant, Index n, Index p)
{
    if (candidate_fit.se.size() == 0) {
        throw Error(ErrorCode::EmptyCandidateSet, "null bound needs at least one coefficient");
    }
    const double se_bar = candidate_fit.se.mean();
    auto log_ratio = [&] {
        if (n <= p) {
            throw Error(ErrorCode::InvalidArgument, "log(n/p) null bounds need n > p");
        }
        return std::sqrt(std::log(static_cast<double>(n) / static_cast<double>(p)));
    };
    switch (variant) {
    case NullBound::SeBar: return se_bar;
    case NullBound::SeBarLogInfl: return se_bar * log_ratio();
    case NullBound::SeBarLogDefl: return se_bar / log_ratio();
    case NullBound::Constant: return std::sqrt(candidate_fit.sigma2_hat) / 12.0;
    case NullBound::Zero: return 0.0;
    }
    return se_bar;
}

std::vector<Index> SgpvReport::kept() const
{
    std::vector<Index> out;
    for (const auto& e : entries) {
        if (e.keep) {
            out.push_back(e.column);
        }
    }
    return out;
}

double interval_multiplier(const OlsFit& fit, const ScreenOptions& options)
{
    if (!options.t_quantile) {
        return kNormal975;
    }
    if (fit.df_resid < 1) {
        throw Error(ErrorCode::InvalidArgument, "t quantile needs positive residual degrees of freedom");
    }
    boost::math::students_t dist(static_cast<double>(fit.df_resid));
    return boost::math::quantile(dist, 0.975);
}

SgpvReport screen(const OlsFit& candidate_fit, std::span<const Index> columns, double bound,
                  const ScreenOptions& options)
{
    if (!(bound >= 0.0) || !std::isfinite(bound)) {
        throw Error(ErrorCode::InvalidArgument, "null bound must be finite and nonnegative");
    }
    if (static_cast<Index>(columns.size()) != candidate_fit.beta_hat.size()) {
        throw Error(ErrorCode::InvalidArgument, "one column index per fitted coefficient required");
    }
    SgpvReport report;
    report.bound = bound;
    report.null = Interval(-bound, bound);
    report.multiplier = interval_multiplier(candidate_fit, options);
    report.entries.reserve(columns.size());

    for (std::size_t k = 0; k < columns.size(); ++k) {
        const auto pos = static_cast<Index>(k);
        SgpvEntry e;
        e.column = columns[k];
        e.estimate = candidate_fit.beta_hat(pos);
        e.se = candidate_fit.se(pos);
        const double half = report.multiplier * e.se;
        e.interval = Interval(e.estimate - half, e.estimate + half);
        if (bound == 0.0) {
            e.keep = std::abs(e.estimate) > half;
            e.p_delta = e.keep ? 0.0 : 1.0;
        } else if (e.interval.length() == 0.0) {
            // Exact fits can collapse the interval to a point; use the limit
            // of the overlap fraction, which is membership in H0.
            e.p_delta = std::abs(e.estimate) < bound ? 1.0 : 0.0;
            e.keep = e.p_delta == 0.0;
        } else {
            e.p_delta = sgpv_value(e.interval, report.null);
            e.keep = e.p_delta == 0.0;
        }
        report.entries.push_back(e);
    }
    return report;
}

} // namespace sgpvsel
