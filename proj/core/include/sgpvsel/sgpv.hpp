#pragma once

#include <string_view>
#include <vector>

#include "sgpvsel/linalg.hpp"

namespace sgpvsel {

struct Interval
{
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    /// Throws InvalidArgument unless lo <= hi and both are finite.
    Interval(double lo, double hi);

    double length() const noexcept { return hi - lo; }
    double midpoint() const noexcept { return 0.5 * (lo + hi); }
};

/// Length of the intersection, 0 when disjoint or touching.
double overlap_length(const Interval& a, const Interval& b) noexcept;

/// Second-generation p-value of interval estimate `estimate` against the
/// interval null `null`: overlap fraction times max(|I| / 2|H0|, 1), clamped
/// to [0, 1]. Throws ZeroLengthInterval if either interval is degenerate.
double sgpv_value(const Interval& estimate, const Interval& null);

enum class NullBound {
    SeBar,         ///< mean candidate-set standard error
    SeBarLogInfl,  ///< SE-bar * sqrt(log(n / p))
    SeBarLogDefl,  ///< SE-bar / sqrt(log(n / p))
    Constant,      ///< sigma-hat / 12
    Zero,
};

std::string_view to_string(NullBound bound) noexcept;
/// Accepts the CLI spellings: sebar, sebar-loginfl, sebar-logdefl, const, zero.
NullBound parse_null_bound(std::string_view name);

/// Null bound delta for H0 = [-delta, delta], computed from the standardized
/// candidate-set fit. n and p are the full problem dimensions and only enter
/// the log(n / p) variants, which require n > p.
double null_bound(const OlsFit& candidate_fit, NullBound variant, Index n, Index p);

struct SgpvEntry
{
    Index column = 0;     ///< index into the full design
    double estimate = 0.0;
    double se = 0.0;
    Interval interval;
    double p_delta = 0.0;
    bool keep = false;
};

struct SgpvReport
{
    Interval null;
    double bound = 0.0;
    double multiplier = 1.96;
    std::vector<SgpvEntry> entries;

    std::vector<Index> kept() const;
};

struct ScreenOptions
{
    /// Replace 1.96 with the t quantile on the fit's residual degrees of freedom.
    bool t_quantile = false;
};

/// Builds I_k = b_k +/- 1.96 se_k per candidate and keeps those whose SGPV
/// against [-bound, bound] is exactly zero. `columns` maps fit positions to
/// design indices. A zero bound degenerates to |b_k| > 1.96 se_k, reported
/// with p_delta 0 for kept and 1 for dropped coefficients. An interval that
/// collapses to a point (zero SE) gets the limiting value: 1 inside H0, else 0.
SgpvReport screen(const OlsFit& candidate_fit, std::span<const Index> columns, double bound,
                  const ScreenOptions& options = {});

/// Interval multiplier used by screen for the given fit.
double interval_multiplier(const OlsFit& fit, const ScreenOptions& options);

} // namespace sgpvsel
