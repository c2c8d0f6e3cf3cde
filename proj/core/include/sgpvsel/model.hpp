#pragma once

#include <vector>

#include "sgpvsel/linalg.hpp"

namespace sgpvsel {

/// An original-scale linear predictor produced by any selection method.
struct FittedModel
{
    std::vector<Index> selected;  ///< ascending column indices
    double intercept = 0.0;
    Vector coefficients;          ///< length p, exactly zero off `selected`

    Vector predict(const Matrix& X) const
    {
        Vector out = X * coefficients;
        out.array() += intercept;
        return out;
    }
};

} // namespace sgpvsel
