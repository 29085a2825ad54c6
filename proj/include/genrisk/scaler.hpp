// Per-column standardization / min-max scaling with exact round trip.
#pragma once

#include "genrisk/common.hpp"

namespace genrisk {

enum class ScalerKind { standard, minmax };

enum class TransformDir { forward, inverse };

// forward: (x - location) / scale, per column.
struct ScalerState {
    ScalerKind kind = ScalerKind::standard;
    RowVec location;  // mean or min, size d
    RowVec scale;     // stdev (divisor n-1) or range, size d; strictly positive

    Eigen::Index dim() const { return location.size(); }
};

// Throws DegenerateColumn when a column has zero variance (standard) or zero
// range (minmax); requires at least two rows.
ScalerState fit_scaler(const Mat& data, ScalerKind kind);

Mat transform(const ScalerState& scaler, const Mat& data, TransformDir dir);

}  // namespace genrisk
