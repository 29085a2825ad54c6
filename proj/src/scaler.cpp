#include "genrisk/scaler.hpp"

namespace genrisk {

ScalerState fit_scaler(const Mat& data, ScalerKind kind) {
    if (data.rows() < 2) throw TooShort("fit_scaler: need at least 2 rows");
    ScalerState s;
    s.kind = kind;
    const double n = static_cast<double>(data.rows());
    if (kind == ScalerKind::standard) {
        s.location = data.colwise().mean();
        const Mat centered = data.rowwise() - s.location;
        s.scale = (centered.array().square().colwise().sum() / (n - 1.0)).sqrt();
    } else {
        s.location = data.colwise().minCoeff();
        s.scale = data.colwise().maxCoeff() - s.location;
    }
    if ((s.scale.array() <= 0.0).any())
        throw DegenerateColumn("fit_scaler: zero-variance or zero-range column");
    return s;
}

Mat transform(const ScalerState& scaler, const Mat& data, TransformDir dir) {
    if (data.cols() != scaler.dim())
        throw DimensionMismatch("transform: column count does not match scaler");
    if (dir == TransformDir::forward)
        return (data.rowwise() - scaler.location).array().rowwise() / scaler.scale.array();
    return (data.array().rowwise() * scaler.scale.array()).matrix().rowwise() + scaler.location;
}

}  // namespace genrisk
