// Shared aliases and error types for the genrisk library.
#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace genrisk {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using RowVec = Eigen::RowVectorXd;
// Row-major dense matrix; scenario cubes use it so each path is contiguous.
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// data-core
struct TooShort : Error { using Error::Error; };
struct NonPositiveLevel : Error { using Error::Error; };
struct DegenerateColumn : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct CsvError : Error { using Error::Error; };

// dgp-sim
struct BadRho : Error { using Error::Error; };
struct BadParams : Error { using Error::Error; };

// histsim
struct InsufficientHistory : Error { using Error::Error; };
struct MisalignedVols : Error { using Error::Error; };

// parametric
struct DegenerateSeries : Error { using Error::Error; };
struct NonStationary : Error { using Error::Error; };
struct OptimizerFailure : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };

// autodiff-nn
struct ShapeMismatch : Error { using Error::Error; };
struct NonScalarLoss : Error { using Error::Error; };

// genmodels
struct DivergedLoss : Error { using Error::Error; };
struct UntrainedModel : Error { using Error::Error; };

// kpi / backtest
struct EmptySample : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct DegeneratePairs : Error { using Error::Error; };
struct TooFewPairs : Error { using Error::Error; };
struct TooFew : Error { using Error::Error; };
struct MissingCells : Error { using Error::Error; };

// orchestrator
struct ParseError : Error { using Error::Error; };
struct UnknownKey : Error { using Error::Error; };
struct MissingRequired : Error { using Error::Error; };

}  // namespace genrisk
