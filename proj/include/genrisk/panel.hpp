// Dated risk-factor panels, return transforms and CSV ingestion.
#pragma once

#include "genrisk/common.hpp"
#include "genrisk/dates.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace genrisk {

// Levels of d risk factors on T dates, percent annualized for market data.
struct RatePanel {
    std::vector<Date> dates;          // strictly increasing, size T
    std::vector<std::string> tenors;  // size d
    Mat values;                       // T x d

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

enum class ReturnMode { absolute, log };

struct ReturnPanel {
    std::vector<Date> dates;  // date of each return (the later of the two levels)
    std::vector<std::string> tenors;
    Mat values;  // (T-1) x d
    ReturnMode mode = ReturnMode::absolute;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

// x_t = R_t - R_{t-1} (absolute) or log(P_t) - log(P_{t-1}) (log).
ReturnPanel compute_returns(const RatePanel& panel, ReturnMode mode);

// Overlapping rolling sums y_i = sum of h consecutive returns starting at i.
ReturnPanel h_day_returns(const ReturnPanel& returns, int h);

// Cumulative sum of absolute returns on top of a base curve; inverse of
// compute_returns in absolute mode.
RatePanel accumulate_returns(const ReturnPanel& returns, const RowVec& base_levels,
                             Date base_date);

// CSV schema: header `date,<tenor>,...`; ISO dates; decimal levels.
// Rejects unsorted or duplicate dates. Empty cells and the tokens '.', 'NA',
// 'NaN' are treated as missing: interior gaps are forward-filled, leading rows
// with any missing cell are dropped.
RatePanel read_panel_csv(std::istream& in);
RatePanel read_panel_csv_file(const std::string& path);
void write_panel_csv(const RatePanel& panel, std::ostream& out);
void write_panel_csv_file(const RatePanel& panel, const std::string& path);

// "3m"/"6M"/"10y" and FRED series ids like "DGS3MO"/"DGS10" to year fractions.
// Returns a vector aligned with `tenors`; throws Error on an unparsable label.
std::vector<double> tenor_years(const std::vector<std::string>& tenors);

}  // namespace genrisk
