// PIT-based VaR backtesting: u-value series over consecutive business dates,
// sub-period aggregation into the BT score, and envelope plot data.
#pragma once

#include "genrisk/common.hpp"
#include "genrisk/histsim.hpp"
#include "genrisk/kpi.hpp"
#include "genrisk/panel.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace genrisk {

// Mid-rank probability integral transform: (#{< realized} + half ties) / n.
double u_value(double realized, const Vec& synth);

struct UValueSeries {
    std::vector<Date> dates;      // condition dates t0, consecutive business dates
    std::vector<int> t0_indices;  // into the backtested return series
    std::vector<int> horizons;    // e.g. {1, 10}
    // u[h][tenor] aligned with dates.
    std::vector<std::vector<Vec>> u;
    int skipped = 0;  // dates dropped for insufficient history
};

struct EnvelopeData {
    std::vector<Date> dates;
    std::vector<std::string> tenors;
    Mat realized;     // n x d, 1-day returns
    Mat q_low;        // n x d forecast quantiles
    Mat q_high;       // n x d
    double level_low = 0.05;
    double level_high = 0.95;
    // Breach rates per tenor; rows: first half, second half, whole period.
    Mat breach_low;   // 3 x d
    Mat breach_high;  // 3 x d
};

struct BacktestOutput {
    UValueSeries u;
    EnvelopeData envelope;
};

// Returns a forecast cube for the condition date t0 (scenario returns for the
// following days). May throw InsufficientHistory for an ineligible date.
using WindowGenerator =
    std::function<ScenarioCube(int t0_index, int n_paths, std::uint64_t seed)>;

// For each t0 in [t0_begin, t0_end): generate n_synth paths, compute u for the
// 1-day return and each h-day cumulative return against the realized values.
// Per-date seeds are derived from `seed`, so results do not depend on how
// dates are partitioned across workers.
BacktestOutput run_backtest(const WindowGenerator& generate, const ReturnPanel& returns,
                            int t0_begin, int t0_end, const std::vector<int>& horizons,
                            int n_synth, std::uint64_t seed);

EnvelopeData envelope_data(const WindowGenerator& generate, const ReturnPanel& returns,
                           int t0_begin, int t0_end, int n_synth, std::uint64_t seed,
                           double level_low = 0.05, double level_high = 0.95);

struct UHistogram {
    Vec heights;  // 10 bins, normalized to density (uniform => all 1.0)
    double diff = 0.0;
    double range = 0.0;
    double stdev = 0.0;
};

UHistogram u_histogram_stats(const Vec& u);

inline const std::vector<double>& breach_levels() {
    static const std::vector<double> levels{0.025, 0.05, 0.10, 0.90, 0.95, 0.975};
    return levels;
}

// |actual breach rate - nominal| per level; left tail below 0.5, right above.
std::vector<double> breach_rate_diffs(const Vec& u);

struct SubPeriod {
    int id = 0;  // 0 denotes the whole period
    int begin = 0;
    int end = 0;  // date-index range [begin, end)
};

// 502-business-day chunks; a final chunk shorter than 251 merges into its
// predecessor. The whole-period entry (id 0) comes last.
std::vector<SubPeriod> make_subperiods(int n_dates, int chunk = 502, int min_tail = 251);

struct BacktestRecord {
    int subperiod = 0;
    int horizon_days = 1;
    Date start = 0;
    Date end = 0;
    std::string tenor;
    double ks_pval = 1.0;
    double diff = 0.0;
    std::array<double, 6> br{};  // BR025, BR05, BR10, BR90, BR95, BR975
};

std::vector<BacktestRecord> backtest_records(const UValueSeries& u,
                                             const std::vector<std::string>& tenors);

// Median across sub-periods, average of 1-day/10-day, median across tenors,
// BR = sum of the six deviations, BT = (BR + (1 - KSpval)) / 2. DIFF excluded.
double bt_score(const std::vector<BacktestRecord>& records);

}  // namespace genrisk
