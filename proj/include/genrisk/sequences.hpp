// Sliding-window sequence sets and the random train/test split.
#pragma once

#include "genrisk/common.hpp"
#include "genrisk/dates.hpp"
#include "genrisk/panel.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace genrisk {

// N overlapping windows of p condition days followed by q target days, stride 1.
// Windows are views into the shared return matrix; no data is copied.
struct SequenceSet {
    std::shared_ptr<const Mat> returns;  // T x d
    int p = 0;
    int q = 0;
    std::vector<Date> window_start_dates;  // size N

    int size() const { return static_cast<int>(returns->rows()) - (p + q) + 1; }
    Eigen::Index dim() const { return returns->cols(); }

    auto window(int i) const { return returns->middleRows(i, p + q); }
    auto condition(int i) const { return returns->middleRows(i, p); }
    auto target(int i) const { return returns->middleRows(i + p, q); }

    // Index into the return series of the last condition day of window i; the
    // window forecasts returns for indices t0+1 ... t0+q.
    int t0_index(int i) const { return i + p - 1; }
};

SequenceSet make_sequences(const ReturnPanel& returns, int p, int q);

struct SplitIndex {
    std::vector<int> train_rows;  // sorted
    std::vector<int> test_rows;   // sorted complement
    std::uint64_t seed = 0;
    double fraction = 0.0;
};

// Seeded uniform permutation; the first round(fraction*N) rows become train.
SplitIndex split_train_test(const SequenceSet& seq, double fraction, std::uint64_t seed);

}  // namespace genrisk
