#include "genrisk/sequences.hpp"

#include "genrisk/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace genrisk {

SequenceSet make_sequences(const ReturnPanel& returns, int p, int q) {
    if (p < 1 || q < 1) throw Error("make_sequences: p and q must be >= 1");
    if (returns.rows() < p + q) throw TooShort("make_sequences: series shorter than p+q");
    SequenceSet seq;
    seq.returns = std::make_shared<Mat>(returns.values);
    seq.p = p;
    seq.q = q;
    const int n = static_cast<int>(returns.rows()) - (p + q) + 1;
    seq.window_start_dates.assign(returns.dates.begin(), returns.dates.begin() + n);
    return seq;
}

SplitIndex split_train_test(const SequenceSet& seq, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw Error("split_train_test: fraction must be in (0,1)");
    const int n = seq.size();
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    rng.shuffle(perm);
    const int n_train = static_cast<int>(std::lround(fraction * n));
    SplitIndex split;
    split.seed = seed;
    split.fraction = fraction;
    split.train_rows.assign(perm.begin(), perm.begin() + n_train);
    split.test_rows.assign(perm.begin() + n_train, perm.end());
    std::sort(split.train_rows.begin(), split.train_rows.end());
    std::sort(split.test_rows.begin(), split.test_rows.end());
    return split;
}

}  // namespace genrisk
