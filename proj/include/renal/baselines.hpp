#pragma once

#include "renal/gof.hpp"
#include "renal/types.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace renal {

struct MmdConfig {
    int n_subsequences = 50;    // contiguous windows cut from each sequence
    int n_permutations = 200;   // label permutations for the null reference
    std::uint64_t seed = 1;

    void validate() const;
};

struct MmdResult {
    double statistic = 0.0;   // unbiased squared-MMD estimate
    double p_value = 1.0;     // permutation p-value, add-one corrected
    bool reject = false;
    double bandwidth = 0.0;   // median pairwise squared distance over pooled windows
    int window_len = 0;       // common window length actually used
};

// Kernel two-sample test on raw observations. Each sequence is cut into
// cfg.n_subsequences contiguous windows of a common length (the shorter
// sequence decides; trailing observations are discarded), each window is
// flattened to a vector, and the unbiased squared-MMD estimate under an
// RBF kernel exp(-||a-b||^2 / bandwidth) is compared against its label
// permutation distribution. The bandwidth is the median pairwise squared
// Euclidean distance over the pooled windows, held fixed across
// permutations. The two window sets are put in a canonical order first, so
// exchanging d0 and d1 reproduces the statistic and p-value exactly.
MmdResult mmd_test(const ObservationSequence& d0, const ObservationSequence& d1,
                   const MmdConfig& cfg, double alpha);

// Exact unbiased squared-MMD estimate between two sets of row vectors with
// kernel exp(-||a-b||^2 / bandwidth).
double mmd_statistic(const Eigen::Ref<const Eigen::MatrixXd>& x,
                     const Eigen::Ref<const Eigen::MatrixXd>& y, double bandwidth);

// Fixed equal-width grid with exactly m bins on every non-degenerate
// dimension of the pooled points. No selection, no density filtering; a
// constant dimension collapses to one bin and flags the grid.
BinGrid ewd_bins(const Eigen::Ref<const Eigen::MatrixXd>& pooled, int m);

// Normal-reference rule: per-dimension count
//   ceil(range_j / (3.5 * sd_j * n^{-1/3}))
// computed on the pooled points; counts may differ across dimensions, and a
// dimension with zero spread collapses to one bin.
BinGrid scott_bins(const Eigen::Ref<const Eigen::MatrixXd>& pooled);

}  // namespace renal
