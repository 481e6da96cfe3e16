#include "renal/baselines.hpp"

#include "renal/errors.hpp"
#include "renal/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace renal {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;

// Rows are flattened contiguous windows of the sequence's values.
MatrixXd cut_windows(const ObservationSequence& seq, int n_windows, int window_len) {
    const Index d = seq.dim();
    MatrixXd out(n_windows, static_cast<Index>(window_len) * d);
    for (int w = 0; w < n_windows; ++w) {
        for (int i = 0; i < window_len; ++i) {
            out.block(w, static_cast<Index>(i) * d, 1, d) =
                seq.values.row(static_cast<Index>(w) * window_len + i);
        }
    }
    return out;
}

// Row-major lexicographic comparison; ties broken as equal.
bool lex_less(const MatrixXd& a, const MatrixXd& b) {
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            if (a(i, j) < b(i, j)) return true;
            if (a(i, j) > b(i, j)) return false;
        }
    }
    return false;
}

double median_of(std::vector<double> v) {
    if (v.empty()) throw InvalidInputError("median of empty set");
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid) - 1,
                     v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (v[mid - 1] + hi);
}

// Unbiased squared-MMD from a precomputed kernel matrix and a label
// assignment: labels[i] true means "first sample".
double mmd_from_gram(const MatrixXd& gram, const std::vector<char>& labels) {
    const Index n = gram.rows();
    double kxx = 0.0, kyy = 0.0, kxy = 0.0;
    Index nx = 0, ny = 0;
    for (Index i = 0; i < n; ++i) {
        if (labels[static_cast<std::size_t>(i)]) {
            ++nx;
        } else {
            ++ny;
        }
    }
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const bool xi = labels[static_cast<std::size_t>(i)];
            const bool xj = labels[static_cast<std::size_t>(j)];
            if (xi && xj) {
                kxx += gram(i, j);
            } else if (!xi && !xj) {
                kyy += gram(i, j);
            } else if (xi && !xj) {
                kxy += gram(i, j);
            }
        }
    }
    const double m = static_cast<double>(nx);
    const double l = static_cast<double>(ny);
    return kxx / (m * (m - 1.0)) + kyy / (l * (l - 1.0)) - 2.0 * kxy / (m * l);
}

}  // namespace

void MmdConfig::validate() const {
    if (n_subsequences < 2) throw InvalidInputError("n_subsequences must be >= 2");
    if (n_permutations < 100) throw InvalidInputError("n_permutations must be >= 100");
}

double mmd_statistic(const Eigen::Ref<const MatrixXd>& x,
                     const Eigen::Ref<const MatrixXd>& y, double bandwidth) {
    if (x.cols() != y.cols()) {
        throw InvalidInputError("mmd_statistic: vector dimensionalities disagree");
    }
    if (x.rows() < 2 || y.rows() < 2) {
        throw InsufficientDataError("mmd_statistic needs at least two vectors per sample");
    }
    if (!(bandwidth > 0.0)) throw InvalidInputError("bandwidth must be positive");
    const Index m = x.rows(), l = y.rows();
    double kxx = 0.0, kyy = 0.0, kxy = 0.0;
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < m; ++j) {
            if (i != j) kxx += std::exp(-(x.row(i) - x.row(j)).squaredNorm() / bandwidth);
        }
    }
    for (Index i = 0; i < l; ++i) {
        for (Index j = 0; j < l; ++j) {
            if (i != j) kyy += std::exp(-(y.row(i) - y.row(j)).squaredNorm() / bandwidth);
        }
    }
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < l; ++j) {
            kxy += std::exp(-(x.row(i) - y.row(j)).squaredNorm() / bandwidth);
        }
    }
    return kxx / (static_cast<double>(m) * (m - 1.0)) +
           kyy / (static_cast<double>(l) * (l - 1.0)) -
           2.0 * kxy / (static_cast<double>(m) * l);
}

MmdResult mmd_test(const ObservationSequence& d0, const ObservationSequence& d1,
                   const MmdConfig& cfg, double alpha) {
    cfg.validate();
    d0.validate();
    d1.validate();
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw InvalidInputError("alpha must lie in (0, 1)");
    }
    if (d0.dim() != d1.dim()) {
        throw InvalidInputError("mmd_test: sequence dimensionalities disagree");
    }
    const int k = cfg.n_subsequences;
    const int window_len = static_cast<int>(std::min(d0.size(), d1.size())) / k;
    if (window_len < 1) {
        throw InsufficientDataError("sequences are too short for the requested windows");
    }

    MatrixXd wx = cut_windows(d0, k, window_len);
    MatrixXd wy = cut_windows(d1, k, window_len);
    // Canonical argument order, so the whole procedure (statistic, bandwidth,
    // permutation stream) is exactly invariant under exchanging the inputs.
    if (lex_less(wy, wx)) wx.swap(wy);
    MatrixXd pooled(2 * k, wx.cols());
    pooled << wx, wy;

    // Median heuristic over all pooled pairs.
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(k) * (2 * k - 1));
    for (Index i = 0; i < pooled.rows(); ++i) {
        for (Index j = i + 1; j < pooled.rows(); ++j) {
            dists.push_back((pooled.row(i) - pooled.row(j)).squaredNorm());
        }
    }
    double bandwidth = median_of(std::move(dists));
    if (!(bandwidth > 0.0)) bandwidth = 1.0;  // all windows identical

    MatrixXd gram(2 * k, 2 * k);
    for (Index i = 0; i < pooled.rows(); ++i) {
        gram(i, i) = 1.0;
        for (Index j = i + 1; j < pooled.rows(); ++j) {
            const double v =
                std::exp(-(pooled.row(i) - pooled.row(j)).squaredNorm() / bandwidth);
            gram(i, j) = v;
            gram(j, i) = v;
        }
    }

    std::vector<char> labels(static_cast<std::size_t>(2 * k));
    for (int i = 0; i < k; ++i) labels[static_cast<std::size_t>(i)] = 1;

    MmdResult res;
    res.bandwidth = bandwidth;
    res.window_len = window_len;
    // The observed statistic goes through the reference double-loop path, so
    // it matches mmd_statistic on the same windows bit for bit; the cached
    // kernel matrix only serves the permutation reference below.
    res.statistic = mmd_statistic(wx, wy, bandwidth);

    // Permutation reference; each permutation draws from its own derived
    // stream, so the p-value does not depend on evaluation order.
    int at_least = 0;
    std::vector<int> perm(static_cast<std::size_t>(2 * k));
    for (int rep = 0; rep < cfg.n_permutations; ++rep) {
        Rng rng(derive_seed(cfg.seed, {0x6d6d64ULL, static_cast<std::uint64_t>(rep)}));
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = 2 * k - 1; i > 0; --i) {
            const int j = static_cast<int>(rng.next_u64() %
                                           static_cast<std::uint64_t>(i + 1));
            std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
        }
        std::vector<char> plabels(static_cast<std::size_t>(2 * k));
        for (int i = 0; i < k; ++i) plabels[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = 1;
        if (mmd_from_gram(gram, plabels) >= res.statistic) ++at_least;
    }
    res.p_value = (1.0 + at_least) / (1.0 + cfg.n_permutations);
    res.reject = res.p_value <= alpha;
    return res;
}

BinGrid ewd_bins(const Eigen::Ref<const MatrixXd>& pooled, int m) {
    if (m < 2) throw InvalidInputError("ewd_bins: m must be >= 2");
    return equal_width_grid(pooled, m);
}

BinGrid scott_bins(const Eigen::Ref<const MatrixXd>& pooled) {
    if (pooled.rows() < 2) {
        throw InsufficientDataError("scott_bins needs at least two points");
    }
    if (!pooled.allFinite()) throw InvalidInputError("scott_bins: non-finite coordinates");
    const Index n = pooled.rows();
    const Index p = pooled.cols();
    Eigen::VectorXi bins(p);
    const double n_factor = std::pow(static_cast<double>(n), -1.0 / 3.0);
    for (Index j = 0; j < p; ++j) {
        const double lo = pooled.col(j).minCoeff();
        const double hi = pooled.col(j).maxCoeff();
        const double mean = pooled.col(j).mean();
        const double sd = std::sqrt(
            (pooled.col(j).array() - mean).square().sum() / static_cast<double>(n - 1));
        if (hi == lo || sd == 0.0) {
            bins(j) = 1;
            continue;
        }
        const double width = 3.5 * sd * n_factor;
        bins(j) = static_cast<int>(std::ceil((hi - lo) / width));
        if (bins(j) < 1) bins(j) = 1;
    }
    return equal_width_grid(pooled, bins);
}

}  // namespace renal
