#pragma once

#include "renal/types.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace renal {

// ============================================================
// Discretization
// ============================================================

// Axis-aligned equal-width grid over a box. Bin counts are held per
// dimension; the selected grids use a common count across non-degenerate
// dimensions, while fixed baselines may differ per dimension. Intervals are
// half-open [lo, hi) except the last bin of each axis, which is closed, so
// every point of the box maps to exactly one state. Points outside the box
// clamp to the boundary bins.
struct BinGrid {
    Eigen::VectorXi bins;     // per-dimension bin counts, all >= 1
    Eigen::VectorXd lower;    // componentwise lower bounds
    Eigen::VectorXd upper;    // componentwise upper bounds, upper > lower
    bool has_degenerate_dim = false;  // some dimension collapsed to one bin

    Eigen::Index dim() const { return bins.size(); }

    // Product of per-dimension counts.
    std::int64_t state_count() const;

    void validate() const;
};

// Grid over the componentwise range of `pooled` with `bins_per_dim` bins on
// each axis. A dimension whose range is zero collapses to a single bin over
// a unit-width box around the value, and the grid is flagged.
BinGrid equal_width_grid(const Eigen::Ref<const Eigen::MatrixXd>& pooled,
                         int bins_per_dim);

// As above with an explicit per-dimension count vector.
BinGrid equal_width_grid(const Eigen::Ref<const Eigen::MatrixXd>& pooled,
                         const Eigen::VectorXi& bins_per_dim);

// Maps each row of `points` to its flattened state index. Flattening is
// row-major with dimension 0 varying slowest.
std::vector<std::int64_t> assign_bins(const Eigen::Ref<const Eigen::MatrixXd>& points,
                                      const BinGrid& grid);

// ============================================================
// Transition tables
// ============================================================

// Pair-count and transition-probability matrices of a state sequence.
// counts(u, v) is the number of i with s_i = u, s_{i+1} = v; rows of probs
// sum to one, except rows with no outgoing transitions, which stay zero.
struct TransitionTable {
    Eigen::MatrixXd counts;      // m x m, whole-valued
    Eigen::MatrixXd probs;       // m x m row-stochastic (zero rows allowed)
    Eigen::VectorXd row_totals;  // outgoing transition counts per state
    std::int64_t n_transitions = 0;

    Eigen::Index states() const { return counts.rows(); }
};

// Counts transitions of a state sequence over m states. Requires at least
// two states in the sequence (one transition); indices must lie in [0, m).
TransitionTable transition_counts(std::span<const std::int64_t> states, std::int64_t m);

// Returns a copy of `table` with probs filled by row normalization.
TransitionTable transition_probabilities(TransitionTable table);

// ============================================================
// Bin-count selection objective
// ============================================================

// Negative roughness of a transition-probability matrix: minus the
// Frobenius norm of the five-point Laplacian over interior cells. Zero for
// matrices smaller than 3x3; never positive.
double smoothness(const TransitionTable& table);

// Frobenius distance between the probability matrices of two tables.
double frobenius_discrepancy(const TransitionTable& a, const TransitionTable& b);

struct BinSelectionConfig {
    std::vector<int> candidate_bins;       // ascending, all >= 1
    double lambda = 0.1;                   // smoothness weight, >= 0
    std::int64_t max_states = 100;         // flattened-state ceiling
    double min_nonzero_fraction = 0.15;    // density floor over visited states

    void validate() const;

    static BinSelectionConfig time_series();  // candidates 2..6, lambda 0.1
    static BinSelectionConfig tpp();          // candidates 2..20, lambda 0.08
    static BinSelectionConfig stpp();         // candidates 2..20, lambda 0.08
};

struct BinSelection {
    BinGrid grid;
    TransitionTable table0;
    TransitionTable table1;
    int bins_per_dim = 0;
    double objective = 0.0;

    struct Candidate {
        int bins = 0;
        std::int64_t states = 0;
        double nonzero_fraction = 0.0;  // nonzero pooled cells / visited^2
        double objective = 0.0;
        bool excluded = false;
        std::string reason;
    };
    std::vector<Candidate> candidates;  // one entry per configured candidate
};

// Chooses the bin count maximizing
//     ||Q0 - Q1||_F + lambda * (S(Q0) + S(Q1))
// over the candidates that survive the state-count ceiling and the density
// floor, measured as the fraction of nonzero pooled transition counts among
// all ordered pairs of visited states. Grid bounds come from the pooled componentwise
// range of both embedding matrices. Ties resolve toward fewer bins. Throws
// DegenerateDataError when every candidate is filtered out.
BinSelection select_bin_grid(const Eigen::Ref<const Eigen::MatrixXd>& emb0,
                             const Eigen::Ref<const Eigen::MatrixXd>& emb1,
                             const BinSelectionConfig& cfg);

// ============================================================
// Two-sample transition test
// ============================================================

struct ChiSquareStat {
    double statistic = 0.0;
    std::int64_t occupied_states = 0;  // states with pooled outgoing counts
};

// Transition-discrepancy statistic between two tables over the same state
// space:
//     W = sum_{u,v} [c0_u * c1_u / (c0_uv + c1_uv)] * (q0_uv - q1_uv)^2
// Cells with no pooled count contribute zero. Symmetric in its arguments;
// identically zero when the tables agree. Under a common Markov source W is
// asymptotically chi-square with occ*(occ-1) degrees of freedom.
ChiSquareStat chi_square_statistic(const TransitionTable& t0, const TransitionTable& t1);

// Same statistic computed from raw state sequences without materializing
// m x m matrices; usable when the flattened state space is large. Matches
// the dense route bitwise (cells accumulate in row-major order).
ChiSquareStat chi_square_statistic_from_states(std::span<const std::int64_t> s0,
                                               std::span<const std::int64_t> s1);

struct TestReport {
    double statistic = 0.0;
    std::int64_t dof = 0;
    double critical_value = 0.0;
    double p_value = 0.0;
    double alpha = 0.0;
    bool reject = false;
    std::int64_t occupied_states = 0;
    int bins_per_dim = 0;
    BinGrid selected_bins;  // empty when the caller supplied no grid
};

// Decision given a statistic and occupancy: dof = occ * (occ - 1), clamped
// to at least 1 so the degenerate single-state case stays well defined.
TestReport decide(const ChiSquareStat& stat, double alpha);

struct EmbeddingModel;  // embedding.hpp

// Full pipeline on two observation sequences: embed both with `model`,
// select a grid, compute the statistic, and compare against the
// (1 - alpha) chi-square quantile.
TestReport run_renal_test(const ObservationSequence& d0,
                          const ObservationSequence& d1,
                          const EmbeddingModel& model,
                          const BinSelectionConfig& cfg,
                          double alpha);

}  // namespace renal
