#include "renal/gof.hpp"

#include "renal/chi_square.hpp"
#include "renal/embedding.hpp"
#include "renal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

namespace renal {

// ============================================================
// BinGrid
// ============================================================

std::int64_t BinGrid::state_count() const {
    std::int64_t n = 1;
    for (Eigen::Index j = 0; j < bins.size(); ++j) {
        n *= bins(j);
        if (n > (std::int64_t{1} << 40)) {
            throw InvalidInputError("bin grid state space is unreasonably large");
        }
    }
    return n;
}

void BinGrid::validate() const {
    if (bins.size() == 0) throw InvalidInputError("bin grid has no dimensions");
    if (bins.size() != lower.size() || bins.size() != upper.size()) {
        throw InvalidInputError("bin grid field sizes disagree");
    }
    for (Eigen::Index j = 0; j < bins.size(); ++j) {
        if (bins(j) < 1) throw InvalidInputError("bin counts must be >= 1");
        if (!(lower(j) < upper(j))) {
            throw InvalidInputError("bin grid needs lower < upper in every dimension");
        }
    }
}

BinGrid equal_width_grid(const Eigen::Ref<const Eigen::MatrixXd>& pooled,
                         const Eigen::VectorXi& bins_per_dim) {
    if (pooled.rows() < 1 || pooled.cols() < 1) {
        throw InsufficientDataError("equal_width_grid needs at least one point");
    }
    if (bins_per_dim.size() != pooled.cols()) {
        throw InvalidInputError("bin count vector does not match dimensionality");
    }
    if (!pooled.allFinite()) {
        throw InvalidInputError("equal_width_grid: non-finite coordinates");
    }
    BinGrid g;
    g.bins = bins_per_dim;
    g.lower = pooled.colwise().minCoeff();
    g.upper = pooled.colwise().maxCoeff();
    for (Eigen::Index j = 0; j < g.bins.size(); ++j) {
        if (g.bins(j) < 1) throw InvalidInputError("bin counts must be >= 1");
        if (g.lower(j) == g.upper(j)) {
            // Constant dimension: a single unit-width bin around the value.
            g.lower(j) -= 0.5;
            g.upper(j) += 0.5;
            g.bins(j) = 1;
            g.has_degenerate_dim = true;
        }
    }
    g.validate();
    return g;
}

BinGrid equal_width_grid(const Eigen::Ref<const Eigen::MatrixXd>& pooled,
                         int bins_per_dim) {
    return equal_width_grid(
        pooled, Eigen::VectorXi::Constant(pooled.cols(), bins_per_dim));
}

std::vector<std::int64_t> assign_bins(const Eigen::Ref<const Eigen::MatrixXd>& points,
                                      const BinGrid& grid) {
    grid.validate();
    if (points.cols() != grid.dim()) {
        throw InvalidInputError("assign_bins: point dimensionality does not match grid");
    }
    if (!points.allFinite()) {
        throw InvalidInputError("assign_bins: non-finite coordinates");
    }
    const Eigen::Index n = points.rows();
    const Eigen::Index p = points.cols();
    std::vector<std::int64_t> out(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        std::int64_t flat = 0;
        for (Eigen::Index j = 0; j < p; ++j) {
            const int b = grid.bins(j);
            const double w = grid.upper(j) - grid.lower(j);
            // Half-open bins; the top edge belongs to the last bin, and
            // out-of-range points clamp to the boundary bins.
            auto idx = static_cast<std::int64_t>(
                std::floor((points(i, j) - grid.lower(j)) * b / w));
            idx = std::clamp<std::int64_t>(idx, 0, b - 1);
            flat = flat * b + idx;
        }
        out[static_cast<std::size_t>(i)] = flat;
    }
    return out;
}

// ============================================================
// Transition tables
// ============================================================

TransitionTable transition_counts(std::span<const std::int64_t> states, std::int64_t m) {
    if (m < 1) throw InvalidInputError("transition_counts: m must be >= 1");
    if (states.size() < 2) {
        throw InsufficientDataError("transition_counts needs at least two states");
    }
    TransitionTable t;
    t.counts = Eigen::MatrixXd::Zero(m, m);
    t.probs = Eigen::MatrixXd::Zero(m, m);
    t.row_totals = Eigen::VectorXd::Zero(m);
    for (std::size_t i = 0; i + 1 < states.size(); ++i) {
        const std::int64_t u = states[i];
        const std::int64_t v = states[i + 1];
        if (u < 0 || u >= m || v < 0 || v >= m) {
            throw InvalidInputError("transition_counts: state index out of range");
        }
        t.counts(u, v) += 1.0;
        t.row_totals(u) += 1.0;
    }
    t.n_transitions = static_cast<std::int64_t>(states.size()) - 1;
    return t;
}

TransitionTable transition_probabilities(TransitionTable table) {
    const Eigen::Index m = table.states();
    table.probs = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index u = 0; u < m; ++u) {
        if (table.row_totals(u) > 0.0) {
            table.probs.row(u) = table.counts.row(u) / table.row_totals(u);
        }
    }
    return table;
}

// ============================================================
// Selection objective
// ============================================================

double smoothness(const TransitionTable& table) {
    const Eigen::Index m = table.states();
    if (m < 3) return 0.0;
    const Eigen::MatrixXd& q = table.probs;
    double sum = 0.0;
    for (Eigen::Index u = 1; u + 1 < m; ++u) {
        for (Eigen::Index v = 1; v + 1 < m; ++v) {
            const double lap = q(u + 1, v) + q(u - 1, v) + q(u, v + 1) + q(u, v - 1) -
                               4.0 * q(u, v);
            sum += lap * lap;
        }
    }
    return -std::sqrt(sum);
}

double frobenius_discrepancy(const TransitionTable& a, const TransitionTable& b) {
    if (a.states() != b.states()) {
        throw InvalidInputError("frobenius_discrepancy: table sizes disagree");
    }
    return (a.probs - b.probs).norm();
}

void BinSelectionConfig::validate() const {
    if (candidate_bins.empty()) {
        throw InvalidInputError("candidate bin list must be nonempty");
    }
    for (std::size_t i = 0; i < candidate_bins.size(); ++i) {
        if (candidate_bins[i] < 1) throw InvalidInputError("candidate bins must be >= 1");
        if (i > 0 && candidate_bins[i] <= candidate_bins[i - 1]) {
            throw InvalidInputError("candidate bins must be strictly ascending");
        }
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw InvalidInputError("lambda must be finite and >= 0");
    }
    if (max_states < 1) throw InvalidInputError("max_states must be >= 1");
    if (!(min_nonzero_fraction >= 0.0) || !(min_nonzero_fraction <= 1.0)) {
        throw InvalidInputError("min_nonzero_fraction must lie in [0, 1]");
    }
}

namespace {

std::vector<int> ascending(int lo, int hi) {
    std::vector<int> v;
    for (int b = lo; b <= hi; ++b) v.push_back(b);
    return v;
}

}  // namespace

BinSelectionConfig BinSelectionConfig::time_series() {
    BinSelectionConfig c;
    c.candidate_bins = ascending(2, 6);
    c.lambda = 0.1;
    // A 500-step sequence cannot touch 15% of a 64x64 table; see README.
    c.min_nonzero_fraction = 0.02;
    return c;
}

BinSelectionConfig BinSelectionConfig::tpp() {
    BinSelectionConfig c;
    c.candidate_bins = ascending(2, 20);
    c.lambda = 0.08;
    c.min_nonzero_fraction = 0.15;
    return c;
}

BinSelectionConfig BinSelectionConfig::stpp() {
    BinSelectionConfig c;
    c.candidate_bins = ascending(2, 20);
    c.lambda = 0.08;
    c.min_nonzero_fraction = 0.15;
    return c;
}

BinSelection select_bin_grid(const Eigen::Ref<const Eigen::MatrixXd>& emb0,
                             const Eigen::Ref<const Eigen::MatrixXd>& emb1,
                             const BinSelectionConfig& cfg) {
    cfg.validate();
    if (emb0.cols() != emb1.cols()) {
        throw InvalidInputError("select_bin_grid: embedding dimensionalities disagree");
    }
    if (emb0.rows() < 2 || emb1.rows() < 2) {
        throw InsufficientDataError("select_bin_grid needs at least two embeddings per sequence");
    }

    Eigen::MatrixXd pooled(emb0.rows() + emb1.rows(), emb0.cols());
    pooled << emb0, emb1;

    BinSelection best;
    bool found = false;
    for (int b : cfg.candidate_bins) {
        BinSelection::Candidate cand;
        cand.bins = b;
        BinGrid grid = equal_width_grid(pooled, b);
        const std::int64_t m = grid.state_count();
        cand.states = m;
        if (m > cfg.max_states) {
            cand.excluded = true;
            cand.reason = "state count exceeds max_states";
            best.candidates.push_back(std::move(cand));
            continue;
        }
        const auto s0 = assign_bins(emb0, grid);
        const auto s1 = assign_bins(emb1, grid);
        TransitionTable t0 = transition_counts(s0, m);
        TransitionTable t1 = transition_counts(s1, m);

        const Eigen::MatrixXd joint = t0.counts + t1.counts;
        const double nonzero = (joint.array() > 0.0).count();
        // Density is measured over the states the pooled trajectories actually
        // visit; unvisited grid cells say nothing about how well sampled the
        // visited part of the chain is, and their share explodes with the
        // embedding dimension.
        std::int64_t visited = 0;
        for (Eigen::Index s = 0; s < joint.rows(); ++s) {
            if (joint.row(s).sum() > 0.0 || joint.col(s).sum() > 0.0) ++visited;
        }
        cand.nonzero_fraction =
            visited > 0 ? nonzero / static_cast<double>(visited * visited) : 0.0;
        if (cand.nonzero_fraction < cfg.min_nonzero_fraction) {
            cand.excluded = true;
            cand.reason = "pooled count matrix too sparse";
            best.candidates.push_back(std::move(cand));
            continue;
        }

        t0 = transition_probabilities(std::move(t0));
        t1 = transition_probabilities(std::move(t1));
        cand.objective = frobenius_discrepancy(t0, t1) +
                         cfg.lambda * (smoothness(t0) + smoothness(t1));

        // Strict comparison keeps the smallest bin count on ties.
        if (!found || cand.objective > best.objective) {
            best.grid = grid;
            best.table0 = std::move(t0);
            best.table1 = std::move(t1);
            best.bins_per_dim = b;
            best.objective = cand.objective;
            found = true;
        }
        best.candidates.push_back(std::move(cand));
    }
    if (!found) {
        throw DegenerateDataError(
            "select_bin_grid: every candidate was filtered out; lower "
            "min_nonzero_fraction or adjust candidate_bins");
    }
    return best;
}

// ============================================================
// Statistic and decision
// ============================================================

ChiSquareStat chi_square_statistic(const TransitionTable& t0, const TransitionTable& t1) {
    const Eigen::Index m = t0.states();
    if (m != t1.states()) {
        throw InvalidInputError("chi_square_statistic: table sizes disagree");
    }
    ChiSquareStat r;
    for (Eigen::Index u = 0; u < m; ++u) {
        const double c0u = t0.row_totals(u);
        const double c1u = t1.row_totals(u);
        if (c0u + c1u > 0.0) r.occupied_states += 1;
        const double weight = c0u * c1u;
        if (weight == 0.0) continue;
        for (Eigen::Index v = 0; v < m; ++v) {
            const double pooled = t0.counts(u, v) + t1.counts(u, v);
            if (pooled == 0.0) continue;
            const double diff = t0.probs(u, v) - t1.probs(u, v);
            r.statistic += weight / pooled * (diff * diff);
        }
    }
    return r;
}

ChiSquareStat chi_square_statistic_from_states(std::span<const std::int64_t> s0,
                                               std::span<const std::int64_t> s1) {
    if (s0.size() < 2 || s1.size() < 2) {
        throw InsufficientDataError("chi_square_statistic_from_states needs two transitions");
    }
    // Ordered maps keep accumulation in row-major cell order, so the result
    // matches the dense route bitwise.
    std::map<std::int64_t, std::pair<double, double>> rows;
    std::map<std::pair<std::int64_t, std::int64_t>, std::pair<double, double>> cells;
    for (std::size_t i = 0; i + 1 < s0.size(); ++i) {
        rows[s0[i]].first += 1.0;
        cells[{s0[i], s0[i + 1]}].first += 1.0;
    }
    for (std::size_t i = 0; i + 1 < s1.size(); ++i) {
        rows[s1[i]].second += 1.0;
        cells[{s1[i], s1[i + 1]}].second += 1.0;
    }
    ChiSquareStat r;
    r.occupied_states = static_cast<std::int64_t>(rows.size());
    for (const auto& [cell, counts] : cells) {
        const auto it = rows.find(cell.first);
        const double c0u = it->second.first;
        const double c1u = it->second.second;
        const double weight = c0u * c1u;
        if (weight == 0.0) continue;
        const double pooled = counts.first + counts.second;
        const double q0 = counts.first / c0u;
        const double q1 = counts.second / c1u;
        const double diff = q0 - q1;
        r.statistic += weight / pooled * (diff * diff);
    }
    return r;
}

TestReport decide(const ChiSquareStat& stat, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw InvalidInputError("alpha must lie in (0, 1)");
    }
    TestReport rep;
    rep.statistic = stat.statistic;
    rep.occupied_states = stat.occupied_states;
    rep.dof = std::max<std::int64_t>(
        stat.occupied_states * (stat.occupied_states - 1), 1);
    rep.alpha = alpha;
    rep.critical_value = chi_square_quantile(1.0 - alpha, static_cast<int>(rep.dof));
    rep.p_value = 1.0 - chi_square_cdf(stat.statistic, static_cast<int>(rep.dof));
    rep.reject = stat.statistic >= rep.critical_value;
    return rep;
}

TestReport run_renal_test(const ObservationSequence& d0,
                          const ObservationSequence& d1,
                          const EmbeddingModel& model,
                          const BinSelectionConfig& cfg,
                          double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw InvalidInputError("alpha must lie in (0, 1)");
    }
    const Eigen::MatrixXd e0 = embed_sequence(model, d0);
    const Eigen::MatrixXd e1 = embed_sequence(model, d1);
    const BinSelection sel = select_bin_grid(e0, e1, cfg);
    const ChiSquareStat stat = chi_square_statistic(sel.table0, sel.table1);
    TestReport rep = decide(stat, alpha);
    rep.bins_per_dim = sel.bins_per_dim;
    rep.selected_bins = sel.grid;
    return rep;
}

}  // namespace renal
