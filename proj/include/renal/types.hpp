#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace renal {

// Whether observations arrive on a fixed clock or at irregular event times.
enum class SeriesKind { regular, event };

// A single observed sequence: n timestamps (strictly increasing) and an
// n x d value matrix, one row per observation. For event data the first
// value column is the gap since the previous event; for regular data the
// timestamps are equally spaced.
struct ObservationSequence {
    Eigen::VectorXd timestamps;
    Eigen::MatrixXd values;
    SeriesKind kind = SeriesKind::regular;

    Eigen::Index size() const { return timestamps.size(); }
    Eigen::Index dim() const { return values.cols(); }

    // Gap consumed by step i of the embedding recursion: the time elapsed
    // since the previous observation. The first step has no predecessor and
    // reuses the first gap, which keeps the recursion causal (prefixes embed
    // identically to the full sequence).
    double step_gap(Eigen::Index i) const {
        if (i <= 0) return timestamps(1) - timestamps(0);
        return timestamps(i) - timestamps(i - 1);
    }

    // Validates invariants and throws InvalidInputError on violation.
    void validate() const;
};

// Convenience factory; validates before returning.
ObservationSequence make_sequence(Eigen::VectorXd timestamps,
                                  Eigen::MatrixXd values,
                                  SeriesKind kind);

}  // namespace renal
