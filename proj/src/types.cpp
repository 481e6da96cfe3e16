#include "renal/types.hpp"

#include "renal/errors.hpp"

#include <cmath>
#include <string>

namespace renal {

void ObservationSequence::validate() const {
    const Eigen::Index n = timestamps.size();
    if (n < 2) throw InsufficientDataError("sequence needs at least two observations");
    if (values.rows() != n) {
        throw InvalidInputError("value row count does not match timestamp count");
    }
    if (values.cols() < 1) throw InvalidInputError("sequence needs at least one value dimension");
    if (!timestamps.allFinite() || !values.allFinite()) {
        throw InvalidInputError("sequence contains non-finite entries");
    }
    for (Eigen::Index i = 1; i < n; ++i) {
        if (!(timestamps(i) > timestamps(i - 1))) {
            throw InvalidInputError("timestamps must be strictly increasing (index " +
                                    std::to_string(i) + ")");
        }
    }
    if (kind == SeriesKind::regular) {
        const double g0 = timestamps(1) - timestamps(0);
        for (Eigen::Index i = 1; i + 1 < n; ++i) {
            const double g = timestamps(i + 1) - timestamps(i);
            if (std::abs(g - g0) > 1e-9 * std::abs(g0)) {
                throw InvalidInputError("regular series must be equally spaced (index " +
                                        std::to_string(i + 1) + ")");
            }
        }
    }
}

ObservationSequence make_sequence(Eigen::VectorXd timestamps, Eigen::MatrixXd values,
                                  SeriesKind kind) {
    ObservationSequence s;
    s.timestamps = std::move(timestamps);
    s.values = std::move(values);
    s.kind = kind;
    s.validate();
    return s;
}

}  // namespace renal
