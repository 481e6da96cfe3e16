#include "renal/generators.hpp"

#include "renal/errors.hpp"
#include "renal/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace renal {

namespace {

constexpr double kRegularSpacing = 0.1;

Eigen::VectorXd regular_timestamps(int n) {
    Eigen::VectorXd t(n);
    for (int i = 0; i < n; ++i) t(i) = kRegularSpacing * i;
    return t;
}

// Gaps since the previous event; the first gap is measured from `origin`
// (window start, or the last discarded warm-up event).
ObservationSequence wrap_events(const std::vector<double>& times, double origin,
                                const char* what) {
    if (times.size() < 2) {
        throw InsufficientDataError(std::string(what) +
                                    ": fewer than two events in the window");
    }
    const int n = static_cast<int>(times.size());
    Eigen::VectorXd t(n);
    Eigen::MatrixXd v(n, 1);
    double prev = origin;
    for (int i = 0; i < n; ++i) {
        t(i) = times[static_cast<std::size_t>(i)];
        v(i, 0) = t(i) - prev;
        prev = t(i);
    }
    return make_sequence(std::move(t), std::move(v), SeriesKind::event);
}

}  // namespace

// ============================================================
// ARMA
// ============================================================

ArmaSpec::ArmaSpec(std::vector<double> ar_coeffs, std::vector<double> ma_coeffs,
                   double noise_sigma)
    : ar(std::move(ar_coeffs)), ma(std::move(ma_coeffs)), sigma(noise_sigma) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw InvalidInputError("ARMA sigma must be finite and nonnegative");
    }
    for (double c : ar) {
        if (!std::isfinite(c)) throw InvalidInputError("ARMA coefficients must be finite");
    }
    for (double c : ma) {
        if (!std::isfinite(c)) throw InvalidInputError("ARMA coefficients must be finite");
    }
    if (!ar.empty()) {
        // Companion-matrix spectral radius < 1 <=> AR roots outside the
        // unit circle.
        const int p = static_cast<int>(ar.size());
        Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(p, p);
        for (int j = 0; j < p; ++j) comp(0, j) = ar[static_cast<std::size_t>(j)];
        for (int j = 1; j < p; ++j) comp(j, j - 1) = 1.0;
        const double radius =
            Eigen::EigenSolver<Eigen::MatrixXd>(comp, false).eigenvalues().array().abs().maxCoeff();
        if (!(radius < 1.0 - 1e-10)) {
            throw InvalidInputError("ARMA autoregression is not stationary");
        }
    }
}

ArmaSpec ArmaSpec::preset1() { return ArmaSpec({0.5, 0.4}, {0.65}, 1.0); }
ArmaSpec ArmaSpec::preset2() { return ArmaSpec({0.5, -0.4}, {0.3, -0.2}, 1.0); }

ObservationSequence simulate_arma(const ArmaSpec& spec, int n, std::uint64_t seed) {
    if (n < 2) throw InvalidInputError("simulate_arma: n must be >= 2");
    const int p = static_cast<int>(spec.ar.size());
    const int q = static_cast<int>(spec.ma.size());
    const int burn = std::max(200, 10 * (p + q));
    const int total = n + burn;

    Rng rng(seed);
    std::vector<double> x(static_cast<std::size_t>(total), 0.0);
    std::vector<double> e(static_cast<std::size_t>(total), 0.0);
    for (int i = 0; i < total; ++i) {
        e[static_cast<std::size_t>(i)] = spec.sigma * rng.normal();
        double v = e[static_cast<std::size_t>(i)];
        for (int j = 0; j < p; ++j) {
            if (i - 1 - j >= 0) {
                v += spec.ar[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(i - 1 - j)];
            }
        }
        for (int j = 0; j < q; ++j) {
            if (i - 1 - j >= 0) {
                v += spec.ma[static_cast<std::size_t>(j)] * e[static_cast<std::size_t>(i - 1 - j)];
            }
        }
        x[static_cast<std::size_t>(i)] = v;
    }

    Eigen::MatrixXd values(n, 1);
    for (int i = 0; i < n; ++i) values(i, 0) = x[static_cast<std::size_t>(burn + i)];
    return make_sequence(regular_timestamps(n), std::move(values), SeriesKind::regular);
}

// ============================================================
// GARCH
// ============================================================

void GarchSpec::validate() const {
    if (!(omega > 0.0)) throw InvalidInputError("GARCH omega must be positive");
    if (!(alpha >= 0.0) || !(beta >= 0.0) || !(gamma >= 0.0)) {
        throw InvalidInputError("GARCH alpha, beta, gamma must be nonnegative");
    }
    if (!(alpha + beta + 0.5 * gamma < 1.0)) {
        throw InvalidInputError("GARCH requires alpha + beta + gamma/2 < 1");
    }
}

double GarchSpec::long_run_variance() const {
    validate();
    return omega / (1.0 - alpha - beta - 0.5 * gamma);
}

ObservationSequence simulate_garch(const GarchSpec& spec, int n, std::uint64_t seed) {
    spec.validate();
    if (n < 2) throw InvalidInputError("simulate_garch: n must be >= 2");
    constexpr int burn = 500;
    Rng rng(seed);
    double var = spec.long_run_variance();
    double eta = 0.0;
    Eigen::MatrixXd values(n, 1);
    for (int i = -burn; i < n; ++i) {
        if (i > -burn) {
            const double lever = eta < 0.0 ? spec.gamma : 0.0;
            var = spec.omega + (spec.alpha + lever) * eta * eta + spec.beta * var;
        }
        eta = std::sqrt(var) * rng.normal();
        if (i >= 0) values(i, 0) = spec.mu + eta;
    }
    return make_sequence(regular_timestamps(n), std::move(values), SeriesKind::regular);
}

// ============================================================
// Temporal point processes
// ============================================================

void HawkesSpec::validate_self_exciting() const {
    if (!(mu > 0.0)) throw InvalidInputError("Hawkes mu must be positive");
    if (!(alpha >= 0.0) || !(beta > 0.0)) {
        throw InvalidInputError("Hawkes needs alpha >= 0 and beta > 0");
    }
    if (!(alpha / beta < 1.0)) {
        throw InvalidInputError("Hawkes requires alpha/beta < 1 (subcritical)");
    }
    if (!(lambda_bar >= mu)) throw InvalidInputError("lambda_bar must be >= mu");
    if (!(horizon > 0.0)) throw InvalidInputError("horizon must be positive");
}

void HawkesSpec::validate_self_correcting() const {
    if (!std::isfinite(mu)) throw InvalidInputError("mu must be finite");
    if (!(alpha >= 0.0) || !(beta >= 0.0)) {
        throw InvalidInputError("self-correcting needs alpha, beta >= 0");
    }
    if (!(lambda_bar > 0.0)) throw InvalidInputError("lambda_bar must be positive");
    if (!(horizon > 0.0)) throw InvalidInputError("horizon must be positive");
}

HawkesSpec HawkesSpec::self_exciting() {
    return HawkesSpec{1.0, 1.0, 1.25, 1e2, 100.0};
}

HawkesSpec HawkesSpec::self_correcting() {
    return HawkesSpec{2.5, 0.05, 0.25, 1e2, 100.0};
}

double se_intensity(const HawkesSpec& spec, std::span<const double> history, double t) {
    double sum = 0.0;
    for (double ti : history) {
        if (ti < t) sum += std::exp(-spec.beta * (t - ti));
    }
    return spec.mu + spec.alpha * sum;
}

double sc_log_intensity(const HawkesSpec& spec, std::span<const double> history,
                        double t) {
    std::int64_t count = 0;
    for (double ti : history) {
        if (ti < t) ++count;
    }
    return spec.mu + spec.alpha * t - spec.beta * static_cast<double>(count);
}

std::vector<double> simulate_hawkes_se_events(const HawkesSpec& spec,
                                              std::uint64_t seed, double warmup) {
    spec.validate_self_exciting();
    if (!(warmup >= 0.0)) throw InvalidInputError("warmup must be nonnegative");
    Rng rng(seed);
    std::vector<double> events;
    double s = -warmup;
    double excitation = 0.0;  // sum of exp(-beta (s - t_i)) over past events
    while (s < spec.horizon) {
        // Between events the intensity only decays, so the current value
        // bounds the future until the next acceptance.
        const double bound = spec.mu + spec.alpha * excitation;
        if (bound > spec.lambda_bar) {
            throw InternalError("self-exciting intensity exceeded lambda_bar");
        }
        const double gap = rng.exponential(bound);
        s += gap;
        if (s >= spec.horizon) break;
        excitation *= std::exp(-spec.beta * gap);
        const double lambda = spec.mu + spec.alpha * excitation;
        if (rng.uniform() * bound <= lambda) {
            events.push_back(s);
            excitation += 1.0;
        }
    }
    // Keep the window, remember the last warm-up event for gap bookkeeping.
    std::vector<double> window;
    for (double t : events) {
        if (t >= 0.0) window.push_back(t);
    }
    return window;
}

namespace {

double last_warmup_event(const HawkesSpec& spec, std::uint64_t seed, double warmup) {
    // Re-runs the deterministic stream to recover the warm-up predecessor of
    // the first window event; returns 0 when there is none.
    Rng rng(seed);
    double s = -warmup;
    double excitation = 0.0;
    double last_before_zero = 0.0;
    while (s < 0.0) {
        const double bound = spec.mu + spec.alpha * excitation;
        const double gap = rng.exponential(bound);
        s += gap;
        if (s >= 0.0) break;
        excitation *= std::exp(-spec.beta * gap);
        const double lambda = spec.mu + spec.alpha * excitation;
        if (rng.uniform() * bound <= lambda) {
            last_before_zero = s;
            excitation += 1.0;
        }
    }
    return last_before_zero;
}

}  // namespace

ObservationSequence simulate_hawkes_se(const HawkesSpec& spec, std::uint64_t seed) {
    constexpr double warmup = 50.0;
    const std::vector<double> events = simulate_hawkes_se_events(spec, seed, warmup);
    const double origin = last_warmup_event(spec, seed, warmup);
    return wrap_events(events, origin, "simulate_hawkes_se");
}

std::vector<double> simulate_self_correcting_events(const HawkesSpec& spec,
                                                    std::uint64_t seed) {
    spec.validate_self_correcting();
    Rng rng(seed);
    std::vector<double> events;
    double s = 0.0;
    std::int64_t count = 0;
    constexpr double kSegment = 1.0;  // look-ahead per thinning segment
    while (s < spec.horizon) {
        const double seg_end = std::min(s + kSegment, spec.horizon);
        // Log-intensity grows linearly between events, so the segment end
        // bounds the whole segment.
        const double bound =
            std::exp(spec.mu + spec.alpha * seg_end - spec.beta * static_cast<double>(count));
        if (bound > spec.lambda_bar) {
            throw InternalError("self-correcting bound exceeded lambda_bar");
        }
        const double gap = rng.exponential(bound);
        if (s + gap >= seg_end) {
            s = seg_end;
            continue;
        }
        s += gap;
        const double lambda =
            std::exp(spec.mu + spec.alpha * s - spec.beta * static_cast<double>(count));
        if (rng.uniform() * bound <= lambda) {
            events.push_back(s);
            ++count;
        }
    }
    return events;
}

ObservationSequence simulate_self_correcting(const HawkesSpec& spec,
                                             std::uint64_t seed) {
    return wrap_events(simulate_self_correcting_events(spec, seed), 0.0,
                       "simulate_self_correcting");
}

// ============================================================
// Spatio-temporal point processes
// ============================================================

void StppSpec::validate() const {
    if (!(mu >= 0.0)) throw InvalidInputError("STPP mu must be nonnegative");
    if (!(sigma_x > 0.0) || !(sigma_y > 0.0)) {
        throw InvalidInputError("STPP sigmas must be positive");
    }
    if (!(beta >= 0.0)) throw InvalidInputError("STPP beta must be nonnegative");
    if (!(c >= 0.0)) throw InvalidInputError("STPP kernel scale must be nonnegative");
    if (!(rho > -1.0) || !(rho < 1.0)) {
        throw InvalidInputError("STPP rho must lie in (-1, 1)");
    }
    if (!(lambda_bar > 0.0) || !(horizon > 0.0)) {
        throw InvalidInputError("STPP lambda_bar and horizon must be positive");
    }
}

StppSpec StppSpec::standard_diffusion() {
    StppSpec s;
    s.kernel = Kernel::diffusion;
    s.mu = 1.0;
    s.sigma_x = 0.5;
    s.sigma_y = 0.5;
    s.beta = 0.25;
    s.c = 1.0;
    return s;
}

StppSpec StppSpec::gaussian_offset() {
    StppSpec s;
    s.kernel = Kernel::gaussian;
    s.mu = 2.5;
    s.sigma_x = 1.0;
    s.sigma_y = 1.0;
    s.beta = 1.0;
    s.c = 1.0;
    s.offset_x = 0.1;
    s.offset_y = 0.1;
    s.rho = 0.0;
    return s;
}

double stpp_kernel(const StppSpec& spec, double dt, double dx, double dy) {
    if (!(dt > 0.0)) return 0.0;
    const double decay = spec.c * std::exp(-spec.beta * dt);
    if (spec.kernel == StppSpec::Kernel::diffusion) {
        const double norm = 2.0 * std::numbers::pi * spec.sigma_x * spec.sigma_y * dt;
        const double q = (dx / spec.sigma_x) * (dx / spec.sigma_x) +
                         (dy / spec.sigma_y) * (dy / spec.sigma_y);
        return decay / norm * std::exp(-q / (2.0 * dt));
    }
    const double r2 = 1.0 - spec.rho * spec.rho;
    const double ax = (dx - spec.offset_x) / spec.sigma_x;
    const double ay = (dy - spec.offset_y) / spec.sigma_y;
    const double q = ax * ax + ay * ay - 2.0 * spec.rho * ax * ay;
    const double norm =
        2.0 * std::numbers::pi * spec.sigma_x * spec.sigma_y * std::sqrt(r2);
    return decay / norm * std::exp(-q / (2.0 * r2));
}

double stpp_intensity(const StppSpec& spec, std::span<const SpatialEvent> history,
                      double t, double x, double y) {
    double sum = spec.mu;
    for (const SpatialEvent& ev : history) {
        if (ev.t < t) sum += stpp_kernel(spec, t - ev.t, x - ev.x, y - ev.y);
    }
    return sum;
}

std::vector<SpatialEvent> simulate_stpp_events(const StppSpec& spec,
                                               std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    std::vector<SpatialEvent> events;
    // Dominating process: rate lambda_bar in time, uniform over the unit
    // square; candidate locations outside the square never arise.
    double s = 0.0;
    while (true) {
        s += rng.exponential(spec.lambda_bar);
        if (s >= spec.horizon) break;
        const double px = rng.uniform();
        const double py = rng.uniform();
        const double lambda = stpp_intensity(spec, events, s, px, py);
        if (lambda > spec.lambda_bar) {
            throw InternalError("spatio-temporal intensity exceeded lambda_bar");
        }
        if (rng.uniform() * spec.lambda_bar <= lambda) {
            events.push_back({s, px, py});
        }
    }
    return events;
}

ObservationSequence simulate_stpp(const StppSpec& spec, std::uint64_t seed) {
    const std::vector<SpatialEvent> events = simulate_stpp_events(spec, seed);
    if (events.size() < 2) {
        throw InsufficientDataError("simulate_stpp: fewer than two events in the window");
    }
    const int n = static_cast<int>(events.size());
    Eigen::VectorXd t(n);
    Eigen::MatrixXd v(n, 3);
    double prev = 0.0;
    for (int i = 0; i < n; ++i) {
        const SpatialEvent& ev = events[static_cast<std::size_t>(i)];
        t(i) = ev.t;
        v(i, 0) = ev.t - prev;
        v(i, 1) = ev.x;
        v(i, 2) = ev.y;
        prev = ev.t;
    }
    return make_sequence(std::move(t), std::move(v), SeriesKind::event);
}

}  // namespace renal
