#pragma once

#include "renal/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace renal {

// ============================================================
// Regular time series
// ============================================================

// ARMA(p, q): x_i = sum_j ar[j] x_{i-j} + e_i + sum_j ma[j] e_{i-j},
// e ~ N(0, sigma^2). The AR polynomial must have all roots outside the
// unit circle; the constructor rejects non-stationary coefficients.
struct ArmaSpec {
    std::vector<double> ar;
    std::vector<double> ma;
    double sigma = 1.0;

    ArmaSpec(std::vector<double> ar_coeffs, std::vector<double> ma_coeffs,
             double noise_sigma);

    static ArmaSpec preset1();  // ARMA(2,1): ar {0.5, 0.4},  ma {0.65}
    static ArmaSpec preset2();  // ARMA(2,2): ar {0.5, -0.4}, ma {0.3, -0.2}
};

// GJR-type GARCH(1,1) with a leverage term on negative shocks:
//   x_i = mu + eta_i,   eta_i = sigma_i * eps_i,   eps ~ N(0, 1)
//   sigma_i^2 = omega + (alpha + gamma * 1[eta_{i-1} < 0]) * eta_{i-1}^2
//               + beta * sigma_{i-1}^2
// Requires alpha + beta + gamma/2 < 1 so the unconditional variance
// omega / (1 - alpha - beta - gamma/2) is finite.
struct GarchSpec {
    double mu = 0.03;
    double omega = 0.04;
    double alpha = 0.04;
    double gamma = 0.02;
    double beta = 0.9;

    void validate() const;
    double long_run_variance() const;
};

// Regular series sampled at fixed spacing 0.1. Burn-in: max(200, 10(p+q))
// for ARMA, 500 for GARCH. Pure function of (spec, n, seed).
ObservationSequence simulate_arma(const ArmaSpec& spec, int n, std::uint64_t seed);
ObservationSequence simulate_garch(const GarchSpec& spec, int n, std::uint64_t seed);

// ============================================================
// Temporal point processes
// ============================================================

// Shared parameter block for the two temporal processes.
// Self-exciting (Hawkes): intensity mu + alpha * sum exp(-beta (t - t_i)),
// requires alpha/beta < 1. Self-correcting: intensity
// exp(mu + alpha t - beta N(t-)). lambda_bar caps every thinning bound;
// exceeding it raises InternalError instead of silently under-sampling.
struct HawkesSpec {
    double mu = 1.0;
    double alpha = 1.0;
    double beta = 1.25;
    double lambda_bar = 1e2;
    double horizon = 100.0;

    void validate_self_exciting() const;
    void validate_self_correcting() const;

    static HawkesSpec self_exciting();    // mu 1,   alpha 1,    beta 1.25
    static HawkesSpec self_correcting();  // mu 2.5, alpha 0.05, beta 0.25
};

// Conditional intensity of the self-exciting process at time t given the
// events of `history` strictly before t.
double se_intensity(const HawkesSpec& spec, std::span<const double> history, double t);

// Log-intensity of the self-correcting process: mu + alpha t - beta N(t-).
double sc_log_intensity(const HawkesSpec& spec, std::span<const double> history,
                        double t);

// Raw event times in [0, horizon) by thinning. The self-exciting sampler
// warms up over [-warmup, 0) and discards the warm-up events so counts on
// the window match the stationary rate mu / (1 - alpha/beta) * horizon;
// the self-correcting process depends on absolute time and starts cold.
std::vector<double> simulate_hawkes_se_events(const HawkesSpec& spec,
                                              std::uint64_t seed,
                                              double warmup = 50.0);
std::vector<double> simulate_self_correcting_events(const HawkesSpec& spec,
                                                    std::uint64_t seed);

// Event-sequence wrappers: timestamps are the event times, the single value
// column is the gap since the previous event (the discarded warm-up
// predecessor for the first self-exciting event, the window start
// otherwise). Throws InsufficientDataError when fewer than two events land
// in the window.
ObservationSequence simulate_hawkes_se(const HawkesSpec& spec, std::uint64_t seed);
ObservationSequence simulate_self_correcting(const HawkesSpec& spec,
                                             std::uint64_t seed);

// ============================================================
// Spatio-temporal point processes
// ============================================================

struct SpatialEvent {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
};

// Self-exciting process on [0, horizon) x [0,1)^2 with intensity
// mu + sum kernel(t - t_i, x - x_i, y - y_i), restricted to the unit
// square. Two kernel families:
//   diffusion: c * exp(-beta dt) / (2 pi sx sy dt)
//              * exp(-((dx/sx)^2 + (dy/sy)^2) / (2 dt))
//   gaussian:  c * exp(-beta dt) / (2 pi sx sy sqrt(1-rho^2))
//              * exp(-q / (2 (1-rho^2))), with
//              q = ((dx-ox)/sx)^2 + ((dy-oy)/sy)^2
//                  - 2 rho (dx-ox)(dy-oy)/(sx sy)
struct StppSpec {
    enum class Kernel { diffusion, gaussian };
    Kernel kernel = Kernel::diffusion;
    double mu = 1.0;
    double sigma_x = 0.5;
    double sigma_y = 0.5;
    double beta = 0.25;
    double c = 1.0;
    double offset_x = 0.0;  // gaussian kernel mean offset
    double offset_y = 0.0;
    double rho = 0.0;       // gaussian kernel correlation
    double lambda_bar = 1e4;
    double horizon = 1.0;

    void validate() const;

    static StppSpec standard_diffusion();  // mu 1,   sigma 0.5, beta 0.25, c 1
    static StppSpec gaussian_offset();     // mu 2.5, sigma 1, beta 1, offset 0.1
};

// Triggering kernel value at lag (dt, dx, dy), dt > 0.
double stpp_kernel(const StppSpec& spec, double dt, double dx, double dy);

// Conditional intensity at (t, x, y) given events strictly before t.
double stpp_intensity(const StppSpec& spec, std::span<const SpatialEvent> history,
                      double t, double x, double y);

std::vector<SpatialEvent> simulate_stpp_events(const StppSpec& spec,
                                               std::uint64_t seed);

// Event-sequence wrapper with value columns (gap, x, y).
ObservationSequence simulate_stpp(const StppSpec& spec, std::uint64_t seed);

}  // namespace renal
