// Independent reference computations used to check the library: quadrature,
// series expansions, direct discretizations. Everything here is written from
// the defining formulas, not by calling the code under test.
#pragma once

#include "renal/generators.hpp"
#include "renal/rng.hpp"
#include "renal/types.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracles {

// Composite Simpson integration of f over [a, b] with n panels (n even).
template <typename F>
double simpson(F f, double a, double b, int n) {
    if (n % 2 != 0) ++n;
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) {
        sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}

// Chi-square density written directly from the definition.
inline double chi2_pdf(double x, double dof) {
    if (x <= 0.0) return 0.0;
    const double k2 = dof / 2.0;
    return std::exp((k2 - 1.0) * std::log(x) - x / 2.0 - k2 * std::numbers::ln2 -
                    std::lgamma(k2));
}

// CDF by quadrature. Substituting t = u^2 turns the integrand into
// 2 u^(dof-1) exp(-u^2/2) / (2^(dof/2) Gamma(dof/2)), which is analytic on
// [0, inf) for every integer dof, so composite Simpson converges at full
// order even where the raw density jumps (dof=2) or has a kink (dof=3).
inline double chi2_cdf_quadrature(double x, int dof) {
    if (x <= 0.0) return 0.0;
    const double log_norm =
        std::numbers::ln2 - (dof / 2.0) * std::numbers::ln2 - std::lgamma(dof / 2.0);
    auto g = [dof, log_norm](double u) {
        if (u <= 0.0) return dof == 1 ? std::exp(log_norm) : 0.0;
        return std::exp(log_norm + (dof - 1.0) * std::log(u) - u * u / 2.0);
    };
    return simpson(g, 0.0, std::sqrt(x), 40000);
}

// Quantile by bisection on the quadrature CDF.
inline double chi2_quantile_quadrature(double p, int dof) {
    double lo = 0.0, hi = 1.0;
    while (chi2_cdf_quadrature(hi, dof) < p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (chi2_cdf_quadrature(mid, dof) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Standard normal CDF via erf.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// Moving-average weights psi_j of a causal ARMA model: psi_0 = 1,
// psi_j = theta_j + sum_{k=1..min(j,p)} phi_k psi_{j-k}.
inline std::vector<double> arma_psi_weights(const std::vector<double>& ar,
                                            const std::vector<double>& ma,
                                            int terms) {
    std::vector<double> psi(static_cast<std::size_t>(terms), 0.0);
    psi[0] = 1.0;
    for (int j = 1; j < terms; ++j) {
        double v = j <= static_cast<int>(ma.size())
                       ? ma[static_cast<std::size_t>(j - 1)]
                       : 0.0;
        for (int k = 1; k <= std::min<int>(j, static_cast<int>(ar.size())); ++k) {
            v += ar[static_cast<std::size_t>(k - 1)] *
                 psi[static_cast<std::size_t>(j - k)];
        }
        psi[static_cast<std::size_t>(j)] = v;
    }
    return psi;
}

// Autocovariance at the given lag from the psi-weight expansion,
// gamma(k) = sigma^2 sum_j psi_j psi_{j+k}.
inline double arma_autocovariance(const std::vector<double>& ar,
                                  const std::vector<double>& ma, double sigma,
                                  int lag, int terms = 4000) {
    const std::vector<double> psi = arma_psi_weights(ar, ma, terms + lag);
    double sum = 0.0;
    for (int j = 0; j < terms; ++j) {
        sum += psi[static_cast<std::size_t>(j)] *
               psi[static_cast<std::size_t>(j + lag)];
    }
    return sigma * sigma * sum;
}

inline double arma_lag1_acf(const std::vector<double>& ar,
                            const std::vector<double>& ma, double sigma) {
    return arma_autocovariance(ar, ma, sigma, 1) /
           arma_autocovariance(ar, ma, sigma, 0);
}

// One-sample Kolmogorov-Smirnov distance between a sample and a CDF.
template <typename Cdf>
double ks_distance(std::vector<double> sample, Cdf cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        worst = std::max(worst, std::abs(f - static_cast<double>(i) / n));
        worst = std::max(worst, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return worst;
}

// Two-sample Kolmogorov-Smirnov distance; ties are handled by comparing the
// empirical CDFs at every pooled point.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::sort(pooled.begin(), pooled.end());
    double worst = 0.0;
    for (const double x : pooled) {
        const double fa =
            static_cast<double>(std::upper_bound(a.begin(), a.end(), x) - a.begin()) /
            static_cast<double>(a.size());
        const double fb =
            static_cast<double>(std::upper_bound(b.begin(), b.end(), x) - b.begin()) /
            static_cast<double>(b.size());
        worst = std::max(worst, std::abs(fa - fb));
    }
    return worst;
}

// Finite-state Markov chain sample path from a row-stochastic matrix.
inline std::vector<std::int64_t> markov_chain_path(const Eigen::MatrixXd& p,
                                                   int start, int n,
                                                   std::uint64_t seed) {
    renal::Rng rng(seed);
    std::vector<std::int64_t> path;
    path.reserve(static_cast<std::size_t>(n));
    int state = start;
    path.push_back(state);
    for (int i = 1; i < n; ++i) {
        const double u = rng.uniform();
        double acc = 0.0;
        int next = static_cast<int>(p.cols()) - 1;
        for (int j = 0; j < p.cols(); ++j) {
            acc += p(state, j);
            if (u < acc) {
                next = j;
                break;
            }
        }
        state = next;
        path.push_back(state);
    }
    return path;
}

// ------------------------------------------------------------
// Time-discretization oracles for the point processes: events fall on a
// 1e-4 grid with per-step Bernoulli acceptance at probability intensity*dt.
// These share none of the thinning logic under test.
// ------------------------------------------------------------

inline int se_grid_count(const renal::HawkesSpec& spec, double horizon, double dt,
                         std::uint64_t seed) {
    renal::Rng rng(seed);
    int count = 0;
    double excitation = 0.0;  // sum of exp(-beta (t - t_i))
    const double decay = std::exp(-spec.beta * dt);
    for (double t = 0.0; t < horizon; t += dt) {
        const double lambda = spec.mu + spec.alpha * excitation;
        excitation *= decay;
        if (rng.uniform() < lambda * dt) {
            ++count;
            excitation += 1.0;
        }
    }
    return count;
}

inline int sc_grid_count(const renal::HawkesSpec& spec, double horizon, double dt,
                         std::uint64_t seed) {
    renal::Rng rng(seed);
    int count = 0;
    for (double t = 0.0; t < horizon; t += dt) {
        const double lambda = std::exp(spec.mu + spec.alpha * t - spec.beta * count);
        if (rng.uniform() < lambda * dt) ++count;
    }
    return count;
}

// Kernel written straight from the defining formulas.
inline double stpp_kernel_direct(const renal::StppSpec& spec, double delta_t,
                                 double dx, double dy) {
    if (delta_t <= 0.0) return 0.0;
    if (spec.kernel == renal::StppSpec::Kernel::diffusion) {
        const double norm = spec.c * std::exp(-spec.beta * delta_t) /
                            (2.0 * std::numbers::pi * spec.sigma_x * spec.sigma_y *
                             delta_t);
        const double q = (dx * dx) / (spec.sigma_x * spec.sigma_x) +
                         (dy * dy) / (spec.sigma_y * spec.sigma_y);
        return norm * std::exp(-q / (2.0 * delta_t));
    }
    const double ax = dx - spec.offset_x;
    const double ay = dy - spec.offset_y;
    const double r2 = 1.0 - spec.rho * spec.rho;
    const double norm = spec.c * std::exp(-spec.beta * delta_t) /
                        (2.0 * std::numbers::pi * spec.sigma_x * spec.sigma_y *
                         std::sqrt(r2));
    const double q = (ax * ax) / (spec.sigma_x * spec.sigma_x) -
                     2.0 * spec.rho * ax * ay / (spec.sigma_x * spec.sigma_y) +
                     (ay * ay) / (spec.sigma_y * spec.sigma_y);
    return norm * std::exp(-q / (2.0 * r2));
}

// Grid oracle for the spatio-temporal process: per step, a uniform location
// proposal accepted with probability intensity(t, x, y) * dt; accepted
// proposals join the history with their location.
inline int stpp_grid_count(const renal::StppSpec& spec, double dt,
                           std::uint64_t seed) {
    renal::Rng rng(seed);
    std::vector<renal::SpatialEvent> history;
    for (double t = 0.0; t < spec.horizon; t += dt) {
        const double x = rng.uniform();
        const double y = rng.uniform();
        double lambda = spec.mu;
        for (const renal::SpatialEvent& ev : history) {
            lambda += stpp_kernel_direct(spec, t - ev.t, x - ev.x, y - ev.y);
        }
        if (rng.uniform() < lambda * dt) {
            history.push_back({t, x, y});
        }
    }
    return static_cast<int>(history.size());
}

}  // namespace oracles
