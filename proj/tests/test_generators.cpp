#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "renal/errors.hpp"
#include "renal/generators.hpp"
#include "renal/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

using namespace renal;

namespace {

template <typename A, typename B>
bool same_bits(const A& a, const B& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return (a.array() == b.array()).all();
}

bool sequences_identical(const ObservationSequence& a, const ObservationSequence& b) {
    return a.kind == b.kind && same_bits(a.timestamps, b.timestamps) &&
           same_bits(a.values, b.values);
}

}  // namespace

TEST_CASE("arma basics: zeros at zero noise, clock, determinism") {
    const ArmaSpec quiet({0.5, 0.4}, {0.65}, 0.0);
    const ObservationSequence z = simulate_arma(quiet, 50, 3);
    CHECK(z.values.cwiseAbs().maxCoeff() == 0.0);
    CHECK(z.kind == SeriesKind::regular);
    CHECK(z.size() == 50);
    CHECK(z.dim() == 1);
    for (Eigen::Index i = 1; i < z.size(); ++i) {
        CHECK(std::abs(z.timestamps(i) - z.timestamps(i - 1) - 0.1) < 1e-12);
    }

    const ObservationSequence a = simulate_arma(ArmaSpec::preset1(), 300, 9);
    const ObservationSequence b = simulate_arma(ArmaSpec::preset1(), 300, 9);
    const ObservationSequence c = simulate_arma(ArmaSpec::preset1(), 300, 10);
    CHECK(sequences_identical(a, b));
    CHECK_FALSE(same_bits(a.values, c.values));
    CHECK(a.values.allFinite());

    CHECK_THROWS_AS(ArmaSpec({0.5, 0.6}, {}, 1.0), InvalidInputError);  // unit root
    CHECK_THROWS_AS(ArmaSpec({0.5}, {}, -1.0), InvalidInputError);
}

TEST_CASE("arma long-run moments match the psi-weight expansion") {
    const ObservationSequence seq = simulate_arma(ArmaSpec::preset1(), 100000, 21);
    const Eigen::VectorXd x = seq.values.col(0);
    const double n = static_cast<double>(x.size());

    const double mean = x.mean();
    // Zero-mean process; the band is three standard errors of the sample
    // mean, with the long-run variance sigma^2 (sum psi)^2 from the
    // moving-average expansion.
    const auto psi = oracles::arma_psi_weights({0.5, 0.4}, {0.65}, 4000);
    double psi_sum = 0.0;
    for (double w : psi) psi_sum += w;
    const double lrv = psi_sum * psi_sum;
    CHECK(std::abs(mean) < 3.0 * std::sqrt(lrv / n));

    double c0 = 0.0, c1 = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double d = x(i) - mean;
        c0 += d * d;
        if (i + 1 < x.size()) c1 += d * (x(i + 1) - mean);
    }
    const double acf1 = c1 / c0;
    const double want = oracles::arma_lag1_acf({0.5, 0.4}, {0.65}, 1.0);
    CHECK(std::abs(acf1 - want) < 0.02);

    // The variance itself should sit near sigma^2 sum psi_j^2.
    const double var_want = oracles::arma_autocovariance({0.5, 0.4}, {0.65}, 1.0, 0);
    CHECK(std::abs(c0 / n - var_want) < 0.1 * var_want);
}

TEST_CASE("second arma preset differs and stays stationary") {
    const ObservationSequence a = simulate_arma(ArmaSpec::preset2(), 5000, 33);
    CHECK(a.values.allFinite());
    const double var = (a.values.col(0).array() - a.values.col(0).mean()).square().mean();
    const double want = oracles::arma_autocovariance({0.5, -0.4}, {0.3, -0.2}, 1.0, 0);
    CHECK(std::abs(var - want) < 0.15 * want);
}

TEST_CASE("garch collapses to white noise without feedback") {
    GarchSpec flat;
    flat.alpha = 0.0;
    flat.gamma = 0.0;
    flat.beta = 0.0;
    CHECK(std::abs(flat.long_run_variance() - flat.omega) < 1e-15);

    const ObservationSequence seq = simulate_garch(flat, 100000, 17);
    const Eigen::VectorXd x = seq.values.col(0);
    const double mean = x.mean();
    const double var = (x.array() - mean).square().mean();
    CHECK(std::abs(mean - flat.mu) < 0.01);
    CHECK(std::abs(var - flat.omega) < 0.05 * flat.omega);
}

TEST_CASE("garch default spec is finite, deterministic, near its variance") {
    GarchSpec spec;
    CHECK(std::abs(spec.long_run_variance() - 0.8) < 1e-12);

    const ObservationSequence a = simulate_garch(spec, 100000, 23);
    const ObservationSequence b = simulate_garch(spec, 100000, 23);
    CHECK(sequences_identical(a, b));
    CHECK(a.values.allFinite());
    CHECK(a.kind == SeriesKind::regular);

    const double var =
        (a.values.col(0).array() - a.values.col(0).mean()).square().mean();
    CHECK(var > 0.6);
    CHECK(var < 1.0);

    GarchSpec bad;
    bad.beta = 0.97;  // alpha + beta + gamma/2 = 1.02
    CHECK_THROWS_AS(bad.validate(), InvalidInputError);
}

TEST_CASE("self-exciting counts follow the branching formula") {
    // Expected window count is mu * horizon / (1 - alpha/beta) after the
    // warm-up removes the cold start.
    const double expected[] = {100.0, 100.0 / (1.0 - 0.4), 500.0};
    const double alphas[] = {0.0, 0.5, 1.0};
    for (int k = 0; k < 3; ++k) {
        HawkesSpec spec = HawkesSpec::self_exciting();
        spec.alpha = alphas[k];
        double total = 0.0;
        const int runs = 200;
        for (int r = 0; r < runs; ++r) {
            total += static_cast<double>(
                simulate_hawkes_se_events(
                    spec, derive_seed(7100, {static_cast<std::uint64_t>(k),
                                             static_cast<std::uint64_t>(r)}),
                    50.0)
                    .size());
        }
        const double mean = total / runs;
        CHECK(std::abs(mean - expected[k]) < 0.05 * expected[k]);
    }
}

TEST_CASE("self-exciting intensity jumps by alpha at an event") {
    const HawkesSpec spec = HawkesSpec::self_exciting();
    const std::vector<double> history{2.0};
    const double before = se_intensity(spec, history, 2.0);
    const double after = se_intensity(spec, history, 2.0 + 1e-12);
    CHECK(std::abs(before - spec.mu) < 1e-15);
    CHECK(std::abs(after - before - spec.alpha) < 1e-9);

    CHECK(se_intensity(spec, {}, 5.0) == spec.mu);
}

TEST_CASE("self-exciting guard rails") {
    HawkesSpec capped = HawkesSpec::self_exciting();
    capped.lambda_bar = 1.5;  // first accepted event pushes the bound to 2
    CHECK_THROWS_AS(simulate_hawkes_se_events(capped, 5, 50.0), InternalError);

    HawkesSpec tiny = HawkesSpec::self_exciting();
    tiny.horizon = 1e-6;
    CHECK_THROWS_AS(simulate_hawkes_se(tiny, 5), InsufficientDataError);

    HawkesSpec unstable = HawkesSpec::self_exciting();
    unstable.alpha = 1.5;  // alpha/beta >= 1
    unstable.beta = 1.0;
    CHECK_THROWS_AS(simulate_hawkes_se_events(unstable, 5, 50.0), InvalidInputError);
}

TEST_CASE("event wrappers carry gaps in the value column") {
    const ObservationSequence se = simulate_hawkes_se(HawkesSpec::self_exciting(), 41);
    CHECK(se.kind == SeriesKind::event);
    CHECK(se.dim() == 1);
    for (Eigen::Index i = 1; i < se.size(); ++i) {
        CHECK(se.values(i, 0) == se.timestamps(i) - se.timestamps(i - 1));
        CHECK(se.values(i, 0) > 0.0);
    }
    // The first gap reaches back to the discarded warm-up predecessor.
    CHECK(se.values(0, 0) >= se.timestamps(0));

    const ObservationSequence sc =
        simulate_self_correcting(HawkesSpec::self_correcting(), 43);
    CHECK(sc.kind == SeriesKind::event);
    CHECK(sc.values(0, 0) == sc.timestamps(0));  // cold start at the origin
    for (Eigen::Index i = 1; i < sc.size(); ++i) {
        CHECK(sc.values(i, 0) == sc.timestamps(i) - sc.timestamps(i - 1));
    }

    CHECK(sequences_identical(simulate_hawkes_se(HawkesSpec::self_exciting(), 41), se));
}

TEST_CASE("self-correcting log intensity is piecewise linear with resets") {
    const HawkesSpec spec = HawkesSpec::self_correcting();
    const std::vector<double> history{1.0, 4.0};

    // Slope alpha between events, exactly.
    const double l1 = sc_log_intensity(spec, history, 1.5);
    const double l2 = sc_log_intensity(spec, history, 3.5);
    CHECK(std::abs((l2 - l1) - spec.alpha * 2.0) < 1e-12);

    // Each event drops the log intensity by beta.
    const double before = sc_log_intensity(spec, history, 4.0);
    const double after = sc_log_intensity(spec, history, 4.0 + 1e-12);
    CHECK(std::abs(before - after - spec.beta) < 1e-9);

    CHECK(sc_log_intensity(spec, {}, 0.0) == spec.mu);
}

TEST_CASE("self-correcting settles at the alpha over beta rate") {
    HawkesSpec spec = HawkesSpec::self_correcting();
    spec.horizon = 1e4;
    const auto events = simulate_self_correcting_events(spec, 71);
    const double rate = static_cast<double>(events.size()) / spec.horizon;
    CHECK(std::abs(rate - 0.2) < 0.02);

    for (std::size_t i = 1; i < events.size(); ++i) CHECK(events[i] > events[i - 1]);
}

TEST_CASE("thinned samplers match grid discretizations") {
    // Count distributions from the exact thinning samplers and from a
    // first-order Bernoulli grid must agree; two-sample KS over 500 runs.
    const double dt = 1e-4;

    HawkesSpec se = HawkesSpec::self_exciting();
    se.horizon = 2.0;
    std::vector<double> thin_se, grid_se;
    for (int r = 0; r < 500; ++r) {
        const auto s1 = derive_seed(7301, {static_cast<std::uint64_t>(r)});
        const auto s2 = derive_seed(7302, {static_cast<std::uint64_t>(r)});
        thin_se.push_back(static_cast<double>(
            simulate_hawkes_se_events(se, s1, 0.0).size()));
        grid_se.push_back(static_cast<double>(oracles::se_grid_count(se, se.horizon, dt, s2)));
    }
    CHECK(oracles::ks_two_sample(thin_se, grid_se) <= 0.1);

    HawkesSpec sc = HawkesSpec::self_correcting();
    sc.horizon = 5.0;
    std::vector<double> thin_sc, grid_sc;
    for (int r = 0; r < 500; ++r) {
        const auto s1 = derive_seed(7303, {static_cast<std::uint64_t>(r)});
        const auto s2 = derive_seed(7304, {static_cast<std::uint64_t>(r)});
        thin_sc.push_back(static_cast<double>(
            simulate_self_correcting_events(sc, s1).size()));
        grid_sc.push_back(static_cast<double>(oracles::sc_grid_count(sc, sc.horizon, dt, s2)));
    }
    CHECK(oracles::ks_two_sample(thin_sc, grid_sc) <= 0.1);

    const StppSpec stpp = StppSpec::standard_diffusion();
    std::vector<double> thin_st, grid_st;
    for (int r = 0; r < 500; ++r) {
        const auto s1 = derive_seed(7305, {static_cast<std::uint64_t>(r)});
        const auto s2 = derive_seed(7306, {static_cast<std::uint64_t>(r)});
        thin_st.push_back(static_cast<double>(simulate_stpp_events(stpp, s1).size()));
        grid_st.push_back(static_cast<double>(oracles::stpp_grid_count(stpp, dt, s2)));
    }
    CHECK(oracles::ks_two_sample(thin_st, grid_st) <= 0.1);
}

TEST_CASE("spatio-temporal kernel properties") {
    const StppSpec spec = StppSpec::standard_diffusion();

    // Isotropic when the two sigmas agree: value depends on radius only.
    const double r = 0.3, dt = 0.7;
    const double base = stpp_kernel(spec, dt, r, 0.0);
    for (double angle : {0.3, 1.1, 2.8}) {
        const double k = stpp_kernel(spec, dt, r * std::cos(angle), r * std::sin(angle));
        CHECK(std::abs(k - base) < 1e-10 * base);
    }

    // Spot agreement with the directly-transcribed formulas.
    CHECK(std::abs(stpp_kernel(spec, 0.5, 0.2, -0.1) -
                   oracles::stpp_kernel_direct(spec, 0.5, 0.2, -0.1)) < 1e-12);
    const StppSpec gauss = StppSpec::gaussian_offset();
    CHECK(std::abs(stpp_kernel(gauss, 0.4, 0.3, 0.2) -
                   oracles::stpp_kernel_direct(gauss, 0.4, 0.3, 0.2)) < 1e-12);

    // Spatial mass integrates to c * exp(-beta dt); nested Simpson panels.
    for (const StppSpec& s : {spec, gauss}) {
        for (double lag : {0.2, 0.8}) {
            const double spread =
                s.kernel == StppSpec::Kernel::diffusion
                    ? std::max(s.sigma_x, s.sigma_y) * std::sqrt(lag)
                    : std::max(s.sigma_x, s.sigma_y);
            const double l = 10.0 * spread + 0.5;
            const double mass = oracles::simpson(
                [&](double dx) {
                    return oracles::simpson(
                        [&](double dy) { return stpp_kernel(s, lag, dx, dy); },
                        -l, l, 400);
                },
                -l, l, 400);
            const double want = s.c * std::exp(-s.beta * lag);
            CHECK(std::abs(mass - want) < 1e-3 * want);
        }
    }

    // No history: the intensity is the background rate.
    CHECK(stpp_intensity(spec, {}, 0.5, 0.3, 0.3) == spec.mu);
}

TEST_CASE("spatio-temporal simulation output shape") {
    StppSpec spec = StppSpec::standard_diffusion();
    spec.mu = 50.0;  // enough background events to fill a sequence
    const ObservationSequence seq = simulate_stpp(spec, 57);
    CHECK(seq.kind == SeriesKind::event);
    CHECK(seq.dim() == 3);
    CHECK(seq.values(0, 0) == seq.timestamps(0));
    for (Eigen::Index i = 0; i < seq.size(); ++i) {
        if (i >= 1) {
            CHECK(seq.values(i, 0) == seq.timestamps(i) - seq.timestamps(i - 1));
        }
        CHECK(seq.values(i, 1) >= 0.0);
        CHECK(seq.values(i, 1) < 1.0);
        CHECK(seq.values(i, 2) >= 0.0);
        CHECK(seq.values(i, 2) < 1.0);
        CHECK(seq.timestamps(i) < spec.horizon);
    }
    CHECK(sequences_identical(simulate_stpp(spec, 57), seq));

    StppSpec capped = spec;
    capped.lambda_bar = 40.0;  // below the background rate of 50
    CHECK_THROWS_AS(simulate_stpp_events(capped, 5), InternalError);

    StppSpec quiet = spec;
    quiet.mu = 1e-9;
    quiet.c = 1e-9;
    CHECK_THROWS_AS(simulate_stpp(quiet, 5), InsufficientDataError);
}
