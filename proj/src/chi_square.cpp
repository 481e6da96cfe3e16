#include "renal/chi_square.hpp"

#include "renal/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace renal {

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

// Lower incomplete gamma by series: P(a,x) = e^{-x + a ln x - lgamma(a)} * sum.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma by modified Lentz continued fraction: Q(a,x).
double gamma_q_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

void check_dof(int dof) {
    if (dof < 1) throw InvalidInputError("degrees of freedom must be >= 1");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0) || !std::isfinite(a) || !std::isfinite(x)) {
        throw InvalidInputError("regularized_gamma_p requires a > 0 and finite x >= 0");
    }
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double chi_square_cdf(double x, int dof) {
    check_dof(dof);
    if (!std::isfinite(x)) throw InvalidInputError("chi_square_cdf: x must be finite");
    if (x < 0.0) throw InvalidInputError("chi_square_cdf: x must be nonnegative");
    return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double chi_square_pdf(double x, int dof) {
    check_dof(dof);
    if (!(x > 0.0)) return 0.0;
    const double a = 0.5 * dof;
    return std::exp((a - 1.0) * std::log(x) - 0.5 * x - a * std::numbers::ln2 -
                    std::lgamma(a));
}

double normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw InvalidInputError("normal_quantile requires 0 < p < 1");
    }
    // Rational approximation on three regions (central, two tails).
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double chi_square_quantile(double prob, int dof) {
    check_dof(dof);
    if (!std::isfinite(prob) || !(prob > 0.0) || !(prob < 1.0)) {
        throw InvalidInputError("chi_square_quantile requires 0 < prob < 1");
    }

    // Wilson-Hilferty starting point.
    const double k = static_cast<double>(dof);
    const double z = normal_quantile(prob);
    const double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
    double x = k * t * t * t;
    if (!(x > 0.0)) x = 0.5 / k;

    // Bracket the root, expanding geometrically as needed.
    double lo = 0.0, hi = x;
    while (chi_square_cdf(hi, dof) < prob) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) throw InternalError("chi_square_quantile: bracket expansion failed");
    }
    if (x < hi) {
        const double fx = chi_square_cdf(x, dof);
        if (fx >= prob) {
            hi = x;
        } else {
            lo = x;
        }
    }

    // Newton steps with bisection fallback; converge in x, not in cdf, so
    // extreme-tail targets are still located to full relative precision.
    x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double f = chi_square_cdf(x, dof) - prob;
        if (f > 0.0) {
            hi = x;
        } else {
            lo = x;
        }
        const double deriv = chi_square_pdf(x, dof);
        double next;
        if (deriv > 0.0) {
            next = x - f / deriv;
            if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        } else {
            next = 0.5 * (lo + hi);
        }
        const double step = std::abs(next - x);
        x = next;
        if (step <= 1e-13 * (1.0 + x)) break;
    }
    return x;
}

}  // namespace renal
