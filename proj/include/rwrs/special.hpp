#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rwrs {

inline constexpr double kPi = 3.14159265358979323846;

/// Standard normal upper tail P(N > x). Underflows to 0 near x ~ 38;
/// use log_normal_tail for rate computations.
inline double normal_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Scaled complementary error function erfcx(z) = exp(z^2) erfc(z) for large z,
/// by the asymptotic series; relative error below 1e-13 for z >= 15.
inline double erfcx_large(double z) {
    const double u = 1.0 / (2.0 * z * z);
    // sum_k (-1)^k (2k-1)!! u^k
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 8; ++k) {
        term *= -(2.0 * k - 1.0) * u;
        sum += term;
    }
    return sum / (z * std::sqrt(kPi));
}

/// log P(N > x), stable over the whole real line (tested down to x = 38 and beyond).
inline double log_normal_tail(double x) {
    if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    if (x < 0.0) {
        // P = 1 - P(N > -x)
        return std::log1p(-normal_tail(-x));
    }
    const double z = x / std::sqrt(2.0);
    if (z < 20.0) {
        return std::log(0.5 * std::erfc(z));
    }
    return -z * z + std::log(0.5 * erfcx_large(z));
}

/// Inverse of the standard normal CDF (Wichura's PPND16 rational approximation).
inline double inv_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("inv_normal_cdf: p outside (0,1)");
    static const double a[8] = {
        3.3871328727963666080e0,  1.3314166789178437745e2, 1.9715909503065514427e3,
        1.3731693765509461125e4,  4.5921953931549871457e4, 6.7265770927008700853e4,
        3.3430575583588128105e4,  2.5090809287301226727e3};
    static const double b[8] = {
        1.0,                      4.2313330701600911252e1, 6.8718700749205790830e2,
        5.3941960214247511077e3,  2.1213794301586595867e4, 3.9307895800092710610e4,
        2.8729085735721942674e4,  5.2264952788528545610e3};
    static const double c[8] = {
        1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
        3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
        2.27238449892691845833e-2, 7.74545014278341407640e-4};
    static const double d[8] = {
        1.0,                      2.05319162663775882187e0, 1.67638483018380384940e0,
        6.89767334985100004550e-1, 1.48103976427480074590e-1, 1.51986665636164571966e-2,
        5.47593808499534494600e-4, 1.05075007164441684324e-9};
    static const double e[8] = {
        6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
        2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
        2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static const double f[8] = {
        1.0,                      5.99832206555887937690e-1, 1.36929880922735805310e-1,
        1.48753612908506148525e-2, 7.86869131145613259100e-4, 1.84631831751005468180e-5,
        1.42151175831644588870e-7, 2.04426310338993978564e-15};
    auto poly = [](const double* cf, double r) {
        double s = cf[7];
        for (int i = 6; i >= 0; --i) s = s * r + cf[i];
        return s;
    };
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * poly(a, r) / poly(b, r);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = poly(c, r) / poly(d, r);
    } else {
        r -= 5.0;
        x = poly(e, r) / poly(f, r);
    }
    return (q < 0.0) ? -x : x;
}

/// Surface measure of the unit sphere in R^d: 2 pi^{d/2} / Gamma(d/2).
inline double unit_sphere_area(int d) {
    if (d < 1) throw std::invalid_argument("unit_sphere_area: d >= 1 required");
    return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

/// max + log(sum exp(v - max)) over a pair.
inline double log_add_exp(double la, double lb) {
    if (la == -std::numeric_limits<double>::infinity()) return lb;
    if (lb == -std::numeric_limits<double>::infinity()) return la;
    const double m = std::max(la, lb);
    return m + std::log(std::exp(la - m) + std::exp(lb - m));
}

}  // namespace rwrs
