#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rwrs/lattice.hpp"

namespace rwrs {

enum class SceneryFamily { gaussian, weibull_tail, bounded_uniform };

/// Kasahara dual of an upper-tail pair (D, q):
/// Dtilde = (q-1) (D q^q)^{1/(1-q)}, p = q/(q-1).
struct KasaharaDual {
    double Dtilde;
    double p;
};
KasaharaDual kasahara_dual(double D, double q);

/// i.i.d. scenery law. Families:
///  - gaussian(sigma): H(t) = sigma^2 t^2 / 2, tail pair (1/(2 sigma^2), 2);
///  - weibull_tail(D, q): symmetric law with P(|Y| > r) = exp(-D r^q), so the
///    upper tail satisfies log P(Y > r) = -D r^q + log(1/2) and the tail pair
///    is (D, q) with equality at all finite r;
///  - bounded_uniform(a, b).
/// Sampling is a pure function of (seed, site), so fields over arbitrarily
/// large boxes are drawn lazily and independently of evaluation order.
struct SceneryModel {
    SceneryFamily family = SceneryFamily::gaussian;
    double sigma = 1.0;  // gaussian
    double D = 1.0, q = 2.0;  // weibull_tail
    double a = -1.0, b = 1.0;  // bounded_uniform

    static SceneryModel gaussian(double sigma);
    static SceneryModel weibull(double D, double q);
    static SceneryModel uniform(double a, double b);

    /// Cumulant generating function log E[e^{tY}], defined for t >= 0
    /// (H(0) = 0 by convention; negative t is rejected).
    double H(double t) const;
    double Hp(double t) const;   // H'
    double Hpp(double t) const;  // H''

    bool closed_form_H() const { return family != SceneryFamily::weibull_tail; }
    std::optional<std::pair<double, double>> tail_pair() const;
    bool is_centered_gaussian() const { return family == SceneryFamily::gaussian; }
    double ess_sup() const;  // +inf unless bounded

    double sample(uint64_t stream, uint64_t packed_site) const;

    std::string family_name() const;
};

/// Clip to [-M, M].
inline double cut_low(double y, double M) { return std::min(std::max(y, -M), M); }
/// Excess above M.
inline double cut_high(double y, double M) { return std::max(y - M, 0.0); }

/// Cut decomposition of a scenery at level M, with the two associated
/// cumulant functions: H_floor for Y v (-M) and H_cond for the law of Y
/// conditioned on {Y >= -M}. Both are exact for gaussian/uniform and
/// quadrature-based for weibull_tail; derivatives are numeric.
struct CutScenery {
    SceneryModel base;
    double M;

    CutScenery(SceneryModel m, double level);

    double H_floor(double t) const;
    double H_cond(double t) const;
    double prob_above_cut() const;  // P(Y >= -M)
};

/// i.i.d. draws keyed by site; deterministic given (seed, site), so permuting
/// the site list permutes the output map identically.
std::map<uint64_t, double> sample_field(const SceneryModel& m, int d, const std::vector<Site>& sites,
                                        uint64_t seed);

/// Rescaled field Ybar(x) = Y(floor(x alpha)) / b, piecewise constant on
/// lattice cells, backed lazily by the counter-based sampler.
struct ScaledField {
    SceneryModel model;
    int d;
    uint64_t seed;
    double alpha;
    double b;

    double site_value(const Site& z) const { return model.sample(seed, pack_site(d, z)); }
    double operator()(const double* x) const {
        Site z = origin_site();
        for (int i = 0; i < d; ++i) z[i] = static_cast<int>(std::floor(x[i] * alpha));
        return site_value(z) / b;
    }
};

ScaledField rescaled_field(const SceneryModel& m, int d, double alpha, double b, uint64_t seed);

}  // namespace rwrs
