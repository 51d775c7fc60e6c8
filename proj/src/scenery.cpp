#include "rwrs/scenery.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "rwrs/special.hpp"

namespace rwrs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double simpson(const std::function<double(double)>& f, double a, double m, double b, double fa,
               double fm, double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(f, a, m, b, fa, fm, fb, whole, tol, 48);
}

// log of integral_{lo}^{infty} exp(phi(r)) dr for unimodal phi. The integrand
// is rescaled by its maximum and truncated where it drops below exp(-45) of
// it; the two truncation points are located by bisection so the peak fills
// the integration window even when it is very narrow.
double log_integral_exp(const std::function<double(double)>& phi, double lo, double hi_seed) {
    double hi = std::max(hi_seed, lo + 1.0);
    while (phi(hi) > phi(0.5 * (lo + hi))) hi = lo + 2.0 * (hi - lo);
    double gl = lo, gr = hi;
    const double gr_ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = gr - gr_ratio * (gr - gl), x2 = gl + gr_ratio * (gr - gl);
    double f1 = phi(x1), f2 = phi(x2);
    for (int it = 0; it < 300 && (gr - gl) > 1e-13 * (1.0 + gr); ++it) {
        if (f1 < f2) {
            gl = x1;
            x1 = x2;
            f1 = f2;
            x2 = gl + gr_ratio * (gr - gl);
            f2 = phi(x2);
        } else {
            gr = x2;
            x2 = x1;
            f2 = f1;
            x1 = gr - gr_ratio * (gr - gl);
            f1 = phi(x1);
        }
    }
    const double rstar = 0.5 * (gl + gr);
    const double pmax = phi(rstar);
    const double floor_val = pmax - 45.0;  // exp(-45) < 1e-19 of the peak

    // left truncation: phi increases on [lo, rstar]
    double a = lo;
    if (phi(lo) < floor_val) {
        double alo = lo, ahi = rstar;
        for (int it = 0; it < 200 && (ahi - alo) > 1e-12 * (1.0 + ahi); ++it) {
            const double mid = 0.5 * (alo + ahi);
            (phi(mid) < floor_val ? alo : ahi) = mid;
        }
        a = alo;
    }
    // right truncation: phi decreases on [rstar, infty)
    double bhi = rstar + std::max(1.0, rstar - lo);
    while (phi(bhi) > floor_val) bhi = rstar + 2.0 * (bhi - rstar);
    double blo = rstar, b = bhi;
    for (int it = 0; it < 200 && (bhi - blo) > 1e-12 * (1.0 + bhi); ++it) {
        const double mid = 0.5 * (blo + bhi);
        (phi(mid) < floor_val ? bhi : blo) = mid;
    }
    b = bhi;

    auto g = [&](double r) { return std::exp(phi(r) - pmax); };
    // the integrand carries FP noise of order |pmax| * eps; do not ask the
    // quadrature for more than that
    const double noise = std::max(std::fabs(pmax), 1.0) * 2.2e-16 * (b - a) * 8.0;
    const double tol = std::max(1e-13, noise);
    const double I = integrate(g, a, rstar, tol) + integrate(g, rstar, b, tol);
    return pmax + std::log(I);
}

// log of integral_0^infty r^{q-1+k} exp(sgn * t * r - D r^q) dr
double log_weibull_moment(double D, double q, int k, double sgn, double t) {
    auto phi = [=](double r) {
        if (r <= 0.0) return -kInf;
        return (q - 1.0 + k) * std::log(r) + sgn * t * r - D * std::pow(r, q);
    };
    const double scale = std::pow(1.0 / D, 1.0 / q);  // natural width of the base law
    return log_integral_exp(phi, 0.0, std::max(scale, sgn > 0 ? (1.0 + t) * scale : scale));
}

// stable log((e^w - 1)/w) for w >= 0
double log_expm1_over(double w) {
    if (w < 1e-5) return 0.5 * w + w * w / 24.0;
    if (w > 700.0) return w - std::log(w);
    return std::log(std::expm1(w) / w);
}

}  // namespace

KasaharaDual kasahara_dual(double D, double q) {
    if (!(D > 0.0)) throw std::invalid_argument("kasahara_dual: D > 0 required");
    if (!(q > 1.0)) throw std::invalid_argument("kasahara_dual: q > 1 required");
    KasaharaDual out;
    out.Dtilde = (q - 1.0) * std::pow(D * std::pow(q, q), 1.0 / (1.0 - q));
    out.p = q / (q - 1.0);
    return out;
}

SceneryModel SceneryModel::gaussian(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian scenery: sigma > 0 required");
    SceneryModel m;
    m.family = SceneryFamily::gaussian;
    m.sigma = sigma;
    return m;
}

SceneryModel SceneryModel::weibull(double D, double q) {
    if (!(D > 0.0) || !(q > 1.0)) throw std::invalid_argument("weibull scenery: D > 0 and q > 1 required");
    SceneryModel m;
    m.family = SceneryFamily::weibull_tail;
    m.D = D;
    m.q = q;
    return m;
}

SceneryModel SceneryModel::uniform(double a, double b) {
    if (!(a < b)) throw std::invalid_argument("uniform scenery: a < b required");
    SceneryModel m;
    m.family = SceneryFamily::bounded_uniform;
    m.a = a;
    m.b = b;
    return m;
}

double SceneryModel::H(double t) const {
    if (t < 0.0) throw std::invalid_argument("cumulant: t >= 0 required");
    if (t == 0.0) return 0.0;
    switch (family) {
        case SceneryFamily::gaussian:
            return 0.5 * sigma * sigma * t * t;
        case SceneryFamily::bounded_uniform:
            return t * a + log_expm1_over(t * (b - a));
        case SceneryFamily::weibull_tail: {
            const double lp = log_weibull_moment(D, q, 0, +1.0, t);
            const double lm = log_weibull_moment(D, q, 0, -1.0, t);
            return std::log(0.5 * q * D) + log_add_exp(lp, lm);
        }
    }
    return 0.0;
}

double SceneryModel::Hp(double t) const {
    if (t < 0.0) throw std::invalid_argument("cumulant: t >= 0 required");
    switch (family) {
        case SceneryFamily::gaussian:
            return sigma * sigma * t;
        case SceneryFamily::bounded_uniform: {
            const double w = t * (b - a);
            double gp;
            if (w < 1e-5) {
                gp = 0.5 + w / 12.0;
            } else if (w > 30.0) {
                gp = 1.0 - 1.0 / w;  // e^w/(e^w - 1) -> 1
            } else {
                gp = std::exp(w) / std::expm1(w) - 1.0 / w;
            }
            return a + (b - a) * gp;
        }
        case SceneryFamily::weibull_tail: {
            if (t == 0.0) return 0.0;
            const double den = log_add_exp(log_weibull_moment(D, q, 0, +1.0, t),
                                           log_weibull_moment(D, q, 0, -1.0, t));
            const double lp = log_weibull_moment(D, q, 1, +1.0, t);
            const double lm = log_weibull_moment(D, q, 1, -1.0, t);
            // numerator I+ - I-, with I- exponentially smaller for t > 0
            const double lnum = lp + std::log1p(-std::exp(lm - lp));
            return std::exp(lnum - den);
        }
    }
    return 0.0;
}

double SceneryModel::Hpp(double t) const {
    if (t < 0.0) throw std::invalid_argument("cumulant: t >= 0 required");
    switch (family) {
        case SceneryFamily::gaussian:
            return sigma * sigma;
        case SceneryFamily::bounded_uniform: {
            const double w = t * (b - a);
            double gpp;
            if (w < 1e-4) {
                gpp = 1.0 / 12.0 - w * w / 240.0;
            } else if (w > 30.0) {
                gpp = 1.0 / (w * w);
            } else {
                const double em = std::expm1(w);
                gpp = 1.0 / (w * w) - std::exp(w) / (em * em);
            }
            return (b - a) * (b - a) * gpp;
        }
        case SceneryFamily::weibull_tail: {
            const double den = (t == 0.0) ? 0.0
                                          : log_add_exp(log_weibull_moment(D, q, 0, +1.0, t),
                                                        log_weibull_moment(D, q, 0, -1.0, t));
            const double base = (t == 0.0) ? std::log(2.0 / (q * D)) : den;
            const double l2 = log_add_exp(log_weibull_moment(D, q, 2, +1.0, t),
                                          log_weibull_moment(D, q, 2, -1.0, t));
            const double m2 = std::exp(l2 - base);
            const double m1 = Hp(t);
            return m2 - m1 * m1;
        }
    }
    return 0.0;
}

std::optional<std::pair<double, double>> SceneryModel::tail_pair() const {
    switch (family) {
        case SceneryFamily::gaussian:
            return std::make_pair(1.0 / (2.0 * sigma * sigma), 2.0);
        case SceneryFamily::weibull_tail:
            return std::make_pair(D, q);
        case SceneryFamily::bounded_uniform:
            return std::nullopt;
    }
    return std::nullopt;
}

double SceneryModel::ess_sup() const {
    return family == SceneryFamily::bounded_uniform ? b : kInf;
}

double SceneryModel::sample(uint64_t stream, uint64_t packed_site) const {
    const uint64_t h = hash2(stream, packed_site);
    const double u = u64_to_unit(h);
    switch (family) {
        case SceneryFamily::gaussian:
            return sigma * inv_normal_cdf(u);
        case SceneryFamily::bounded_uniform:
            return a + (b - a) * u;
        case SceneryFamily::weibull_tail: {
            // inverse CDF of the magnitude P(|Y| > r) = exp(-D r^q), sign by fair coin
            const double mag = std::pow(-std::log(u) / D, 1.0 / q);
            const uint64_t h2 = mix64(h ^ 0xa0761d6478bd642fULL);
            return (h2 & 1ULL) ? mag : -mag;
        }
    }
    return 0.0;
}

std::string SceneryModel::family_name() const {
    switch (family) {
        case SceneryFamily::gaussian:
            return "gaussian";
        case SceneryFamily::weibull_tail:
            return "weibull_tail";
        case SceneryFamily::bounded_uniform:
            return "bounded_uniform";
    }
    return "?";
}

CutScenery::CutScenery(SceneryModel m, double level) : base(m), M(level) {
    if (!(M > 0.0)) throw std::invalid_argument("CutScenery: M > 0 required");
}

double CutScenery::prob_above_cut() const {
    switch (base.family) {
        case SceneryFamily::gaussian:
            return normal_cdf(M / base.sigma);
        case SceneryFamily::weibull_tail:
            return 1.0 - 0.5 * std::exp(-base.D * std::pow(M, base.q));
        case SceneryFamily::bounded_uniform:
            if (-M <= base.a) return 1.0;
            if (-M >= base.b) return 0.0;
            return (base.b + M) / (base.b - base.a);
    }
    return 1.0;
}

double CutScenery::H_floor(double t) const {
    if (t < 0.0) throw std::invalid_argument("cumulant: t >= 0 required");
    if (t == 0.0) return 0.0;
    switch (base.family) {
        case SceneryFamily::gaussian: {
            const double s = base.sigma;
            const double atom = -t * M + log_normal_tail(M / s);  // P(Y <= -M) mass at -M
            const double body = 0.5 * s * s * t * t + log_normal_tail(-(M + s * s * t) / s);
            return log_add_exp(atom, body);
        }
        case SceneryFamily::bounded_uniform: {
            if (-M <= base.a) return base.H(t);
            if (-M >= base.b) return -t * M;
            const double span = base.b - base.a;
            const double w = t * (base.b + M);
            // e^{tb} [ e^{-w} (-M-a)/span + (1 - e^{-w})/(t span) ]
            const double inner =
                std::exp(-w) * ((-M - base.a) / span) + -std::expm1(-w) / (t * span);
            return t * base.b + std::log(inner);
        }
        case SceneryFamily::weibull_tail: {
            const double D = base.D, q = base.q;
            const double atom = -t * M + std::log(0.5) - D * std::pow(M, q);
            // body: negative side over (-M, 0), positive side over (0, inf)
            auto phi_neg = [=](double r) {
                if (r <= 0.0) return -kInf;
                return (q - 1.0) * std::log(r) - t * r - D * std::pow(r, q);
            };
            double lneg = -kInf;
            if (M > 1e-300) {
                const double pmax = 0.0;  // integrand <= r^{q-1}; rescale by 1
                auto g = [&](double r) { return std::exp(phi_neg(r) - pmax); };
                const double I = integrate(g, 0.0, M, 1e-13);
                lneg = (I > 0.0) ? std::log(I) : -kInf;
            }
            const double lpos = log_weibull_moment(D, q, 0, +1.0, t);
            const double body = std::log(0.5 * q * D) + log_add_exp(lneg, lpos);
            return log_add_exp(atom, body);
        }
    }
    return 0.0;
}

double CutScenery::H_cond(double t) const {
    if (t < 0.0) throw std::invalid_argument("cumulant: t >= 0 required");
    if (t == 0.0) return 0.0;
    const double logp = std::log(prob_above_cut());
    if (!std::isfinite(logp)) throw std::invalid_argument("H_cond: conditioning event has zero mass");
    switch (base.family) {
        case SceneryFamily::gaussian: {
            const double s = base.sigma;
            return 0.5 * s * s * t * t + log_normal_tail(-(M + s * s * t) / s) - logp;
        }
        case SceneryFamily::bounded_uniform: {
            if (-M <= base.a) return base.H(t);
            const double span = base.b - base.a;
            const double w = t * (base.b + M);
            return t * base.b + std::log(-std::expm1(-w) / (t * span)) - logp;
        }
        case SceneryFamily::weibull_tail: {
            const double D = base.D, q = base.q;
            auto phi_neg = [=](double r) {
                if (r <= 0.0) return -kInf;
                return (q - 1.0) * std::log(r) - t * r - D * std::pow(r, q);
            };
            auto g = [&](double r) { return std::exp(phi_neg(r)); };
            const double I = integrate(g, 0.0, M, 1e-13);
            const double lneg = (I > 0.0) ? std::log(I) : -kInf;
            const double lpos = log_weibull_moment(D, q, 0, +1.0, t);
            return std::log(0.5 * q * D) + log_add_exp(lneg, lpos) - logp;
        }
    }
    return 0.0;
}

std::map<uint64_t, double> sample_field(const SceneryModel& m, int d, const std::vector<Site>& sites,
                                        uint64_t seed) {
    std::map<uint64_t, double> out;
    for (const auto& s : sites) {
        const uint64_t key = pack_site(d, s);
        if (out.count(key)) throw std::invalid_argument("sample_field: sites must be distinct");
        out[key] = m.sample(seed, key);
    }
    return out;
}

ScaledField rescaled_field(const SceneryModel& m, int d, double alpha, double b, uint64_t seed) {
    if (!(alpha >= 1.0)) throw std::invalid_argument("rescaled_field: alpha >= 1 required");
    if (!(b >= 1.0)) throw std::invalid_argument("rescaled_field: b >= 1 required");
    return ScaledField{m, d, seed, alpha, b};
}

}  // namespace rwrs
