#include "rwrs/varsolve.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "rwrs/rng.hpp"
#include "rwrs/special.hpp"

namespace rwrs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot_h(const GridFunction& a, const GridFunction& b) { return grid_dot(a, b); }

void project_tangent(const GridFunction& psi, GridFunction& g) {
    const double c = dot_h(g, psi);
    for (std::size_t i = 0; i < g.v.size(); ++i) g.v[i] -= c * psi.v[i];
}

struct EvalOut {
    double f = 0.0;
    bool flagged = false;
    double gamma_star = std::numeric_limits<double>::quiet_NaN();
};

/// Objective on the unit L^2(grid) sphere; eval fills the ambient gradient.
class SphereObjective {
  public:
    virtual ~SphereObjective() = default;
    virtual EvalOut eval(const GridFunction& psi, GridFunction& grad) = 0;
};

// shared pieces: rho = psi^2, optionally mollified; gradient chain happens in
// rho space and is pulled back by the (self-adjoint) convolution and 2 psi.
struct DensityWork {
    GridFunction rho;
    GridFunction grho;  // gradient wrt rho (grid metric)
    const Mollifier* moll = nullptr;

    void forward(const GridFunction& psi) {
        rho = psi;
        for (double& x : rho.v) x = x * x;
        if (moll && !moll->under_resolved) rho = mollify(rho, *moll);
    }
    void pull_back(const GridFunction& psi, GridFunction& grad_out) const {
        GridFunction g = grho;
        if (moll && !moll->under_resolved) g = mollify(g, *moll);
        for (std::size_t i = 0; i < g.v.size(); ++i) grad_out.v[i] += 2.0 * psi.v[i] * g.v[i];
    }
    double mass() const {
        double s = 0.0;
        for (double x : rho.v) s += x;
        return s * rho.cell_volume();
    }
};

void check_lp_floor(const GridFunction& rho, double Np, double R, int d, double q) {
    double mass = 0.0;
    for (double x : rho.v) mass += x;
    mass *= rho.cell_volume();
    const double floor = mass * std::pow(2.0 * R, -static_cast<double>(d) / q);
    if (Np < floor * (1.0 - 1e-9))
        throw std::logic_error("density L^p norm fell below its mass floor");
}

class KDqObjective : public SphereObjective {
  public:
    KDqObjective(const RateProblem& p, const Mollifier* moll) : prob_(p) { work_.moll = moll; }

    EvalOut eval(const GridFunction& psi, GridFunction& grad) override {
        const Eigen::MatrixXd G = prob_.gamma_or_identity();
        const double p = prob_.q / (prob_.q - 1.0);
        work_.forward(psi);
        energy_gradient(psi, G, grad);
        const double E = 0.5 * dot_h(psi, grad);
        const double Np = grid_lp_norm(work_.rho, p);
        check_lp_floor(work_.rho, Np, prob_.R, prob_.d, prob_.q);
        EvalOut out;
        out.f = E + prob_.D * std::pow(Np, -prob_.q);
        const double coef = -prob_.q * prob_.D * std::pow(Np, -prob_.q - p);
        work_.grho = work_.rho;
        for (double& x : work_.grho.v) x = coef * std::pow(std::fabs(x), p - 1.0);
        work_.pull_back(psi, grad);
        return out;
    }

  private:
    RateProblem prob_;
    DensityWork work_;
};

class ChiObjective : public SphereObjective {
  public:
    ChiObjective(const RateProblem& p, const Mollifier* moll) : prob_(p) { work_.moll = moll; }

    EvalOut eval(const GridFunction& psi, GridFunction& grad) override {
        const Eigen::MatrixXd G = prob_.gamma_or_identity();
        const double p = prob_.q / (prob_.q - 1.0);
        const double expo = 2.0 * prob_.q / prob_.d;  // ||rho||_p^{-expo} = ||psi||_{2p}^{-4q/d}
        work_.forward(psi);
        energy_gradient(psi, G, grad);
        const double E = 0.5 * dot_h(psi, grad);
        const double Np = grid_lp_norm(work_.rho, p);
        check_lp_floor(work_.rho, Np, prob_.R, prob_.d, prob_.q);
        const double scale = std::pow(Np, -expo);
        EvalOut out;
        out.f = E * scale;
        for (double& x : grad.v) x *= scale;
        const double coef = -expo * E * std::pow(Np, -expo - p);
        work_.grho = work_.rho;
        for (double& x : work_.grho.v) x = coef * std::pow(std::fabs(x), p - 1.0);
        work_.pull_back(psi, grad);
        return out;
    }

  private:
    RateProblem prob_;
    DensityWork work_;
};

class KHObjective : public SphereObjective {
  public:
    KHObjective(const RateProblem& p, const Mollifier* moll,
                std::function<double(double)> H, std::function<double(double)> Hp,
                std::function<double(double)> Hpp)
        : prob_(p), H_(std::move(H)), Hp_(std::move(Hp)), Hpp_(std::move(Hpp)) {
        work_.moll = moll;
    }

    EvalOut eval(const GridFunction& psi, GridFunction& grad) override {
        const Eigen::MatrixXd G = prob_.gamma_or_identity();
        work_.forward(psi);
        energy_gradient(psi, G, grad);
        const double E = 0.5 * dot_h(psi, grad);
        PhiResult pr = phi_H(work_.rho, prob_.u, H_, Hp_, Hpp_, warm_);
        EvalOut out;
        out.gamma_star = pr.gamma_star;
        if (!pr.finite) {
            out.flagged = true;
            out.f = kInf;
            return out;
        }
        warm_ = std::max(pr.gamma_star, 1e-12);
        out.f = E + pr.value;
        // envelope rule: d Phi / d rho = -gamma* H'(gamma* rho)
        work_.grho = work_.rho;
        for (double& x : work_.grho.v) x = -pr.gamma_star * Hp_(pr.gamma_star * x);
        work_.pull_back(psi, grad);
        return out;
    }

  private:
    RateProblem prob_;
    DensityWork work_;
    std::function<double(double)> H_, Hp_, Hpp_;
    double warm_ = 1.0;
};

struct InnerResult {
    double value = kInf;
    GridFunction psi;
    bool converged = false;
    bool flagged = false;
    double gamma_star = std::numeric_limits<double>::quiet_NaN();
    int iters = 0;
};

InnerResult minimize_on_sphere(SphereObjective& obj, GridFunction psi, const SolveOptions& opt) {
    InnerResult best;
    normalize_l2(psi);
    GridFunction grad = psi, grad_new = psi;
    EvalOut e = obj.eval(psi, grad);
    if (e.flagged) {
        best.flagged = true;
        best.value = kInf;
        best.psi = psi;
        return best;
    }
    project_tangent(psi, grad);
    double f = e.f;
    best.value = f;
    best.psi = psi;
    best.gamma_star = e.gamma_star;

    double t = 0.1 / std::max(std::sqrt(dot_h(grad, grad)), 1e-30);
    double window_best = best.value;
    int calm = 0;
    int iter = 0;
    for (; iter < opt.max_iters; ++iter) {
        const double gnorm2 = dot_h(grad, grad);
        if (gnorm2 < 1e-30) {
            best.converged = true;
            break;
        }
        GridFunction psi_new = psi;
        EvalOut e_new;
        double f_new = kInf;
        double step = t;
        for (int bt = 0; bt < 60; ++bt) {
            psi_new = psi;
            for (std::size_t i = 0; i < psi.v.size(); ++i) psi_new.v[i] -= step * grad.v[i];
            normalize_l2(psi_new);
            e_new = obj.eval(psi_new, grad_new);
            if (e_new.flagged) {
                best.flagged = true;
                best.value = kInf;
                best.psi = psi_new;
                best.iters = iter;
                return best;
            }
            f_new = e_new.f;
            if (f_new <= f - 1e-4 * step * gnorm2 || f_new <= f * (1.0 + 1e-14)) break;
            step *= 0.5;
        }
        project_tangent(psi_new, grad_new);

        // Barzilai-Borwein step from the accepted move
        double ss = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < psi.v.size(); ++i) {
            const double s = psi_new.v[i] - psi.v[i];
            const double y = grad_new.v[i] - grad.v[i];
            ss += s * s;
            sy += s * y;
        }
        t = (sy > 0.0) ? std::min(std::max(ss / sy, 1e-12), 1e8) : std::min(step * 2.0, 1e8);

        psi.v.swap(psi_new.v);
        grad.v.swap(grad_new.v);
        f = f_new;
        if (f < best.value) {
            best.value = f;
            best.psi = psi;
            best.gamma_star = e_new.gamma_star;
        }
        // stop when the incumbent moved by less than tol (relative) across a
        // whole window of iterations; BB progress is bursty, so per-iteration
        // changes are not a usable signal
        if (++calm >= opt.tol_window) {
            if (window_best - best.value < opt.tol * std::max(std::fabs(best.value), 1e-300)) {
                best.converged = true;
                break;
            }
            window_best = best.value;
            calm = 0;
        }
    }
    best.iters = iter;
    return best;
}

InnerResult solve_with_restarts(const RateProblem& prob,
                                const std::function<std::unique_ptr<SphereObjective>()>& make_obj) {
    InnerResult best;
    bool any = false;
    for (int r = 0; r < std::max(1, prob.opt.restarts); ++r) {
        auto obj = make_obj();
        GridFunction psi0 = initial_bump(prob.d, prob.R, prob.m, prob.bc, prob.opt.seed, r);
        InnerResult res = minimize_on_sphere(*obj, std::move(psi0), prob.opt);
        if (!any || res.value < best.value ||
            (res.value == best.value && res.converged && !best.converged)) {
            best = std::move(res);
            any = true;
        }
    }
    return best;
}

std::function<double(double)> power_H(double Dtilde, double p) {
    return [=](double t) { return Dtilde * std::pow(t, p); };
}
std::function<double(double)> power_Hp(double Dtilde, double p) {
    return [=](double t) { return t > 0.0 ? p * Dtilde * std::pow(t, p - 1.0) : 0.0; };
}
std::function<double(double)> power_Hpp(double Dtilde, double p) {
    return [=](double t) { return t > 0.0 ? p * (p - 1.0) * Dtilde * std::pow(t, p - 2.0) : 0.0; };
}

}  // namespace

GridFunction initial_bump(int d, double R, int m, BC bc, uint64_t seed, int restart) {
    GridFunction psi = GridFunction::zeros(d, R, m, bc);
    double width = R / 3.0;
    double mod_amp = 0.0, mod_width = width;
    if (restart > 0) {
        CounterRng rng(stream_key(seed, kStreamInit, static_cast<uint64_t>(restart)));
        width = (R / 3.0) * (0.4 + 1.2 * rng.next_unit());
        mod_amp = rng.next_unit() - 0.5;
        mod_width = width * (0.5 + rng.next_unit());
    }
    psi.fill([&](const double* x) {
        double r2 = 0.0;
        for (int i = 0; i < d; ++i) r2 += x[i] * x[i];
        double val = std::exp(-r2 / (2.0 * width * width));
        if (mod_amp != 0.0) val *= 1.0 + mod_amp * std::exp(-r2 / (2.0 * mod_width * mod_width));
        return val + 1e-3;
    });
    normalize_l2(psi);
    return psi;
}

PhiResult phi_H(const GridFunction& rho, double u, const std::function<double(double)>& H,
                const std::function<double(double)>& Hp, const std::function<double(double)>& Hpp,
                double warm_gamma) {
    if (!(u > 0.0)) throw std::invalid_argument("phi_H: u > 0 required");
    const double cell = rho.cell_volume();
    auto mean_deriv = [&](double g) {
        double s = 0.0;
        for (double x : rho.v) {
            if (x > 0.0) s += x * Hp(g * x);
        }
        return s * cell;
    };
    auto value_at = [&](double g) {
        double s = 0.0;
        for (double x : rho.v) {
            if (x > 0.0) s += H(g * x);
        }
        return g * u - s * cell;
    };

    PhiResult out;
    if (mean_deriv(0.0) >= u) {  // supremum approached at gamma -> 0
        out.value = 0.0;
        out.gamma_star = 0.0;
        return out;
    }
    double lo = 0.0, hi = std::max(warm_gamma, 1e-8);
    while (!(mean_deriv(hi) >= u)) {  // NaN-safe: treat overflow as unattained
        lo = hi;
        hi *= 2.0;
        if (hi > 1e18) {
            out.finite = false;
            out.value = kInf;
            out.gamma_star = hi;
            return out;
        }
    }
    // Newton with bisection safeguard on [lo, hi]
    double g = 0.5 * (lo + hi);
    const double tol = 1e-11 * u;
    for (int it = 0; it < 200; ++it) {
        const double resid = mean_deriv(g) - u;
        if (std::fabs(resid) <= tol) break;
        if (resid > 0.0)
            hi = g;
        else
            lo = g;
        double gn = std::numeric_limits<double>::quiet_NaN();
        if (Hpp) {
            double der = 0.0;
            for (double x : rho.v) {
                if (x > 0.0) der += x * x * Hpp(g * x);
            }
            der *= cell;
            if (der > 0.0) gn = g - resid / der;
        }
        g = (std::isfinite(gn) && gn > lo && gn < hi) ? gn : 0.5 * (lo + hi);
    }
    out.gamma_star = g;
    out.value = value_at(g);
    return out;
}

VarResult solve_K_Dq(const RateProblem& prob) {
    if (!(prob.q > 1.0) || !(prob.D > 0.0))
        throw std::invalid_argument("solve_K_Dq: D > 0 and q > 1 required");
    Mollifier moll = make_mollifier(prob.d, prob.delta, 2.0 * prob.R / prob.m);
    const Mollifier* mp = (prob.delta > 0.0) ? &moll : nullptr;
    InnerResult inner = solve_with_restarts(
        prob, [&]() { return std::make_unique<KDqObjective>(prob, mp); });
    VarResult out;
    out.value = inner.value;
    out.minimizer = std::move(inner.psi);
    out.converged = inner.converged;
    out.flagged_infinite = inner.flagged;
    out.iters = inner.iters;
    return out;
}

VarResult solve_chi(const RateProblem& prob) {
    if (!(prob.q > 1.0)) throw std::invalid_argument("solve_chi: q > 1 required");
    // The scale-reduced objective is only scale-invariant in the continuum;
    // on the grid a cell-width spike undercuts the true constant. A mollifier
    // of a few cells removes that artifact and biases wide minimizers only at
    // the discretisation order, so the norm argument is always smoothed at
    // least at the grid scale.
    const double h = 2.0 * prob.R / prob.m;
    const double delta_eff = std::max(prob.delta, 2.5 * h);
    Mollifier moll = make_mollifier(prob.d, delta_eff, h);
    const Mollifier* mp = &moll;
    InnerResult inner = solve_with_restarts(
        prob, [&]() { return std::make_unique<ChiObjective>(prob, mp); });

    RateProblem kprob = prob;
    kprob.mode = RateProblem::Mode::K_Dq;
    VarResult kres = solve_K_Dq(kprob);

    VarResult out;
    out.route_a = inner.value;
    out.route_b = chi_from_kdq(kres.value, prob.D, prob.d);
    out.route_gap = std::fabs(out.route_a - out.route_b) /
                    std::max(std::fabs(out.route_a), std::fabs(out.route_b));
    out.value = out.route_a;
    out.kappa = std::pow(out.route_a, -static_cast<double>(prob.d) / (4.0 * prob.q));
    out.minimizer = std::move(inner.psi);
    out.converged = inner.converged && kres.converged;
    out.flagged_infinite = inner.flagged;
    out.iters = inner.iters;
    return out;
}

VarResult solve_K_H(const RateProblem& prob) {
    if (!(prob.u > 0.0)) throw std::invalid_argument("solve_K_H: u > 0 required");
    std::function<double(double)> H, Hp, Hpp;
    if (prob.H_power) {
        const KasaharaDual dual = kasahara_dual(prob.D, prob.q);
        H = power_H(dual.Dtilde, dual.p);
        Hp = power_Hp(dual.Dtilde, dual.p);
        Hpp = power_Hpp(dual.Dtilde, dual.p);
    } else {
        if (!prob.has_scenery) throw std::invalid_argument("solve_K_H: no cumulant source");
        const SceneryModel m = prob.scenery;
        H = [m](double t) { return m.H(t); };
        Hp = [m](double t) { return m.Hp(t); };
        Hpp = [m](double t) { return m.Hpp(t); };
    }
    Mollifier moll = make_mollifier(prob.d, prob.delta, 2.0 * prob.R / prob.m);
    const Mollifier* mp = (prob.delta > 0.0) ? &moll : nullptr;
    InnerResult inner = solve_with_restarts(
        prob, [&]() { return std::make_unique<KHObjective>(prob, mp, H, Hp, Hpp); });
    VarResult out;
    out.value = inner.value;
    out.minimizer = std::move(inner.psi);
    out.converged = inner.converged;
    out.flagged_infinite = inner.flagged;
    out.gamma_star = inner.gamma_star;
    out.iters = inner.iters;
    return out;
}

double objective_probe(const RateProblem& prob, const GridFunction& psi, GridFunction* grad) {
    Mollifier moll = make_mollifier(prob.d, prob.delta, 2.0 * prob.R / prob.m);
    const Mollifier* mp = (prob.delta > 0.0) ? &moll : nullptr;
    std::unique_ptr<SphereObjective> obj;
    switch (prob.mode) {
        case RateProblem::Mode::chi:
            obj = std::make_unique<ChiObjective>(prob, mp);
            break;
        case RateProblem::Mode::K_Dq:
            obj = std::make_unique<KDqObjective>(prob, mp);
            break;
        case RateProblem::Mode::K_H: {
            std::function<double(double)> H, Hp, Hpp;
            if (prob.H_power) {
                const KasaharaDual dual = kasahara_dual(prob.D, prob.q);
                H = power_H(dual.Dtilde, dual.p);
                Hp = power_Hp(dual.Dtilde, dual.p);
                Hpp = power_Hpp(dual.Dtilde, dual.p);
            } else {
                const SceneryModel m = prob.scenery;
                H = [m](double t) { return m.H(t); };
                Hp = [m](double t) { return m.Hp(t); };
                Hpp = [m](double t) { return m.Hpp(t); };
            }
            obj = std::make_unique<KHObjective>(prob, mp, H, Hp, Hpp);
            break;
        }
    }
    GridFunction g = GridFunction::zeros(psi.d, psi.R, psi.m, psi.bc);
    EvalOut out = obj->eval(psi, g);
    if (grad) *grad = std::move(g);
    return out.f;
}

double kdq_from_chi(double chi, double D, int d) {
    return (d + 2) * std::pow(0.5 * D, 2.0 / (d + 2)) * std::pow(chi / d, static_cast<double>(d) / (d + 2));
}

double chi_from_kdq(double K, double D, int d) {
    const double base = K / ((d + 2) * std::pow(0.5 * D, 2.0 / (d + 2)));
    return d * std::pow(base, (d + 2.0) / d);
}

double scaled_kdq_value(double E, double DV, int d) {
    return (d + 2) * std::pow(0.5 * DV, 2.0 / (d + 2)) * std::pow(E / d, static_cast<double>(d) / (d + 2));
}

namespace {

// adaptive Simpson (same scheme as the scenery quadrature, local copy)
double simpson_rec(const std::function<double(double)>& f, double a, double m, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double quad(const std::function<double(double)>& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    return simpson_rec(f, a, m, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 40);
}

// Radial integral of a piecewise integrand whose (0,1) branch is the pure
// power coef0 * r^{expo0}. That branch is integrated with the substitution
// r = e^{-y} (integrand coef0 * e^{-(expo0+1) y}), entirely in y space:
// for exponents just above -1 the mass spreads over thousands of decades of
// r, far beyond double range, but is a plain exponential in y. The remaining
// segments use [1, A] directly and r = A/v on (A, inf).
double radial_quad(const std::function<double(double)>& integrand, double A, double coef0,
                   double expo0) {
    const double s = expo0 + 1.0;
    if (!(s > 0.0)) throw std::invalid_argument("radial_quad: divergent inner segment");
    auto seg0 = [&](double y) { return coef0 * std::exp(-s * y); };
    const double Y = 45.0 / s;
    const double tol = 1e-12;
    double I0 = 0.0;
    double ylo = 0.0;
    for (double yhi = std::min(8.0 / s, Y); ylo < Y; yhi = std::min(2.0 * yhi, Y)) {
        I0 += quad(seg0, ylo, yhi, tol * std::max(seg0(ylo) * (yhi - ylo), 1e-300));
        ylo = yhi;
        if (yhi >= Y) break;
    }
    auto seg2 = [&](double v) {
        const double r = A / v;
        return integrand(r) * A / (v * v);
    };
    return I0 + quad(integrand, 1.0, A, tol) + quad(seg2, 1e-8, 1.0, tol);
}

}  // namespace

TrialSequence trial_sequence_chi_zero(int d, double p, double n_index) {
    if (!(p > 1.0)) throw std::invalid_argument("trial_sequence: p > 1 required");
    const double q = p / (p - 1.0);
    if (!(d > 2.0 * q)) throw std::invalid_argument("trial_sequence: requires d > 2q (supercritical)");
    if (!(n_index >= 2.0)) throw std::invalid_argument("trial_sequence: index >= 2 required");

    TrialSequence t;
    t.D = 1.0 / (n_index * n_index);
    t.A = std::pow(1.0 / t.D, 1.0 / d);
    t.gamma = (d - std::pow(t.D, p)) / p;
    const double om = unit_sphere_area(d);
    const double D = t.D, A = t.A, gamma = t.gamma;

    t.l2sq_closed = om / d * D * (2.0 * std::pow(A, d) + gamma / (d - gamma));
    // D^p gamma/(d - p gamma) = gamma exactly under the schedule
    t.l2psq_closed = om * (p / d) * (gamma + std::pow(D, p) * std::pow(A, d) * 2.0 / (2.0 * p - 1.0));
    t.half_gradsq_closed = 0.125 * om * D *
                           (gamma * gamma / (d - gamma - 2.0) +
                            std::pow(A, static_cast<double>(d) - 2.0) * 4.0 * d * d / (2.0 + d));
    t.l2sq_limit = 2.0 * om / d;
    t.l2psq_limit = om;

    auto f = [&](double r) {
        if (r < 1.0) return D * std::pow(r, -gamma);
        if (r <= A) return D;
        return D * std::pow(A, 2.0 * d) * std::pow(r, -2.0 * d);
    };
    auto gprime2 = [&](double r) {  // (d/dr sqrt(f))^2
        if (r < 1.0) return D * 0.25 * gamma * gamma * std::pow(r, -gamma - 2.0);
        if (r <= A) return 0.0;
        return D * d * d * std::pow(A, 2.0 * d) * std::pow(r, -2.0 * d - 2.0);
    };
    const double dm1 = d - 1.0;
    t.l2sq = om * radial_quad([&](double r) { return f(r) * std::pow(r, dm1); }, A,
                              D, dm1 - gamma);
    t.l2psq = om * radial_quad([&](double r) { return std::pow(f(r), p) * std::pow(r, dm1); }, A,
                               std::pow(D, p), dm1 - p * gamma);
    t.half_gradsq =
        0.5 * om * radial_quad([&](double r) { return gprime2(r) * std::pow(r, dm1); }, A,
                               D * 0.25 * gamma * gamma, dm1 - gamma - 2.0);
    return t;
}

std::vector<BoxStudyRow> box_convergence_study(const RateProblem& base,
                                               const std::vector<double>& R_list,
                                               const std::vector<double>& delta_list) {
    if (!std::is_sorted(R_list.begin(), R_list.end()) || R_list.empty())
        throw std::invalid_argument("box_convergence_study: R_list must ascend");
    auto run = [&](double R, double delta, BC bc) {
        RateProblem p = base;
        p.R = R;
        // keep the mesh size h roughly fixed across boxes
        p.m = std::max(2, static_cast<int>(std::lround(base.m * R / base.R)));
        p.bc = bc;
        p.delta = delta;
        VarResult r;
        switch (p.mode) {
            case RateProblem::Mode::chi:
                r = solve_chi(p);
                break;
            case RateProblem::Mode::K_Dq:
                r = solve_K_Dq(p);
                break;
            case RateProblem::Mode::K_H:
                r = solve_K_H(p);
                break;
        }
        return r;
    };
    std::vector<BoxStudyRow> rows;
    const bool dirichlet_uses_delta = (base.mode == RateProblem::Mode::K_H);
    for (double R : R_list) {
        if (dirichlet_uses_delta) {
            for (double delta : delta_list) {
                VarResult r = run(R, delta, BC::dirichlet);
                rows.push_back({R, delta, 'd', r.value, r.converged});
            }
        } else {
            VarResult r = run(R, 0.0, BC::dirichlet);
            rows.push_back({R, 0.0, 'd', r.value, r.converged});
        }
        for (double delta : delta_list) {
            VarResult r = run(R, delta, BC::periodic);
            rows.push_back({R, delta, 'p', r.value, r.converged});
        }
    }
    return rows;
}

}  // namespace rwrs
