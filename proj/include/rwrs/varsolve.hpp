#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "rwrs/grid.hpp"
#include "rwrs/scenery.hpp"

namespace rwrs {

struct SolveOptions {
    int max_iters = 20000;
    double tol = 1e-9;      // relative objective change
    int tol_window = 50;    // consecutive iterations below tol
    int restarts = 5;
    uint64_t seed = 1;
};

/// One variational computation: dimension, walk covariance, which constant,
/// tail pair or scenery-backed H, threshold u, box, mesh, boundary mode,
/// mollifier width and optimiser settings.
struct RateProblem {
    enum class Mode { chi, K_Dq, K_H };

    int d = 1;
    Eigen::MatrixXd Gamma;  // empty = identity
    Mode mode = Mode::K_Dq;
    double D = 0.5;
    double q = 2.0;
    bool H_power = true;        // K_H with H(t) = Dtilde t^p derived from (D, q)
    SceneryModel scenery;       // K_H with a model's cumulant (H_power = false)
    bool has_scenery = false;
    double u = 1.0;
    double R = 8.0;
    int m = 512;
    BC bc = BC::dirichlet;
    double delta = 0.0;
    SolveOptions opt;

    Eigen::MatrixXd gamma_or_identity() const {
        return Gamma.size() ? Gamma : Eigen::MatrixXd::Identity(d, d);
    }
};

struct PhiResult {
    double value = 0.0;
    double gamma_star = 0.0;
    bool finite = true;
};

/// Legendre functional Phi_H(rho, u) = sup_gamma [gamma u - h^d sum H(gamma rho)]
/// for a probability density rho on the grid. Newton on the stationarity
/// equation u = h^d sum rho H'(gamma rho) with a geometrically grown bracket
/// and bisection fallback; if the bracket reaches 1e18 without attaining u the
/// result is flagged infinite (not an exception).
PhiResult phi_H(const GridFunction& rho, double u, const std::function<double(double)>& H,
                const std::function<double(double)>& Hp,
                const std::function<double(double)>& Hpp = nullptr, double warm_gamma = 1.0);

struct VarResult {
    double value = 0.0;
    GridFunction minimizer;
    bool converged = false;
    bool flagged_infinite = false;
    double gamma_star = std::numeric_limits<double>::quiet_NaN();
    int iters = 0;
    // chi extras
    double route_a = std::numeric_limits<double>::quiet_NaN();
    double route_b = std::numeric_limits<double>::quiet_NaN();
    double route_gap = std::numeric_limits<double>::quiet_NaN();
    double kappa = std::numeric_limits<double>::quiet_NaN();
};

/// min over the unit L^2 sphere of energy(psi) + D ||psi^2 (*kappa_delta)||_p^{-q},
/// by projected Barzilai-Borwein descent with restarts. Dirichlet boundary
/// gives the finite-box value K^{(0)}(R); periodic gives K^{(per)}(delta, R).
VarResult solve_K_Dq(const RateProblem& prob);

/// The constrained gradient constant by two routes: (a) the scale-invariant
/// objective energy(psi) ||psi||_{2p}^{-4q/d} on the sphere, (b) inversion of
/// the closed-form combination linking it to K_{D,q}. Both are reported with
/// their relative gap; kappa = chi^{-d/(4q)} is emitted alongside.
VarResult solve_chi(const RateProblem& prob);

/// min of energy(psi) + Phi_H(psi^2 (*kappa_delta), u); the outer gradient uses
/// the envelope rule at the inner maximiser gamma*.
VarResult solve_K_H(const RateProblem& prob);

/// K_{D,q} = (d+2) (D/2)^{2/(d+2)} (chi/d)^{d/(d+2)} and its inversion.
double kdq_from_chi(double chi, double D, int d);
double chi_from_kdq(double K, double D, int d);

/// Value of the K_{D,q} objective at the best rescaling psi_beta of a fixed
/// profile with normalised energy E and tail term DV:
/// inf_beta [beta^2 E + beta^{-d} DV].
double scaled_kdq_value(double E, double DV, int d);

/// Radial trial profiles with f(r) = D r^{-gamma} / D / D A^{2d} r^{-2d} on
/// (0,1) / [1,A] / (A,inf); parameter schedule D_n = n^{-2}, A_n = D_n^{-1/d},
/// gamma_n = (d - D_n^p)/p. As n grows the L^2 and L^{2p} norms approach
/// 2 omega_d / d and omega_d while the gradient norm vanishes, which forces
/// the constrained gradient constant to zero in dimensions d > 2q.
struct TrialSequence {
    double D, A, gamma;
    double l2sq, l2psq, half_gradsq;              // adaptive-quadrature values
    double l2sq_closed, l2psq_closed, half_gradsq_closed;
    double l2sq_limit, l2psq_limit;               // 2 omega_d / d and omega_d
};
TrialSequence trial_sequence_chi_zero(int d, double p, double n_index);

struct BoxStudyRow {
    double R;
    double delta;
    char bc;  // 'd' or 'p'
    double value;
    bool converged;
};

/// Dirichlet and periodic finite-box values across (R, delta) grids for the
/// problem's mode; R_list must ascend.
std::vector<BoxStudyRow> box_convergence_study(const RateProblem& base,
                                               const std::vector<double>& R_list,
                                               const std::vector<double>& delta_list);

/// Default positive initialisation (radially symmetric bump + 1e-3 floor);
/// restart > 0 randomises the width and adds a radial modulation.
GridFunction initial_bump(int d, double R, int m, BC bc, uint64_t seed, int restart);

/// Ambient objective value of the problem's functional at psi (not projected
/// onto the sphere), with its analytic gradient when grad is non-null. For
/// K_H the gradient uses the envelope rule at the inner maximiser, so probing
/// it against finite differences exercises that rule through the inner sup.
double objective_probe(const RateProblem& prob, const GridFunction& psi, GridFunction* grad);

}  // namespace rwrs
