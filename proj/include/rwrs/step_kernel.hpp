#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "rwrs/lattice.hpp"

namespace rwrs {

/// One-step law of the walk: finite support, exactly symmetric (weight of z
/// equals weight of -z), hence mean zero; covariance Gamma = sum p(0,z) z z^T
/// must be regular. Finite support keeps all exponential moments finite.
struct StepKernel {
    int d = 1;
    std::vector<Site> offsets;
    std::vector<double> probs;
    std::vector<double> cum;  // cumulative probabilities for sampling
    Eigen::MatrixXd gamma;

    static StepKernel from_support(int d, const std::vector<std::pair<Site, double>>& support);

    Site sample(CounterRng& rng) const {
        const double u = rng.next_unit();
        std::size_t i = 0;
        while (i + 1 < cum.size() && u > cum[i]) ++i;
        return offsets[i];
    }

    /// Largest coordinate span of the support along any axis.
    int support_diameter() const;
};

/// Simple random walk: weight 1/(2d) on each +-e_i, Gamma = Id/d.
StepKernel make_srw(int d);

/// Named built-ins ("srw-1d", "srw-2d", "srw-3d").
StepKernel kernel_by_name(const std::string& name);

/// Walk wrapped onto the torus {-R,...,R-1}^d; transition matrix
/// P(z, zt) = sum_k p(z, zt + 2Rk), symmetric and stochastic.
struct TorusKernel {
    StepKernel base;
    int radius;
    LatticeBox box;
    Eigen::MatrixXd P;
};

TorusKernel periodize(const StepKernel& k, int R);

/// s-step transition matrix by repeated squaring; s = 0 gives the identity.
Eigen::MatrixXd transition_power(const TorusKernel& t, uint64_t s);

/// Green's function G = sum_{s>=0} e^{-lambda s} P^s, via the dense solve
/// (I - e^{-lambda} P) G = I. Rows sum to 1/(1 - e^{-lambda}).
Eigen::MatrixXd green_function(const TorusKernel& t, double lambda);

/// For each alpha: S(alpha) = sum_y G^{(floor(R alpha))}_{alpha^{-2}}(0, y)^{pprime}.
/// Returns the fitted log-log slope of S against alpha.
double green_growth_exponent(const StepKernel& k, double R, double pprime,
                             const std::vector<double>& alphas);

/// Hard cap for dense torus linear algebra.
inline constexpr std::size_t kMaxDenseStates = 20000;

}  // namespace rwrs
