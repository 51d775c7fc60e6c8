#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

namespace rwrs {

enum class BC { dirichlet, periodic };

/// Real-valued function on a uniform cell-centered mesh of Q_R = [-R,R]^d,
/// m cells per axis (h = 2R/m). Dirichlet mode treats values outside the box
/// as zero; periodic mode wraps.
struct GridFunction {
    int d = 1;
    double R = 1.0;
    int m = 2;
    BC bc = BC::dirichlet;
    std::vector<double> v;

    static GridFunction zeros(int d, double R, int m, BC bc);

    double h() const { return 2.0 * R / m; }
    std::size_t size() const { return v.size(); }
    double cell_volume() const { return std::pow(h(), d); }

    /// Cell-center coordinate along one axis.
    double coord(int i) const { return -R + (i + 0.5) * h(); }

    void cell_of(std::size_t idx, int* out) const {
        for (int k = d - 1; k >= 0; --k) {
            out[k] = static_cast<int>(idx % static_cast<std::size_t>(m));
            idx /= static_cast<std::size_t>(m);
        }
    }
    std::size_t index_of(const int* c) const {
        std::size_t idx = 0;
        for (int k = 0; k < d; ++k) idx = idx * m + static_cast<std::size_t>(c[k]);
        return idx;
    }

    /// Fill from a callable of the cell-center position.
    void fill(const std::function<double(const double*)>& f);
};

double grid_dot(const GridFunction& a, const GridFunction& b);     // h^d sum a b
double grid_l2_norm(const GridFunction& a);                        // sqrt(h^d sum a^2)
double grid_lp_norm(const GridFunction& a, double p);              // (h^d sum |a|^p)^{1/p}
double grid_l1_distance(const GridFunction& a, const GridFunction& b);

/// Scales psi so h^d sum psi^2 = 1.
void normalize_l2(GridFunction& psi);

/// Energy quadratic form (1/2) h^d sum (grad_h psi)^T Gamma (grad_h psi) with
/// forward differences; Dirichlet includes the boundary jumps to the zero
/// exterior, periodic wraps. For constant psi on the torus the value is 0.
double energy(const GridFunction& psi, const Eigen::MatrixXd& Gamma);

/// Exact gradient of `energy` in the grid L^2 metric: <out, dpsi>_h = dE.
void energy_gradient(const GridFunction& psi, const Eigen::MatrixXd& Gamma, GridFunction& out);

/// Smooth rotationally invariant bump exp(-1/(1-|x/delta|^2)) sampled at cell
/// offsets and renormalised so h^d sum w = 1 exactly. Support lies strictly
/// inside |x| < delta.
struct Mollifier {
    int d = 1;
    double delta = 0.0;
    double h = 0.0;
    int radius_cells = 0;
    std::vector<double> w;  // (2*radius_cells+1)^d window
    bool under_resolved = false;  // delta < h: convolution is the identity
};

Mollifier make_mollifier(int d, double delta, double h);

/// Discrete convolution f * kernel on the grid (zero-padded in Dirichlet mode,
/// wrapped in periodic mode). Preserves nonnegativity; preserves total mass
/// exactly when the support of f stays delta away from a Dirichlet boundary.
GridFunction mollify(const GridFunction& f, const Mollifier& k);

}  // namespace rwrs
