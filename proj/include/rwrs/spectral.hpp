#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "rwrs/grid.hpp"
#include "rwrs/step_kernel.hpp"

namespace rwrs {

struct EigResult {
    double lambda = 0.0;
    GridFunction psi;
    bool converged = false;
    int iters = 0;
};

/// Principal eigenvalue of the discretised operator with quadratic form
/// <f, psi^2> - energy(psi) on the unit L^2(grid) sphere (the operator
/// (1/2) div Gamma grad + f with the grid's boundary mode), by symmetric
/// Lanczos with full reorthogonalisation; eigenfunction sign-fixed positive.
EigResult principal_eigenvalue_continuum(const GridFunction& f, const Eigen::MatrixXd& Gamma,
                                         uint64_t seed = 7);

/// Symmetric transfer matrix A(z, zt) = e^{f_n(z)/(2 a^2)} p(z, zt) e^{f_n(zt)/(2 a^2)}
/// on the box {-floor(R a), ..., floor(R a)-1}^d, with f_n the cell-midpoint
/// discretisation of f; Dirichlet drops transitions leaving the box, periodic
/// uses the wrapped kernel.
struct TransferMatrix {
    StepKernel kernel;
    LatticeBox box;
    double alpha;
    BC bc;
    Eigen::MatrixXd A;
    std::vector<double> f_lattice;
};

TransferMatrix make_transfer(const StepKernel& k, const std::function<double(const double*)>& f,
                             double R, double alpha, BC bc);

/// Eigendecomposition-backed evaluator of the exact finite-n functional
///   value(n) = (a^2/n) log E[ exp(n a^{-2} <f, L_n>) ; walk confined ]
/// (Dirichlet) or its periodized variant, plus its n -> infinity limit
/// a^2 log lambda_1(A).
struct TransferSpectrum {
    double alpha;
    Eigen::VectorXd eigenvalues;  // descending
    Eigen::VectorXd coeff;        // <u, v_k><v_k, w> boundary overlaps
    double lattice_limit;         // alpha^2 log lambda_1
};

TransferSpectrum transfer_spectrum(const TransferMatrix& t);

/// Requires n to be a positive multiple of alpha^2.
double transfer_cumulant(const TransferSpectrum& s, int64_t n);

/// Discrete Dirichlet form (1/2) sum_{z,zt} p(z,zt) (g(z) - g(zt))^2 for a
/// finitely supported lattice function g.
double discrete_dirichlet_form(const StepKernel& k, const std::vector<std::pair<Site, double>>& g);

}  // namespace rwrs
