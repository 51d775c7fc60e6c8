#include "rwrs/spectral.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "rwrs/rng.hpp"

namespace rwrs {

namespace {

// Lanczos with full reorthogonalisation for the operator
// (M psi)(x) = f(x) psi(x) - (A_Gamma psi)(x), A_Gamma = half the energy Hessian.
struct LanczosOp {
    const GridFunction& f;
    const Eigen::MatrixXd& Gamma;
    mutable GridFunction scratch;

    void apply(const GridFunction& x, GridFunction& out) const {
        energy_gradient(x, Gamma, scratch);
        out = x;
        for (std::size_t i = 0; i < x.v.size(); ++i)
            out.v[i] = f.v[i] * x.v[i] - 0.5 * scratch.v[i];
    }
};

}  // namespace

namespace {

// d = 1, Dirichlet: the operator is tridiagonal; solve it exactly.
EigResult tridiagonal_eig(const GridFunction& f, const Eigen::MatrixXd& Gamma) {
    const int m = f.m;
    const double h = f.h();
    const double g = Gamma(0, 0);
    Eigen::VectorXd diag(m), sub(m - 1);
    for (int i = 0; i < m; ++i) diag(i) = f.v[static_cast<std::size_t>(i)] - g / (h * h);
    for (int i = 0; i + 1 < m; ++i) sub(i) = 0.5 * g / (h * h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub);
    EigResult out;
    out.lambda = es.eigenvalues()(m - 1);
    out.psi = GridFunction::zeros(f.d, f.R, f.m, f.bc);
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
        out.psi.v[static_cast<std::size_t>(i)] = es.eigenvectors()(i, m - 1);
        sum += out.psi.v[static_cast<std::size_t>(i)];
    }
    if (sum < 0.0) {
        for (double& v : out.psi.v) v = -v;
    }
    normalize_l2(out.psi);
    out.converged = true;
    out.iters = m;
    return out;
}

// small problems: assemble the dense operator column by column and solve it.
EigResult dense_eig(const GridFunction& f, const Eigen::MatrixXd& Gamma) {
    const std::size_t N = f.size();
    Eigen::MatrixXd M(N, N);
    GridFunction unit = GridFunction::zeros(f.d, f.R, f.m, f.bc);
    GridFunction col = unit;
    for (std::size_t j = 0; j < N; ++j) {
        std::fill(unit.v.begin(), unit.v.end(), 0.0);
        unit.v[j] = 1.0;
        energy_gradient(unit, Gamma, col);
        for (std::size_t i = 0; i < N; ++i)
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = -0.5 * col.v[i];
        M(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) += f.v[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    EigResult out;
    out.lambda = es.eigenvalues()(static_cast<Eigen::Index>(N) - 1);
    out.psi = GridFunction::zeros(f.d, f.R, f.m, f.bc);
    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        out.psi.v[i] = es.eigenvectors()(static_cast<Eigen::Index>(i),
                                         static_cast<Eigen::Index>(N) - 1);
        sum += out.psi.v[i];
    }
    if (sum < 0.0) {
        for (double& v : out.psi.v) v = -v;
    }
    normalize_l2(out.psi);
    out.converged = true;
    out.iters = static_cast<int>(N);
    return out;
}

}  // namespace

EigResult principal_eigenvalue_continuum(const GridFunction& f, const Eigen::MatrixXd& Gamma,
                                         uint64_t seed) {
    if (f.m < 16) throw std::invalid_argument("principal_eigenvalue_continuum: mesh m >= 16 required");
    const std::size_t N = f.size();
    // The stiff grid operator (spread ~ 1/h^2, top gap O(1)) makes plain
    // Lanczos need O(N) iterations, so exact solvers are used wherever the
    // size permits; Lanczos remains the large-N path.
    if (f.d == 1 && f.bc == BC::dirichlet) return tridiagonal_eig(f, Gamma);
    if (N <= 2048) return dense_eig(f, Gamma);
    LanczosOp op{f, Gamma, f};

    const int max_krylov = static_cast<int>(std::min<std::size_t>(N, 1200));
    std::vector<GridFunction> V;
    std::vector<double> a_diag, b_off;
    GridFunction v = GridFunction::zeros(f.d, f.R, f.m, f.bc);
    CounterRng rng(hash2(seed, 0x4c414e43ULL));
    for (double& x : v.v) x = rng.next_unit() - 0.5;
    double nv = grid_l2_norm(v);
    for (double& x : v.v) x /= nv;

    EigResult out;
    out.psi = v;
    GridFunction w = v;
    double prev_theta = std::numeric_limits<double>::quiet_NaN();
    for (int k = 0; k < max_krylov; ++k) {
        V.push_back(v);
        op.apply(v, w);
        const double alpha = grid_dot(w, v);
        a_diag.push_back(alpha);
        for (std::size_t i = 0; i < w.v.size(); ++i) w.v[i] -= alpha * v.v[i];
        if (k > 0) {
            for (std::size_t i = 0; i < w.v.size(); ++i) w.v[i] -= b_off[k - 1] * V[k - 1].v[i];
        }
        // full reorthogonalisation
        for (const auto& u : V) {
            const double c = grid_dot(w, u);
            for (std::size_t i = 0; i < w.v.size(); ++i) w.v[i] -= c * u.v[i];
        }
        const double beta = grid_l2_norm(w);

        // top Ritz value of the tridiagonal
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k + 1, k + 1);
        for (int i = 0; i <= k; ++i) T(i, i) = a_diag[static_cast<std::size_t>(i)];
        for (int i = 0; i < k; ++i)
            T(i, i + 1) = T(i + 1, i) = b_off[static_cast<std::size_t>(i)];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        const int top = k;  // eigenvalues ascending
        const double theta = es.eigenvalues()(top);
        const double resid = beta * std::fabs(es.eigenvectors()(k, top));
        if ((k > 2 && resid < 1e-12 * std::max(1.0, std::fabs(theta))) || beta < 1e-14 ||
            k == max_krylov - 1) {
            out.lambda = theta;
            GridFunction eig = GridFunction::zeros(f.d, f.R, f.m, f.bc);
            for (int i = 0; i <= k; ++i) {
                const double c = es.eigenvectors()(i, top);
                for (std::size_t j = 0; j < eig.v.size(); ++j) eig.v[j] += c * V[static_cast<std::size_t>(i)].v[j];
            }
            double s = 0.0;
            for (double x : eig.v) s += x;
            if (s < 0.0) {
                for (double& x : eig.v) x = -x;
            }
            normalize_l2(eig);
            out.psi = std::move(eig);
            out.converged = resid < 1e-10 * std::max(1.0, std::fabs(theta));
            out.iters = k + 1;
            return out;
        }
        b_off.push_back(beta);
        for (std::size_t i = 0; i < w.v.size(); ++i) v.v[i] = w.v[i] / beta;
        prev_theta = theta;
    }
    (void)prev_theta;
    return out;
}

TransferMatrix make_transfer(const StepKernel& k, const std::function<double(const double*)>& f,
                             double R, double alpha, BC bc) {
    const int radius = static_cast<int>(std::floor(R * alpha));
    if (radius < 1) throw std::invalid_argument("make_transfer: R * alpha < 1");
    LatticeBox box(k.d, radius);
    if (box.size() > kMaxDenseStates) throw std::invalid_argument("make_transfer: box too large");

    std::vector<double> fl(box.size());
    double x[kMaxDim];
    for (std::size_t i = 0; i < box.size(); ++i) {
        const Site z = box.site(i);
        for (int a = 0; a < k.d; ++a) x[a] = (z[a] + 0.5) / alpha;
        fl[i] = f(x);
    }
    const double a2 = alpha * alpha;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(box.size(), box.size());
    for (std::size_t i = 0; i < box.size(); ++i) {
        const Site z = box.site(i);
        for (std::size_t w = 0; w < k.offsets.size(); ++w) {
            Site zt = z;
            for (int a = 0; a < k.d; ++a) zt[a] += k.offsets[w][a];
            std::size_t j;
            if (bc == BC::periodic) {
                j = box.index(box.wrap(zt));
            } else {
                if (!box.contains(zt)) continue;
                j = box.index(zt);
            }
            A(i, j) += std::exp(0.5 * (fl[i] + fl[j]) / a2) * k.probs[w];
        }
    }
    return TransferMatrix{k, box, alpha, bc, std::move(A), std::move(fl)};
}

TransferSpectrum transfer_spectrum(const TransferMatrix& t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.A);
    const Eigen::Index N = t.A.rows();
    const double a2 = t.alpha * t.alpha;
    // boundary vectors u = D^{1/2} e_origin, w = D^{1/2} 1
    Eigen::VectorXd u = Eigen::VectorXd::Zero(N), w(N);
    const std::size_t o = t.box.index(origin_site());
    for (Eigen::Index i = 0; i < N; ++i)
        w(i) = std::exp(0.5 * t.f_lattice[static_cast<std::size_t>(i)] / a2);
    u(static_cast<Eigen::Index>(o)) = w(static_cast<Eigen::Index>(o));

    TransferSpectrum s;
    s.alpha = t.alpha;
    s.eigenvalues = es.eigenvalues().reverse();
    Eigen::VectorXd cu = es.eigenvectors().transpose() * u;
    Eigen::VectorXd cw = es.eigenvectors().transpose() * w;
    s.coeff = (cu.array() * cw.array()).reverse();
    s.lattice_limit = a2 * std::log(s.eigenvalues(0));
    return s;
}

double transfer_cumulant(const TransferSpectrum& s, int64_t n) {
    const double a2 = s.alpha * s.alpha;
    const int64_t a2i = static_cast<int64_t>(std::llround(a2));
    if (n < 1 || n % a2i != 0)
        throw std::invalid_argument("transfer_cumulant: n must be a positive multiple of alpha^2");
    const double lam1 = s.eigenvalues(0);
    // log( sum_k c_k lambda_k^{n-1} ), factored by the top eigenvalue
    double sum = 0.0;
    for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) {
        const double lam = s.eigenvalues(k);
        const double ratio = std::fabs(lam) / lam1;
        if (ratio <= 0.0) continue;
        double mag = std::exp(static_cast<double>(n - 1) * std::log(ratio));
        if (lam < 0.0 && ((n - 1) % 2 != 0)) mag = -mag;
        sum += s.coeff(k) * mag;
    }
    if (!(sum > 0.0)) throw std::runtime_error("transfer_cumulant: degenerate spectral sum");
    const double logE = static_cast<double>(n - 1) * std::log(lam1) + std::log(sum);
    return a2 / static_cast<double>(n) * logE;
}

double discrete_dirichlet_form(const StepKernel& k, const std::vector<std::pair<Site, double>>& g) {
    std::map<uint64_t, double> val;
    for (const auto& [s, x] : g) val[pack_site(k.d, s)] = x;
    // sites whose row can contribute: the support and its inbound neighbours
    std::map<uint64_t, Site> rows;
    for (const auto& [s, x] : g) {
        rows[pack_site(k.d, s)] = s;
        for (const auto& off : k.offsets) {
            Site t = s;
            for (int i = 0; i < k.d; ++i) t[i] -= off[i];
            rows[pack_site(k.d, t)] = t;
        }
    }
    auto value_at = [&](const Site& s) {
        auto it = val.find(pack_site(k.d, s));
        return it == val.end() ? 0.0 : it->second;
    };
    double acc = 0.0;
    for (const auto& [key, z] : rows) {
        const double gz = value_at(z);
        for (std::size_t w = 0; w < k.offsets.size(); ++w) {
            Site zt = z;
            for (int i = 0; i < k.d; ++i) zt[i] += k.offsets[w][i];
            const double diff = gz - value_at(zt);
            acc += k.probs[w] * diff * diff;
        }
    }
    return 0.5 * acc;
}

}  // namespace rwrs
