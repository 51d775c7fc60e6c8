#include "rwrs/step_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace rwrs {

StepKernel StepKernel::from_support(int d, const std::vector<std::pair<Site, double>>& support) {
    if (d < 1 || d > kMaxDim) throw std::invalid_argument("StepKernel: dimension must be in 1..4");
    if (support.empty()) throw std::invalid_argument("StepKernel: empty support");

    StepKernel k;
    k.d = d;
    double total = 0.0;
    std::map<Site, double> weight;
    for (const auto& [z, p] : support) {
        if (p < 0.0) throw std::invalid_argument("StepKernel: negative probability");
        Site s = origin_site();
        for (int i = 0; i < d; ++i) s[i] = z[i];
        weight[s] += p;
        total += p;
    }
    if (std::fabs(total - 1.0) > 1e-12) throw std::invalid_argument("StepKernel: probabilities must sum to 1");

    // symmetry must hold exactly, weight for weight
    for (const auto& [z, p] : weight) {
        Site neg = origin_site();
        for (int i = 0; i < d; ++i) neg[i] = -z[i];
        auto it = weight.find(neg);
        if (it == weight.end() || it->second != p)
            throw std::invalid_argument("StepKernel: support not symmetric (p(z) != p(-z))");
    }

    k.gamma = Eigen::MatrixXd::Zero(d, d);
    double c = 0.0;
    for (const auto& [z, p] : weight) {
        k.offsets.push_back(z);
        k.probs.push_back(p);
        c += p;
        k.cum.push_back(c);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) k.gamma(i, j) += p * z[i] * z[j];
    }
    k.cum.back() = 1.0;

    if (std::fabs(k.gamma.determinant()) <= 1e-12)
        throw std::invalid_argument("StepKernel: covariance matrix is singular");
    return k;
}

int StepKernel::support_diameter() const {
    int diam = 0;
    for (int i = 0; i < d; ++i) {
        int lo = 0, hi = 0;
        for (const auto& z : offsets) {
            lo = std::min(lo, z[i]);
            hi = std::max(hi, z[i]);
        }
        diam = std::max(diam, hi - lo);
    }
    return diam;
}

StepKernel make_srw(int d) {
    if (d < 1) throw std::invalid_argument("make_srw: d >= 1 required");
    std::vector<std::pair<Site, double>> support;
    for (int i = 0; i < d; ++i) {
        Site plus = origin_site(), minus = origin_site();
        plus[i] = 1;
        minus[i] = -1;
        support.push_back({plus, 1.0 / (2.0 * d)});
        support.push_back({minus, 1.0 / (2.0 * d)});
    }
    return StepKernel::from_support(d, support);
}

StepKernel kernel_by_name(const std::string& name) {
    if (name == "srw-1d") return make_srw(1);
    if (name == "srw-2d") return make_srw(2);
    if (name == "srw-3d") return make_srw(3);
    throw std::invalid_argument("unknown kernel name: " + name);
}

TorusKernel periodize(const StepKernel& k, int R) {
    if (R < 1) throw std::invalid_argument("periodize: R >= 1 required");
    if (2 * R + 1 <= k.support_diameter())
        throw std::invalid_argument("periodize: torus side too small for kernel support");
    LatticeBox box(k.d, R);
    if (box.size() > kMaxDenseStates) throw std::invalid_argument("periodize: box exceeds dense-state cap");

    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(box.size(), box.size());
    for (std::size_t i = 0; i < box.size(); ++i) {
        const Site z = box.site(i);
        for (std::size_t w = 0; w < k.offsets.size(); ++w) {
            Site zt = z;
            for (int a = 0; a < k.d; ++a) zt[a] += k.offsets[w][a];
            P(i, box.index(box.wrap(zt))) += k.probs[w];
        }
    }
    return TorusKernel{k, R, box, std::move(P)};
}

Eigen::MatrixXd transition_power(const TorusKernel& t, uint64_t s) {
    const auto n = t.P.rows();
    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd base = t.P;
    while (s > 0) {
        if (s & 1) result = result * base;
        base = base * base;
        s >>= 1;
    }
    return result;
}

Eigen::MatrixXd green_function(const TorusKernel& t, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("green_function: lambda > 0 required");
    const auto n = t.P.rows();
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) - std::exp(-lambda) * t.P;
    Eigen::MatrixXd G = M.ldlt().solve(Eigen::MatrixXd::Identity(n, n));
    const double resid = (M * G - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    if (resid > 1e-9) throw std::runtime_error("green_function: linear solve residual too large");
    return G;
}

double green_growth_exponent(const StepKernel& k, double R, double pprime,
                             const std::vector<double>& alphas) {
    if (!(pprime > 1.0)) throw std::invalid_argument("green_growth_exponent: p' > 1 required");
    if (k.d >= 3 && !(pprime < static_cast<double>(k.d) / (k.d - 2)))
        throw std::invalid_argument("green_growth_exponent: p' >= d/(d-2) not admissible");
    if (alphas.size() < 2) throw std::invalid_argument("green_growth_exponent: need >= 2 points for a slope");

    std::vector<double> lx, ly;
    for (double alpha : alphas) {
        const int radius = std::max(1, static_cast<int>(std::floor(R * alpha)));
        TorusKernel t = periodize(k, radius);
        Eigen::MatrixXd G = green_function(t, 1.0 / (alpha * alpha));
        const std::size_t row = t.box.index(origin_site());
        double s = 0.0;
        for (Eigen::Index j = 0; j < G.cols(); ++j) s += std::pow(G(row, j), pprime);
        lx.push_back(std::log(alpha));
        ly.push_back(std::log(s));
    }
    // least-squares slope
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace rwrs
