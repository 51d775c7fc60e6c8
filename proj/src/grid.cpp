#include "rwrs/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace rwrs {

GridFunction GridFunction::zeros(int d, double R, int m, BC bc) {
    if (d < 1 || d > 3) throw std::invalid_argument("GridFunction: d in 1..3 supported");
    if (!(R > 0.0) || m < 2) throw std::invalid_argument("GridFunction: R > 0 and m >= 2 required");
    GridFunction g;
    g.d = d;
    g.R = R;
    g.m = m;
    g.bc = bc;
    std::size_t n = 1;
    for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(m);
    g.v.assign(n, 0.0);
    return g;
}

void GridFunction::fill(const std::function<double(const double*)>& f) {
    int c[3];
    double x[3];
    for (std::size_t i = 0; i < v.size(); ++i) {
        cell_of(i, c);
        for (int k = 0; k < d; ++k) x[k] = coord(c[k]);
        v[i] = f(x);
    }
}

double grid_dot(const GridFunction& a, const GridFunction& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) s += a.v[i] * b.v[i];
    return s * a.cell_volume();
}

double grid_l2_norm(const GridFunction& a) { return std::sqrt(grid_dot(a, a)); }

double grid_lp_norm(const GridFunction& a, double p) {
    double s = 0.0;
    for (double x : a.v) s += std::pow(std::fabs(x), p);
    return std::pow(s * a.cell_volume(), 1.0 / p);
}

double grid_l1_distance(const GridFunction& a, const GridFunction& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) s += std::fabs(a.v[i] - b.v[i]);
    return s * a.cell_volume();
}

void normalize_l2(GridFunction& psi) {
    const double nrm = grid_l2_norm(psi);
    if (!(nrm > 0.0)) throw std::invalid_argument("normalize_l2: zero function");
    for (double& x : psi.v) x /= nrm;
}

namespace {

// strides for neighbour arithmetic on the flat array
void strides_of(const GridFunction& g, std::size_t* st) {
    std::size_t s = 1;
    for (int k = g.d - 1; k >= 0; --k) {
        st[k] = s;
        s *= static_cast<std::size_t>(g.m);
    }
}

}  // namespace

double energy(const GridFunction& psi, const Eigen::MatrixXd& Gamma) {
    const int d = psi.d;
    const double h = psi.h();
    std::size_t st[3];
    strides_of(psi, st);
    int c[3];
    double g[3];
    double acc = 0.0;
    for (std::size_t i = 0; i < psi.v.size(); ++i) {
        psi.cell_of(i, c);
        for (int k = 0; k < d; ++k) {
            double nb;
            if (c[k] + 1 < psi.m) {
                nb = psi.v[i + st[k]];
            } else {
                nb = (psi.bc == BC::periodic) ? psi.v[i - st[k] * (psi.m - 1)] : 0.0;
            }
            g[k] = (nb - psi.v[i]) / h;
        }
        for (int k = 0; k < d; ++k)
            for (int j = 0; j < d; ++j) acc += Gamma(k, j) * g[k] * g[j];
        if (psi.bc == BC::dirichlet) {
            // jump from the zero exterior across each low face
            for (int k = 0; k < d; ++k) {
                if (c[k] == 0) acc += Gamma(k, k) * psi.v[i] * psi.v[i] / (h * h);
            }
        }
    }
    return 0.5 * acc * psi.cell_volume();
}

void energy_gradient(const GridFunction& psi, const Eigen::MatrixXd& Gamma, GridFunction& out) {
    const int d = psi.d;
    const double h = psi.h();
    std::size_t st[3];
    strides_of(psi, st);
    out = GridFunction::zeros(psi.d, psi.R, psi.m, psi.bc);
    int c[3];
    double g[3];
    double w[3];
    for (std::size_t i = 0; i < psi.v.size(); ++i) {
        psi.cell_of(i, c);
        std::size_t nbi[3];
        bool inside[3];
        for (int k = 0; k < d; ++k) {
            if (c[k] + 1 < psi.m) {
                nbi[k] = i + st[k];
                inside[k] = true;
            } else if (psi.bc == BC::periodic) {
                nbi[k] = i - st[k] * (psi.m - 1);
                inside[k] = true;
            } else {
                nbi[k] = 0;
                inside[k] = false;
            }
            const double nb = inside[k] ? psi.v[nbi[k]] : 0.0;
            g[k] = (nb - psi.v[i]) / h;
        }
        for (int k = 0; k < d; ++k) {
            w[k] = 0.0;
            for (int j = 0; j < d; ++j) w[k] += Gamma(k, j) * g[j];
        }
        for (int k = 0; k < d; ++k) {
            out.v[i] -= w[k] / h;
            if (inside[k]) out.v[nbi[k]] += w[k] / h;
        }
        if (psi.bc == BC::dirichlet) {
            for (int k = 0; k < d; ++k) {
                if (c[k] == 0) out.v[i] += Gamma(k, k) * psi.v[i] / (h * h);
            }
        }
    }
}

Mollifier make_mollifier(int d, double delta, double h) {
    if (!(delta >= 0.0)) throw std::invalid_argument("make_mollifier: delta >= 0 required");
    Mollifier k;
    k.d = d;
    k.delta = delta;
    k.h = h;
    if (delta < h) {
        k.under_resolved = true;
        k.radius_cells = 0;
        k.w = {1.0 / std::pow(h, d)};
        return k;
    }
    const int rc = static_cast<int>(std::ceil(delta / h)) - 1;
    k.radius_cells = rc;
    const int side = 2 * rc + 1;
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(side);
    k.w.assign(total, 0.0);
    double sum = 0.0;
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        double r2 = 0.0;
        for (int i = d - 1; i >= 0; --i) {
            const int off = static_cast<int>(rest % side) - rc;
            rest /= side;
            const double x = off * h / delta;
            r2 += x * x;
        }
        if (r2 < 1.0) {
            k.w[idx] = std::exp(-1.0 / (1.0 - r2));
            sum += k.w[idx];
        }
    }
    const double norm = sum * std::pow(h, d);
    for (double& x : k.w) x /= norm;
    return k;
}

GridFunction mollify(const GridFunction& f, const Mollifier& k) {
    if (k.under_resolved) return f;
    GridFunction out = GridFunction::zeros(f.d, f.R, f.m, f.bc);
    const int rc = k.radius_cells;
    const int side = 2 * rc + 1;
    const double cell = f.cell_volume();
    int c[3], cc[3];
    for (std::size_t i = 0; i < f.v.size(); ++i) {
        f.cell_of(i, c);
        double acc = 0.0;
        std::size_t total = k.w.size();
        for (std::size_t widx = 0; widx < total; ++widx) {
            if (k.w[widx] == 0.0) continue;
            std::size_t rest = widx;
            bool ok = true;
            for (int a = f.d - 1; a >= 0; --a) {
                int off = static_cast<int>(rest % side) - rc;
                rest /= side;
                int src = c[a] - off;
                if (f.bc == BC::periodic) {
                    src %= f.m;
                    if (src < 0) src += f.m;
                } else if (src < 0 || src >= f.m) {
                    ok = false;
                    break;
                }
                cc[a] = src;
            }
            if (!ok) continue;
            acc += k.w[widx] * f.v[f.index_of(cc)];
        }
        out.v[i] = acc * cell;
    }
    return out;
}

}  // namespace rwrs
