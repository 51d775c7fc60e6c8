#include "rwrs/local_times.hpp"

namespace rwrs {

LocalTimeField LocalTimeField::from_path(int d, const std::vector<Site>& path) {
    LocalTimeField f;
    f.d = d;
    for (const auto& s : path) f.visit(s);
    return f;
}

Walk simulate_walk(const StepKernel& k, int64_t n, uint64_t seed) {
    if (n < 1) throw std::invalid_argument("simulate_walk: n >= 1 required");
    CounterRng rng(hash2(seed, kStreamWalk));
    Walk w;
    w.field.d = k.d;
    w.path.reserve(static_cast<std::size_t>(n));
    Site pos = origin_site();
    for (int64_t t = 0; t < n; ++t) {
        w.path.push_back(pos);
        w.field.visit(pos);
        if (t + 1 < n) {
            const Site step = k.sample(rng);
            for (int i = 0; i < k.d; ++i) pos[i] += step[i];
        }
    }
    return w;
}

void walk_local_times(const StepKernel& k, int64_t n, CounterRng& rng, LocalTimeField& out) {
    out.d = k.d;
    out.n = 0;
    out.lambda = 0;
    out.counts.clear();
    Site pos = origin_site();
    for (int64_t t = 0; t < n; ++t) {
        out.visit(pos);
        if (t + 1 < n) {
            const Site step = k.sample(rng);
            for (int i = 0; i < k.d; ++i) pos[i] += step[i];
        }
    }
}

void walk_lambda_checkpoints(const StepKernel& k, const std::vector<int64_t>& n_list,
                             CounterRng& rng, std::vector<int64_t>& lambda_out) {
    lambda_out.assign(n_list.size(), 0);
    if (n_list.empty()) return;
    LocalTimeField f;
    f.d = k.d;
    Site pos = origin_site();
    std::size_t next = 0;
    const int64_t n_max = n_list.back();
    for (int64_t t = 0; t < n_max; ++t) {
        f.visit(pos);
        while (next < n_list.size() && f.n == n_list[next]) lambda_out[next++] = f.lambda;
        if (t + 1 < n_max) {
            const Site step = k.sample(rng);
            for (int i = 0; i < k.d; ++i) pos[i] += step[i];
        }
    }
}

int64_t self_intersection(const LocalTimeField& f) {
    int64_t lam = 0;
    f.counts.for_each([&](uint64_t, int64_t c) { lam += c * c; });
    return lam;
}

LocalTimeField periodized_local_times(const LocalTimeField& f, int R) {
    if (R < 1) throw std::invalid_argument("periodized_local_times: R >= 1 required");
    LatticeBox box(f.d, R);
    LocalTimeField out;
    out.d = f.d;
    out.n = f.n;
    f.counts.for_each([&](uint64_t key, int64_t c) {
        const Site w = box.wrap(unpack_site(f.d, key));
        out.counts.add(pack_site(f.d, w), c);
    });
    out.lambda = self_intersection(out);
    return out;
}

double scaled_density_pairing(const ScaledLocalTimes& s,
                              const std::function<double(const double*, int)>& g) {
    const LocalTimeField& f = *s.base;
    double acc = 0.0;
    f.counts.for_each([&](uint64_t key, int64_t c) {
        const Site z = unpack_site(f.d, key);
        double x[kMaxDim];
        for (int i = 0; i < f.d; ++i) x[i] = (z[i] + 0.5) / s.alpha;
        acc += (static_cast<double>(c) / static_cast<double>(f.n)) * g(x, f.d);
    });
    return acc;
}

double scaled_mass(const ScaledLocalTimes& s) {
    const LocalTimeField& f = *s.base;
    const double cell = std::pow(s.alpha, -f.d);
    double acc = 0.0;
    f.counts.for_each([&](uint64_t, int64_t c) {
        acc += (std::pow(s.alpha, f.d) / static_cast<double>(f.n)) * static_cast<double>(c) * cell;
    });
    return acc;
}

}  // namespace rwrs
