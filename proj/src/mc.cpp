#include "rwrs/mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rwrs/special.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rwrs {

namespace {

// mean/variance in one pass over a deterministic replicate order
struct MeanVar {
    double mean = 0, m2 = 0;
    int64_t count = 0;
    void add(double x) {
        ++count;
        const double d = x - mean;
        mean += d / count;
        m2 += d * (x - mean);
    }
    double variance() const { return count > 1 ? m2 / (count - 1) : 0.0; }
};

// log(mean of exp(values)) and the delta-method s.e. of the log
void log_mean_exp(const std::vector<double>& logs, double& log_mean, double& log_se) {
    const double m = *std::max_element(logs.begin(), logs.end());
    MeanVar mv;
    for (double l : logs) mv.add(std::exp(l - m));
    log_mean = m + std::log(mv.mean);
    log_se = std::sqrt(mv.variance() / mv.count) / mv.mean;
}

}  // namespace

ScaleRegime ScaleRegime::very_large(int d, double theta, double q) {
    if (!(theta > 0.0 && theta < 1.0 / q))
        throw std::invalid_argument("ScaleRegime V: need 0 < theta < 1/q");
    ScaleRegime r;
    r.c = Case::V;
    r.d = d;
    r.theta = theta;
    r.q = q;
    return r;
}

ScaleRegime ScaleRegime::large(int d) {
    ScaleRegime r;
    r.c = Case::L;
    r.d = d;
    return r;
}

ScaleRegime ScaleRegime::small_dev(int d, double theta) {
    if (d != 2) throw std::invalid_argument("ScaleRegime small-dev: defined for d = 2");
    if (!(theta > 0.5 && theta < 1.0))
        throw std::invalid_argument("ScaleRegime small-dev: need theta in (1/2, 1)");
    ScaleRegime r;
    r.c = Case::SmallDev;
    r.d = d;
    r.theta = theta;
    return r;
}

double ScaleRegime::b(double n) const {
    switch (c) {
        case Case::V:
            return std::pow(n, theta);
        case Case::L:
            return 1.0;
        case Case::SmallDev:
            return std::pow(std::log(n), theta) / std::sqrt(n);
    }
    return 1.0;
}

double ScaleRegime::alpha(double n) const {
    switch (c) {
        case Case::V:
            return std::pow(n, 1.0 / (d + 2)) * std::pow(b(n), -q / (d + 2));
        case Case::L:
        case Case::SmallDev:
            return std::pow(n, 1.0 / (d + 2));
    }
    return 1.0;
}

double ScaleRegime::speed(double n) const {
    switch (c) {
        case Case::V: {
            const double al = alpha(n);
            return n / (al * al);
        }
        case Case::L:
            return std::pow(n, static_cast<double>(d) / (d + 2));
        case Case::SmallDev: {
            const double bn = b(n);
            return bn * bn * n / std::log(n);
        }
    }
    return 1.0;
}

void ScaleRegime::check_admissible(double n) const {
    switch (c) {
        case Case::V: {
            const double bn = b(n);
            if (!(bn >= 1.0 && std::pow(bn, q) <= n))
                throw std::invalid_argument("ScaleRegime V: b_n outside [1, n^{1/q}]");
            break;
        }
        case Case::L:
            break;
        case Case::SmallDev: {
            const double bn = b(n);
            if (!(bn >= a0(2, n) && bn <= a1(n)))
                throw std::invalid_argument("ScaleRegime small-dev: b_n outside [a0, a1]");
            break;
        }
    }
}

double ScaleRegime::a0(int d, double n) {
    if (d == 1) return std::pow(n, -0.25);
    if (d == 2) return std::sqrt(std::log(n) / n);
    return std::pow(n, -0.5);
}

double ScaleRegime::a1(double n) { return std::log(n) / std::sqrt(n); }

std::string ScaleRegime::name() const {
    switch (c) {
        case Case::V:
            return "V";
        case Case::L:
            return "L";
        case Case::SmallDev:
            return "small-dev";
    }
    return "?";
}

double rwrs_value(const LocalTimeField& f, const std::map<uint64_t, double>& field) {
    double z = 0.0;
    bool missing = false;
    f.counts.for_each([&](uint64_t key, int64_t c) {
        auto it = field.find(key);
        if (it == field.end()) {
            missing = true;
            return;
        }
        z += static_cast<double>(c) * it->second;
    });
    if (missing) throw std::out_of_range("rwrs_value: scenery missing an occupied site");
    return z;
}

double rwrs_value(const Walk& w, const std::map<uint64_t, double>& field) {
    const double site_sum = rwrs_value(w.field, field);
    double time_sum = 0.0;
    for (const auto& s : w.path) time_sum += field.at(pack_site(w.field.d, s));
    if (std::fabs(site_sum - time_sum) > 1e-9 * (1.0 + std::fabs(site_sum)))
        throw std::runtime_error("rwrs_value: site-sum and time-sum disagree");
    return site_sum;
}

namespace {

// One naive replicate: returns Z_n via both evaluation orders and checks them.
double replicate_z(const StepKernel& k, const SceneryModel& m, int64_t n, uint64_t seed,
                   int64_t rep, LocalTimeField& scratch) {
    CounterRng walk_rng(stream_key(seed, kStreamWalk, static_cast<uint64_t>(rep)));
    const uint64_t scen = stream_key(seed, kStreamScenery, static_cast<uint64_t>(rep));
    scratch.d = k.d;
    scratch.n = 0;
    scratch.lambda = 0;
    scratch.counts.clear();
    Site pos = origin_site();
    double time_sum = 0.0;
    for (int64_t t = 0; t < n; ++t) {
        const uint64_t key = pack_site(k.d, pos);
        scratch.visit_packed(key);
        time_sum += m.sample(scen, key);
        if (t + 1 < n) {
            const Site step = k.sample(walk_rng);
            for (int i = 0; i < k.d; ++i) pos[i] += step[i];
        }
    }
    double site_sum = 0.0;
    scratch.counts.for_each(
        [&](uint64_t key, int64_t c) { site_sum += static_cast<double>(c) * m.sample(scen, key); });
    if (std::fabs(site_sum - time_sum) > 1e-9 * (1.0 + std::fabs(site_sum)))
        throw std::runtime_error("tail_naive: dual Z evaluations disagree");
    return site_sum;
}

}  // namespace

TailEstimate tail_naive(const StepKernel& k, const SceneryModel& m, int64_t n, double b,
                        int64_t replicates, uint64_t seed, bool parallel) {
    if (replicates < 1) throw std::invalid_argument("tail_naive: replicates >= 1 required");
    std::vector<uint8_t> hit(static_cast<std::size_t>(replicates));
#pragma omp parallel if (parallel)
    {
        LocalTimeField scratch;
#pragma omp for schedule(static)
        for (int64_t r = 0; r < replicates; ++r) {
            const double z = replicate_z(k, m, n, seed, r, scratch);
            hit[static_cast<std::size_t>(r)] = (z / static_cast<double>(n) > b) ? 1 : 0;
        }
    }
    int64_t count = 0;
    for (uint8_t h : hit) count += h;
    TailEstimate e;
    e.method = "naive";
    e.n = static_cast<double>(n);
    e.b = b;
    e.replicates = replicates;
    e.estimate = static_cast<double>(count) / static_cast<double>(replicates);
    e.stderr_est = std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(replicates));
    e.log_estimate = std::log(e.estimate);
    e.log_stderr = e.estimate > 0 ? e.stderr_est / e.estimate : 0.0;
    return e;
}

TailEstimate tail_cond_gaussian(const StepKernel& k, double sigma, int64_t n, double b,
                                int64_t replicates, uint64_t seed, bool parallel) {
    std::vector<int64_t> ns{n};
    std::vector<double> bs{b};
    return tail_cond_gaussian_checkpoints(k, sigma, ns, bs, replicates, seed, parallel)[0];
}

std::vector<TailEstimate> tail_cond_gaussian_checkpoints(const StepKernel& k, double sigma,
                                                         const std::vector<int64_t>& n_list,
                                                         const std::vector<double>& b_list,
                                                         int64_t replicates, uint64_t seed,
                                                         bool parallel) {
    if (!(sigma > 0.0)) throw std::invalid_argument("tail_cond_gaussian: gaussian scenery required");
    if (replicates < 1) throw std::invalid_argument("tail_cond_gaussian: replicates >= 1 required");
    if (n_list.empty() || n_list.size() != b_list.size())
        throw std::invalid_argument("tail_cond_gaussian: n/b lists mismatch");
    if (!std::is_sorted(n_list.begin(), n_list.end()))
        throw std::invalid_argument("tail_cond_gaussian: n_list must ascend");

    const std::size_t nn = n_list.size();
    std::vector<std::vector<double>> logp(nn, std::vector<double>(static_cast<std::size_t>(replicates)));
#pragma omp parallel if (parallel)
    {
        std::vector<int64_t> lam;
#pragma omp for schedule(static)
        for (int64_t r = 0; r < replicates; ++r) {
            CounterRng rng(stream_key(seed, kStreamWalk, static_cast<uint64_t>(r)));
            walk_lambda_checkpoints(k, n_list, rng, lam);
            for (std::size_t i = 0; i < nn; ++i) {
                const double arg = static_cast<double>(n_list[i]) * b_list[i] /
                                   (sigma * std::sqrt(static_cast<double>(lam[i])));
                logp[i][static_cast<std::size_t>(r)] = log_normal_tail(arg);
            }
        }
    }
    std::vector<TailEstimate> out(nn);
    for (std::size_t i = 0; i < nn; ++i) {
        TailEstimate& e = out[i];
        e.method = "cond-gaussian";
        e.n = static_cast<double>(n_list[i]);
        e.b = b_list[i];
        e.replicates = replicates;
        log_mean_exp(logp[i], e.log_estimate, e.log_stderr);
        e.estimate = std::exp(e.log_estimate);
        e.stderr_est = e.estimate * e.log_stderr;
    }
    return out;
}

std::vector<LambdaStats> lambda_statistics(const StepKernel& k, const std::vector<int64_t>& n_list,
                                           int64_t replicates, uint64_t seed, bool parallel) {
    if (!std::is_sorted(n_list.begin(), n_list.end()))
        throw std::invalid_argument("lambda_statistics: n_list must ascend");
    const std::size_t nn = n_list.size();
    std::vector<std::vector<double>> lam(nn, std::vector<double>(static_cast<std::size_t>(replicates)));
#pragma omp parallel if (parallel)
    {
        std::vector<int64_t> buf;
#pragma omp for schedule(static)
        for (int64_t r = 0; r < replicates; ++r) {
            CounterRng rng(stream_key(seed, kStreamWalk, static_cast<uint64_t>(r)));
            walk_lambda_checkpoints(k, n_list, rng, buf);
            for (std::size_t i = 0; i < nn; ++i)
                lam[i][static_cast<std::size_t>(r)] = static_cast<double>(buf[i]);
        }
    }
    std::vector<LambdaStats> out;
    for (std::size_t i = 0; i < nn; ++i) {
        MeanVar mv;
        for (double x : lam[i]) mv.add(x);
        out.push_back({n_list[i], mv.mean, mv.variance(), std::sqrt(mv.variance() / mv.count)});
    }
    return out;
}

namespace {

// P(sum_i w_i U_i > s) for independent U_i ~ U[0,1]: inclusion-exclusion over
// the unit cube, exact for small k.
double uniform_weighted_tail(const std::vector<double>& w, double s) {
    const int kk = static_cast<int>(w.size());
    double total = 0.0;
    for (double x : w) total += x;
    if (s <= 0.0) return 1.0;
    if (s >= total) return 0.0;
    long double volume = 0.0L;  // P(sum <= s)
    for (int mask = 0; mask < (1 << kk); ++mask) {
        long double off = s;
        int bits = 0;
        for (int i = 0; i < kk; ++i) {
            if (mask & (1 << i)) {
                off -= w[static_cast<std::size_t>(i)];
                ++bits;
            }
        }
        if (off <= 0.0L) continue;
        long double term = 1.0L;
        for (int i = 0; i < kk; ++i) term *= off / (i + 1);
        for (double x : w) term /= x;
        volume += (bits % 2 == 0) ? term : -term;
    }
    double p = 1.0 - static_cast<double>(volume);
    return std::min(1.0, std::max(0.0, p));
}

double conditional_tail(const SceneryModel& m, const LocalTimeField& f, int64_t n, double b) {
    if (m.family == SceneryFamily::gaussian) {
        return normal_tail(static_cast<double>(n) * b /
                           (m.sigma * std::sqrt(static_cast<double>(f.lambda))));
    }
    // bounded uniform: Z = sum_i c_i Y_i over distinct sites
    std::vector<double> counts;
    f.counts.for_each([&](uint64_t, int64_t c) { counts.push_back(static_cast<double>(c)); });
    if (counts.size() > 5) throw std::invalid_argument("exact_enum: more than 5 distinct sites");
    const double span = m.b - m.a;
    double shift = 0.0;
    std::vector<double> w;
    for (double c : counts) {
        shift += c * m.a;
        w.push_back(c * span);
    }
    return uniform_weighted_tail(w, static_cast<double>(n) * b - shift);
}

void enum_paths(const StepKernel& k, const SceneryModel& m, int64_t n, double b, int64_t depth,
                Site& pos, LocalTimeField& f, double prob, double& acc) {
    if (depth == n) {
        acc += prob * conditional_tail(m, f, n, b);
        return;
    }
    for (std::size_t w = 0; w < k.offsets.size(); ++w) {
        Site next = pos;
        for (int i = 0; i < k.d; ++i) next[i] += k.offsets[w][i];
        const uint64_t key = pack_site(k.d, next);
        f.visit_packed(key);
        Site saved = pos;
        pos = next;
        enum_paths(k, m, n, b, depth + 1, pos, f, prob * k.probs[w], acc);
        pos = saved;
        // undo the visit
        f.counts.add(key, -1);
        const int64_t now = f.counts.get(key);
        f.lambda -= 2 * now + 1;
        --f.n;
    }
}

}  // namespace

double exact_enum(const StepKernel& k, const SceneryModel& m, int64_t n, double b) {
    if (m.family == SceneryFamily::weibull_tail)
        throw std::invalid_argument("exact_enum: needs gaussian or bounded_uniform scenery");
    double paths = std::pow(static_cast<double>(k.offsets.size()), static_cast<double>(n - 1));
    if (paths > static_cast<double>(1 << 24)) throw std::invalid_argument("exact_enum: instance too large");
    LocalTimeField f;
    f.d = k.d;
    Site pos = origin_site();
    f.visit(pos);
    double acc = 0.0;
    enum_paths(k, m, n, b, 1, pos, f, 1.0, acc);
    return acc;
}

std::vector<RateRow> rate_table(const ScaleRegime& regime, TailMethod method, const StepKernel& k,
                                const SceneryModel& m, const std::vector<int64_t>& n_list,
                                int64_t replicates, uint64_t seed, double prediction) {
    if (n_list.size() < 3 || !std::is_sorted(n_list.begin(), n_list.end()))
        throw std::invalid_argument("rate_table: need an ascending n_list with >= 3 entries");
    for (int64_t n : n_list) regime.check_admissible(static_cast<double>(n));

    std::vector<RateRow> rows;
    if (method == TailMethod::cond_gaussian) {
        if (!m.is_centered_gaussian())
            throw std::invalid_argument("rate_table: cond-gaussian needs gaussian scenery");
        std::vector<double> bs;
        for (int64_t n : n_list) bs.push_back(regime.b(static_cast<double>(n)));
        auto ests = tail_cond_gaussian_checkpoints(k, m.sigma, n_list, bs, replicates, seed);
        for (std::size_t i = 0; i < ests.size(); ++i) {
            const double sp = regime.speed(static_cast<double>(n_list[i]));
            rows.push_back({static_cast<double>(n_list[i]), ests[i].log_estimate / sp, prediction,
                            ests[i].log_stderr / sp});
        }
    } else {
        for (int64_t n : n_list) {
            const double bn = regime.b(static_cast<double>(n));
            TailEstimate e = tail_naive(k, m, n, bn, replicates, seed);
            const double sp = regime.speed(static_cast<double>(n));
            rows.push_back({static_cast<double>(n), e.log_estimate / sp, prediction, e.log_stderr / sp});
        }
    }
    return rows;
}

}  // namespace rwrs
