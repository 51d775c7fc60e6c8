#pragma once

#include <functional>
#include <vector>

#include "rwrs/step_kernel.hpp"

namespace rwrs {

/// Occupation counts of the positions S_0 .. S_{n-1} (n time points), with the
/// self-intersection sum Lambda = sum_z counts(z)^2 maintained incrementally
/// (visiting a site with current count c adds 2c+1).
struct LocalTimeField {
    int d = 1;
    int64_t n = 0;
    FlatCountMap counts;
    int64_t lambda = 0;

    void visit_packed(uint64_t key) {
        const int64_t prev = counts.increment(key);
        lambda += 2 * prev + 1;
        ++n;
    }
    void visit(const Site& s) { visit_packed(pack_site(d, s)); }

    int64_t range() const { return static_cast<int64_t>(counts.size()); }

    static LocalTimeField from_path(int d, const std::vector<Site>& path);
};

struct Walk {
    std::vector<Site> path;
    LocalTimeField field;
};

/// Walk of n positions started at the origin; deterministic given the seed.
Walk simulate_walk(const StepKernel& k, int64_t n, uint64_t seed);

/// Same simulation without retaining the path (Monte Carlo hot path).
void walk_local_times(const StepKernel& k, int64_t n, CounterRng& rng, LocalTimeField& out);

/// As above, but records Lambda at the given ascending checkpoint times.
/// Checkpoints share one path, which couples estimates across n.
void walk_lambda_checkpoints(const StepKernel& k, const std::vector<int64_t>& n_list,
                             CounterRng& rng, std::vector<int64_t>& lambda_out);

/// Recomputes Lambda from the counts (cross-check of the incremental value).
int64_t self_intersection(const LocalTimeField& f);

/// Local times of the walk wrapped onto the torus {-R,...,R-1}^d:
/// counts(z) = sum_k counts(z + 2Rk). Total mass is preserved.
LocalTimeField periodized_local_times(const LocalTimeField& f, int R);

/// L_n(x) = (alpha^d / n) counts(floor(x alpha)); piecewise constant on cells
/// of side 1/alpha, integrating to exactly 1.
struct ScaledLocalTimes {
    const LocalTimeField* base;
    double alpha;
};

/// <L_n, g> with g evaluated once per occupied cell at the cell midpoint.
double scaled_density_pairing(const ScaledLocalTimes& s,
                              const std::function<double(const double*, int)>& g);

/// integral of L_n (equals 1 up to rounding; exact mass identity).
double scaled_mass(const ScaledLocalTimes& s);

}  // namespace rwrs
