#pragma once

#include <map>
#include <string>
#include <vector>

#include "rwrs/local_times.hpp"
#include "rwrs/scenery.hpp"

namespace rwrs {

/// Deviation scale bookkeeping for the three regimes:
///   V        : b_n = n^theta (1 << b_n << n^{1/q}), alpha_n = n^{1/(d+2)} b_n^{-q/(d+2)}
///   L        : b_n = 1, alpha_n = n^{1/(d+2)}
///   small-dev: d = 2, b_n = n^{-1/2} (log n)^theta with theta in (1/2, 1)
/// speed(n) is the normalising prefactor of log P.
struct ScaleRegime {
    enum class Case { V, L, SmallDev };
    Case c = Case::L;
    int d = 1;
    double theta = 0.0;  // V: b_n = n^theta; SmallDev: log-power
    double q = 2.0;      // V: tail exponent for alpha_n and admissibility

    static ScaleRegime very_large(int d, double theta, double q);
    static ScaleRegime large(int d);
    static ScaleRegime small_dev(int d, double theta);

    double b(double n) const;
    double alpha(double n) const;
    double speed(double n) const;
    double rate_normalized(double log_p, double n) const { return log_p / speed(n); }
    void check_admissible(double n) const;

    /// Scale of the distributional limit of Z_n / n.
    static double a0(int d, double n);
    /// Upper edge of the small-deviation window in d = 2.
    static double a1(double n);

    std::string name() const;
};

/// Point estimate of P(Z_n/n > b) (or of its log), with standard error and
/// the rate-normalised value log P / speed when a regime is attached.
struct TailEstimate {
    std::string method;
    double n = 0;
    double b = 0;
    double estimate = 0;       // probability scale (may underflow to 0)
    double log_estimate = 0;   // always meaningful
    double stderr_est = 0;     // standard error of `estimate`
    double log_stderr = 0;     // standard error of log_estimate (delta method)
    int64_t replicates = 0;
    double rate_normalized = std::numeric_limits<double>::quiet_NaN();
    double prediction = std::numeric_limits<double>::quiet_NaN();
};

/// Z_n = sum_z Y(z) counts(z); throws if the field lacks an occupied site.
double rwrs_value(const LocalTimeField& f, const std::map<uint64_t, double>& field);

/// Site-sum and time-sum evaluations of Z_n for a retained path; the two are
/// asserted equal to 1e-9 relative.
double rwrs_value(const Walk& w, const std::map<uint64_t, double>& field);

/// Plain Monte Carlo over (walk, scenery) pairs; scenery drawn lazily on the
/// visited sites only. Deterministic in (seed, replicate index) regardless of
/// thread count.
TailEstimate tail_naive(const StepKernel& k, const SceneryModel& m, int64_t n, double b,
                        int64_t replicates, uint64_t seed, bool parallel = true);

/// Conditional-Gaussian estimator: P = E[ Phi_bar(n b / (sigma sqrt(Lambda_n))) ].
/// Valid for centred Gaussian scenery only; reduced variance (no scenery
/// sampling) and log-sum-exp aggregation so tiny tails keep full precision.
TailEstimate tail_cond_gaussian(const StepKernel& k, double sigma, int64_t n, double b,
                                int64_t replicates, uint64_t seed, bool parallel = true);

/// Same estimator at several n sharing one walk per replicate (Lambda is
/// recorded at checkpoints), which couples the estimates across n.
std::vector<TailEstimate> tail_cond_gaussian_checkpoints(const StepKernel& k, double sigma,
                                                         const std::vector<int64_t>& n_list,
                                                         const std::vector<double>& b_list,
                                                         int64_t replicates, uint64_t seed,
                                                         bool parallel = true);

/// E[Lambda_n] and Var[Lambda_n] at checkpoint times, one walk per replicate.
struct LambdaStats {
    int64_t n;
    double mean;
    double variance;
    double mean_stderr;
};
std::vector<LambdaStats> lambda_statistics(const StepKernel& k, const std::vector<int64_t>& n_list,
                                           int64_t replicates, uint64_t seed, bool parallel = true);

/// Exact P(Z_n/n > b) by path enumeration with an exact conditional factor:
/// Gaussian scenery via the normal tail given Lambda; bounded_uniform scenery
/// via the closed-form distribution of a weighted sum of uniforms (at most 5
/// distinct sites).
double exact_enum(const StepKernel& k, const SceneryModel& m, int64_t n, double b);

struct RateRow {
    double n;
    double rate_normalized;
    double prediction;
    double stderr_norm;
};

enum class TailMethod { naive, cond_gaussian };

/// Rate-normalised log-probabilities along an ascending n-list (>= 3 entries),
/// with the variational prediction attached for side-by-side reporting.
std::vector<RateRow> rate_table(const ScaleRegime& regime, TailMethod method, const StepKernel& k,
                                const SceneryModel& m, const std::vector<int64_t>& n_list,
                                int64_t replicates, uint64_t seed, double prediction);

}  // namespace rwrs
