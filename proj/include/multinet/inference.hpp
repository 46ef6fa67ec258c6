#pragma once

#include <optional>
#include <vector>

#include "multinet/nodewise.hpp"
#include "multinet/special.hpp"
#include "multinet/types.hpp"

namespace multinet::inference {

enum class TestKind { chi, linfun };
enum class Sidedness { one, two };

struct TestConfig {
    double alpha = 0.05;
    TestKind kind = TestKind::chi;
    std::vector<int> signs;            // +1/-1 per class; linfun only
    Sidedness sided = Sidedness::one;  // linfun only
    double rho = 1.0;                  // support recovery exponent

    void validate(int k) const;
    static std::vector<int> all_ones(int k) { return std::vector<int>(k, 1); }
};

struct TestResult {
    int a = -1, b = -1;
    double statistic = 0.0; // U for chi; V/sqrt(k) for linfun
    double critical = 0.0;
    bool reject = false;
    TestKind kind = TestKind::chi;
    Sidedness sided = Sidedness::one;
    double alpha = 0.0;
};

/// U = sqrt( sum_t n^(t) w^_bb w^_aa (T^(t))^2 ), nonnegative and symmetric in (a,b).
double u_statistic(const std::vector<nodewise::NodewiseFit>& fits, int a, int b);

/// V(xi) = sum_t xi_t sqrt(n^(t) w^_aa w^_bb) T^(t); V(-xi) = -V(xi).
double v_statistic(const std::vector<nodewise::NodewiseFit>& fits, int a, int b,
                   const std::vector<int>& signs);

/// chi:     reject iff U > chi_quantile(k, 1-alpha)
/// linfun:  one-sided reject iff V/sqrt(k) < normal_quantile(alpha);
///          two-sided reject iff |V|/sqrt(k) > normal_quantile(1-alpha/2)
TestResult run_test(const std::vector<nodewise::NodewiseFit>& fits, int a, int b,
                    const TestConfig& config);

/// All-pairs chi test at level p^{-2-rho}: the tuning-free support estimator.
EdgeSet support_recover(const std::vector<nodewise::NodewiseFit>& fits, double rho);

/// Two-step precision estimate: diagonals w^_aa; off-diagonals
/// -w^_aa w^_bb T^(t) for rejected pairs, zero otherwise. Symmetric by
/// construction, not guaranteed positive definite.
PrecisionSet estimate_precision(const std::vector<nodewise::NodewiseFit>& fits,
                                const TestConfig& config);

/// Gaussian log-likelihood style validation score
///   L = sum_t { log det(Omega^(t)) - tr(Sigma^(t) Omega^(t)) },
/// with Sigma the validation sample second-moment matrices. Non-PD candidates
/// score -infinity rather than throwing.
double validation_loss(const PrecisionSet& est, const MultiNetworkSample& val_sample);

struct TuneResult {
    double alpha = 0.0;
    std::vector<double> grid;
    std::vector<double> scores;      // validation score per grid point
    bool all_non_pd = false;         // warning: every candidate was non-PD
};

/// Evaluate the two-step estimator on precomputed fits over a grid of alpha
/// values, scoring each on the validation sample; pick the score maximizer
/// (ties toward smaller alpha). If every candidate is non-PD, fall back to the
/// smallest indefiniteness penalty and set the warning flag.
TuneResult tune_alpha(const std::vector<nodewise::NodewiseFit>& fits,
                      const MultiNetworkSample& validation, const std::vector<double>& grid,
                      const TestConfig& config);

/// Convenience: fit the training sample, then tune as above.
TuneResult tune_alpha(const MultiNetworkSample& train, const MultiNetworkSample& validation,
                      const std::vector<double>& grid, const TestConfig& config, double lambda,
                      const nodewise::FitOptions& opts = {});

/// Log-spaced default grid of 10 values in [1e-3, 0.5].
std::vector<double> default_alpha_grid();

} // namespace multinet::inference
