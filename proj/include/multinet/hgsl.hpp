#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "multinet/types.hpp"

namespace multinet::hgsl {

/// One multi-response regression instance: k response vectors y[t] with
/// block-diagonal designs Xd[t] (n[t] x G). Coefficients are handled as a flat
/// vector of length G*k laid out class-major: entry for class t, group l sits
/// at t*G + l. The group subvector beta_(l) collects index l across classes.
struct Problem {
    int k = 0;
    int G = 0;
    std::vector<Vector> y;
    std::vector<Matrix> Xd;

    int n0() const;
    int n(int t) const { return static_cast<int>(y[t].size()); }
    void validate() const;
};

inline int flat_index(int t, int l, int G) { return t * G + l; }

/// Per-column scaling d[t*G+l] = ||Xd[t] column l||^2 / n[t].
/// Every entry must be positive; an identically zero column is an error.
struct DiagScaling {
    std::vector<double> d; // length G*k
};

DiagScaling scaling_matrix(const Problem& problem);

/// Column-standardized copy: column l of class t divided by sqrt(d[t,l]),
/// so each column has squared norm n[t]. Solving this problem and mapping the
/// minimizer through d^{-1/2} recovers the minimizer of the original program.
Problem scaled_problem(const Problem& problem, const DiagScaling& scaling);

/// Settings for the tuning-free penalty level.
struct LambdaConfig {
    double delta = 1.0;                                        // >= 1
    double xi = std::numeric_limits<double>::infinity();       // > 1; inf gives prefactor 1
    int reps = 10000;                                          // Monte Carlo replications
    std::uint64_t seed = 0;

    double prefactor() const; // (xi+1)/(xi-1), exactly 1 at xi = inf
    void validate() const;
};

/// Closed-form penalty level
///   lambda = prefactor * sqrt((k + 2 delta log p + 2 sqrt(delta k log p)) / (n0 (1 - tau))),
///   tau = sqrt(8 (delta log p + log k) / n0).
/// Valid only when tau < 1; otherwise throws (fall back to lambda_simulated).
double lambda_theoretical(int n0, int p, int k, const LambdaConfig& config);

/// Monte Carlo penalty level. Per replication and class draws standard normal
/// vectors z1, z2 of length n[t] and forms z = sqrt(n[t]) z1'z2 / (||z1|| ||z2||),
/// a scale-free quantity that is asymptotically standard normal; lambda is the
/// empirical (1 - p^-delta) quantile of sqrt(sum_t z^2) over the replications,
/// times prefactor / sqrt(n0).
double lambda_simulated(const std::vector<int>& n, int p, int k, const LambdaConfig& config);
double lambda_simulated_serial(const std::vector<int>& n, int p, int k, const LambdaConfig& config);

/// Multivariate soft-thresholding: 0 when ||a|| <= lam, else a (||a||-lam)/||a||.
Vector soft_threshold_group(const Vector& a, double lam);

struct SolveOptions {
    int max_iter = 10000;
    double tol = 1e-7;                 // on ||beta(m+1) - beta(m)||_inf
    double residual_floor = 1e-10;     // relative to ||y[t]||; guards the interpolation regime
    double k0_multiplier = 1.0;        // K0 = multiplier * max_t spectral norm of scaled design
};

struct Solution {
    std::vector<double> beta;          // original coordinates, length G*k
    std::vector<double> beta_scaled;   // coordinates of the column-standardized program
    std::vector<int> support;          // group indices l with ||beta_(l)|| > 0
    std::vector<double> objective_trace;
    int iterations = 0;
    bool converged = false;
    double k0 = 0.0;
    double lambda = 0.0;
    std::optional<std::vector<double>> refit_beta; // filled by callers that refit
};

/// Iterative multivariate soft-thresholding solver for
///   min_beta sum_t ||y[t] - Xd[t] beta^(t)|| / sqrt(n0) + lambda sum_l ||d_(l)^{1/2} beta_(l)||.
/// Internally standardizes columns, rescales everything by K0, and runs
///   beta(m+1)_(l) = soft_threshold_group(beta(m)_(l) - R(m)_(l)/A(m); lambda/A(m))
/// from beta(0) = 0. The objective trace is recorded in the standardized
/// program's units and is non-increasing.
Solution solve(const Problem& problem, double lambda, const SolveOptions& opts = {});

/// Max over groups of the KKT violation of the program
///   min sum_t ||y[t] - Xd[t] beta^(t)|| / sqrt(n0) + lambda sum_l ||beta_(l)||
/// at the given flat beta: for active groups ||R_(l) + lambda beta_(l)/||beta_(l)||||,
/// for inactive groups (||R_(l)|| - lambda)_+, with R the normalized gradient
/// R^(t) = Xd[t]'(Xd[t] beta^(t) - y[t]) / (sqrt(n0) ||Xd[t] beta^(t) - y[t]||).
double kkt_residual(const Problem& problem, double lambda, const std::vector<double>& beta);

/// Per-class least squares restricted to the support groups; zeros elsewhere.
/// Throws NumericalError naming the class when a restricted design is rank deficient.
std::vector<double> refit_ols(const Problem& problem, const std::vector<int>& support);

/// Objective of the generic program evaluated at a flat beta (test/diagnostic aid).
double objective(const Problem& problem, double lambda, const std::vector<double>& beta);

} // namespace multinet::hgsl
