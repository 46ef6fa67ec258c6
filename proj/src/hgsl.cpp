#include "multinet/hgsl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "multinet/parallel.hpp"
#include "multinet/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace multinet::hgsl {

int Problem::n0() const {
    int m = std::numeric_limits<int>::max();
    for (const auto& v : y) m = std::min(m, static_cast<int>(v.size()));
    return m;
}

void Problem::validate() const {
    if (k < 1 || static_cast<int>(y.size()) != k || static_cast<int>(Xd.size()) != k)
        throw ValidationError("hgsl: class count mismatch");
    if (G < 1) throw ValidationError("hgsl: need at least one group");
    for (int t = 0; t < k; ++t) {
        if (Xd[t].cols() != G) throw ValidationError("hgsl: design column count mismatch");
        if (Xd[t].rows() != y[t].size())
            throw ValidationError("hgsl: response length does not match design rows in class " +
                                  std::to_string(t + 1));
        if (y[t].size() < 1) throw ValidationError("hgsl: empty class");
    }
}

DiagScaling scaling_matrix(const Problem& problem) {
    problem.validate();
    DiagScaling s;
    s.d.resize(static_cast<size_t>(problem.G) * problem.k);
    for (int t = 0; t < problem.k; ++t) {
        const double inv_n = 1.0 / problem.n(t);
        for (int l = 0; l < problem.G; ++l) {
            const double v = problem.Xd[t].col(l).squaredNorm() * inv_n;
            if (v <= 0.0)
                throw ValidationError("hgsl: column " + std::to_string(l + 1) + " of class " +
                                      std::to_string(t + 1) + " is identically zero");
            s.d[flat_index(t, l, problem.G)] = v;
        }
    }
    return s;
}

Problem scaled_problem(const Problem& problem, const DiagScaling& scaling) {
    Problem out = problem;
    for (int t = 0; t < problem.k; ++t)
        for (int l = 0; l < problem.G; ++l)
            out.Xd[t].col(l) /= std::sqrt(scaling.d[flat_index(t, l, problem.G)]);
    return out;
}

double LambdaConfig::prefactor() const {
    if (std::isinf(xi)) return 1.0;
    return (xi + 1.0) / (xi - 1.0);
}

void LambdaConfig::validate() const {
    if (delta < 1.0) throw ValidationError("lambda config: delta must be >= 1");
    if (!(xi > 1.0)) throw ValidationError("lambda config: xi must be > 1 (or infinity)");
    if (reps < 1) throw ValidationError("lambda config: reps must be >= 1");
}

double lambda_theoretical(int n0, int p, int k, const LambdaConfig& config) {
    config.validate();
    if (n0 < 1 || p < 1 || k < 1) throw ValidationError("lambda_theoretical: bad dimensions");
    const double logp = std::log(static_cast<double>(p));
    const double logk = std::log(static_cast<double>(k));
    const double tau = std::sqrt(8.0 * (config.delta * logp + logk) / n0);
    if (tau >= 1.0)
        throw NumericalError("lambda_theoretical: tau >= 1, sample size too small for the "
                             "closed-form rule; use the simulated rule instead");
    const double num = k + 2.0 * config.delta * logp + 2.0 * std::sqrt(config.delta * k * logp);
    return config.prefactor() * std::sqrt(num / (n0 * (1.0 - tau)));
}

namespace {

// One replication of the pure-noise group score. The two draws enter only
// through their cosine, so the result does not depend on the noise levels.
double noise_score(const std::vector<int>& n, int k, std::uint64_t rep_seed) {
    double sumsq = 0.0;
    for (int t = 0; t < k; ++t) {
        Rng rng(derive_seed(rep_seed, 0x5a31, static_cast<std::uint64_t>(t)));
        double dot = 0.0, n1 = 0.0, n2 = 0.0;
        for (int i = 0; i < n[t]; ++i) {
            const double a = rng.normal();
            const double b = rng.normal();
            dot += a * b;
            n1 += a * a;
            n2 += b * b;
        }
        const double z = std::sqrt(static_cast<double>(n[t])) * dot / std::sqrt(n1 * n2);
        sumsq += z * z;
    }
    return std::sqrt(sumsq);
}

double lambda_from_scores(std::vector<double>& scores, int n0, int p,
                          const LambdaConfig& config) {
    std::sort(scores.begin(), scores.end());
    const double q = 1.0 - std::pow(static_cast<double>(p), -config.delta);
    const long reps = static_cast<long>(scores.size());
    long m = static_cast<long>(std::ceil(q * reps - 1e-12));
    m = std::clamp(m, 1L, reps);
    return scores[m - 1] * config.prefactor() / std::sqrt(static_cast<double>(n0));
}

void check_lambda_dims(const std::vector<int>& n, int p, int k) {
    if (k < 1 || static_cast<int>(n.size()) != k) throw ValidationError("lambda_simulated: bad class sizes");
    if (p < 1) throw ValidationError("lambda_simulated: bad p");
    for (int v : n)
        if (v < 1) throw ValidationError("lambda_simulated: bad class size");
}

} // namespace

double lambda_simulated(const std::vector<int>& n, int p, int k, const LambdaConfig& config) {
    config.validate();
    check_lambda_dims(n, p, k);
    const int n0 = *std::min_element(n.begin(), n.end());
    std::vector<double> scores(config.reps);
#pragma omp parallel for schedule(static) if (!in_omp_parallel())
    for (int rep = 0; rep < config.reps; ++rep)
        scores[rep] = noise_score(n, k, derive_seed(config.seed, 0x4c, static_cast<std::uint64_t>(rep)));
    return lambda_from_scores(scores, n0, p, config);
}

double lambda_simulated_serial(const std::vector<int>& n, int p, int k, const LambdaConfig& config) {
    config.validate();
    check_lambda_dims(n, p, k);
    const int n0 = *std::min_element(n.begin(), n.end());
    std::vector<double> scores(config.reps);
    for (int rep = 0; rep < config.reps; ++rep)
        scores[rep] = noise_score(n, k, derive_seed(config.seed, 0x4c, static_cast<std::uint64_t>(rep)));
    return lambda_from_scores(scores, n0, p, config);
}

Vector soft_threshold_group(const Vector& a, double lam) {
    const double norm = a.norm();
    if (norm <= lam || norm == 0.0) return Vector::Zero(a.size());
    return a * ((norm - lam) / norm);
}

namespace {

// Largest singular value by power iteration on X'X, 1e-6 relative accuracy.
double spectral_norm(const Matrix& X) {
    const int g = static_cast<int>(X.cols());
    Vector v = Vector::Ones(g);
    for (int i = 0; i < g; ++i) v(i) += 1e-3 * std::cos(static_cast<double>(i) + 1.0);
    v.normalize();
    double sigma = 0.0;
    for (int it = 0; it < 500; ++it) {
        Vector w = X.transpose() * (X * v);
        const double nw = w.norm();
        if (nw == 0.0) return 0.0;
        w /= nw;
        const double next = std::sqrt(nw);
        if (it > 0 && std::abs(next - sigma) <= 1e-6 * next) {
            sigma = next;
            break;
        }
        sigma = next;
        v = w;
    }
    return sigma;
}

struct IterationState {
    std::vector<Matrix> X;   // standardized, K0-rescaled designs
    std::vector<Vector> y;   // K0-rescaled responses
    std::vector<double> floor_norm;
    double sqrt_n0 = 0.0;
    double lambda = 0.0;     // K0-rescaled penalty
};

// One pass of the thresholding update; returns the sup-norm step.
// B is G x k with column t holding beta^(t); R accumulates the normalized gradient.
double update(const IterationState& st, Matrix& B, Matrix& R, Matrix& V,
              std::vector<double>& res_norm, double& loss_term) {
    const int k = static_cast<int>(st.X.size());
    double A = 0.0;
    loss_term = 0.0;
    for (int t = 0; t < k; ++t) {
        Vector r = st.X[t] * B.col(t) - st.y[t];
        const double nr = r.norm();
        res_norm[t] = nr;
        if (nr <= st.floor_norm[t])
            throw NumericalError("hgsl: residual norm of class " + std::to_string(t + 1) +
                                 " fell below the floor (lambda too small or an interpolating fit)");
        loss_term += nr / st.sqrt_n0;
        R.col(t) = st.X[t].transpose() * r / (st.sqrt_n0 * nr);
        A += 1.0 / (st.sqrt_n0 * nr);
    }
    V = B - R / A;
    const double thr = st.lambda / A;
    double step = 0.0;
    for (int l = 0; l < B.rows(); ++l) {
        const double norm = V.row(l).norm();
        Eigen::RowVectorXd next;
        if (norm <= thr || norm == 0.0)
            next = Eigen::RowVectorXd::Zero(k);
        else
            next = V.row(l) * ((norm - thr) / norm);
        step = std::max(step, (next - B.row(l)).cwiseAbs().maxCoeff());
        B.row(l) = next;
    }
    return step;
}

double penalty_term(const Matrix& B, double lambda) {
    double s = 0.0;
    for (int l = 0; l < B.rows(); ++l) s += B.row(l).norm();
    return lambda * s;
}

} // namespace

Solution solve(const Problem& problem, double lambda, const SolveOptions& opts) {
    if (!(lambda > 0.0)) throw ValidationError("hgsl: lambda must be positive");
    const DiagScaling scaling = scaling_matrix(problem);
    const int k = problem.k, G = problem.G;
    const double sqrt_n0 = std::sqrt(static_cast<double>(problem.n0()));

    Problem std_problem = scaled_problem(problem, scaling);
    double k0 = 0.0;
    for (int t = 0; t < k; ++t) k0 = std::max(k0, spectral_norm(std_problem.Xd[t]));
    k0 *= opts.k0_multiplier;
    if (k0 <= 0.0) throw NumericalError("hgsl: zero spectral norm");

    Solution sol;
    sol.lambda = lambda;

    // The rescaling leaves the argmin unchanged, so a descent failure can be
    // repaired by doubling K0 and restarting.
    int total_iters = 0;
    for (int attempt = 0; attempt < 8; ++attempt, k0 *= 2.0) {
        IterationState st;
        st.sqrt_n0 = sqrt_n0;
        st.lambda = lambda / k0;
        st.X.resize(k);
        st.y.resize(k);
        st.floor_norm.resize(k);
        for (int t = 0; t < k; ++t) {
            st.X[t] = std_problem.Xd[t] / k0;
            st.y[t] = std_problem.y[t] / k0;
            st.floor_norm[t] = opts.residual_floor * st.y[t].norm();
        }

        Matrix B = Matrix::Zero(G, k);
        Matrix R(G, k), V(G, k);
        std::vector<double> res_norm(k);

        sol.objective_trace.clear();
        bool descent_ok = true;
        sol.converged = false;

        const auto flatten = [&](const Matrix& M) {
            std::vector<double> flat(static_cast<size_t>(G) * k);
            for (int t = 0; t < k; ++t)
                for (int l = 0; l < G; ++l) flat[flat_index(t, l, G)] = M(l, t);
            return flat;
        };

        double prev_obj = std::numeric_limits<double>::infinity();
        for (int m = 0; m < opts.max_iter; ++m) {
            // F(beta(m)): the penalty is taken before update() advances B.
            const double pen_m = penalty_term(B, st.lambda);
            double loss_m = 0.0;
            const double step = update(st, B, R, V, res_norm, loss_m);
            const double f_m = (loss_m + pen_m) * k0;
            sol.objective_trace.push_back(f_m);
            if (f_m > prev_obj + 1e-12) {
                descent_ok = false;
                break;
            }
            prev_obj = f_m;
            ++total_iters;
            // step rule plus a stationarity check: the iterate only counts as
            // converged once its KKT violation is within 10x the step tolerance
            if (step < opts.tol &&
                kkt_residual(std_problem, lambda, flatten(B)) <= 10.0 * opts.tol) {
                sol.converged = true;
                break;
            }
        }
        if (!descent_ok) continue;

        // final objective at the returned iterate
        double loss = 0.0;
        for (int t = 0; t < k; ++t) {
            const double nr = (st.X[t] * B.col(t) - st.y[t]).norm();
            loss += nr / sqrt_n0;
        }
        const double f_final = (loss + penalty_term(B, st.lambda)) * k0;
        if (f_final > prev_obj + 1e-12) continue;
        sol.objective_trace.push_back(f_final);

        sol.k0 = k0;
        sol.iterations = total_iters;
        sol.beta_scaled.assign(static_cast<size_t>(G) * k, 0.0);
        sol.beta.assign(static_cast<size_t>(G) * k, 0.0);
        for (int t = 0; t < k; ++t)
            for (int l = 0; l < G; ++l) {
                const int idx = flat_index(t, l, G);
                sol.beta_scaled[idx] = B(l, t);
                sol.beta[idx] = B(l, t) / std::sqrt(scaling.d[idx]);
            }
        for (int l = 0; l < G; ++l) {
            double norm = 0.0;
            for (int t = 0; t < k; ++t) norm += B(l, t) * B(l, t);
            if (norm > 0.0) sol.support.push_back(l);
        }
        return sol;
    }
    throw NumericalError("hgsl: descent could not be established even after enlarging K0");
}

double kkt_residual(const Problem& problem, double lambda, const std::vector<double>& beta) {
    problem.validate();
    if (lambda < 0.0) throw ValidationError("hgsl: lambda must be nonnegative");
    if (beta.size() != static_cast<size_t>(problem.G) * problem.k)
        throw ValidationError("hgsl: beta length mismatch");
    const int k = problem.k, G = problem.G;
    const double sqrt_n0 = std::sqrt(static_cast<double>(problem.n0()));

    Matrix R(G, k), B(G, k);
    for (int t = 0; t < k; ++t) {
        Vector bt(G);
        for (int l = 0; l < G; ++l) bt(l) = beta[flat_index(t, l, G)];
        B.col(t) = bt;
        Vector r = problem.Xd[t] * bt - problem.y[t];
        const double nr = r.norm();
        if (nr == 0.0)
            throw NumericalError("hgsl: zero residual norm in class " + std::to_string(t + 1));
        R.col(t) = problem.Xd[t].transpose() * r / (sqrt_n0 * nr);
    }
    double worst = 0.0;
    for (int l = 0; l < G; ++l) {
        const double bnorm = B.row(l).norm();
        if (bnorm > 0.0)
            worst = std::max(worst, (R.row(l) + lambda * B.row(l) / bnorm).norm());
        else
            worst = std::max(worst, std::max(0.0, R.row(l).norm() - lambda));
    }
    return worst;
}

std::vector<double> refit_ols(const Problem& problem, const std::vector<int>& support) {
    problem.validate();
    std::vector<double> beta(static_cast<size_t>(problem.G) * problem.k, 0.0);
    if (support.empty()) return beta;
    const int s = static_cast<int>(support.size());
    for (int l : support)
        if (l < 0 || l >= problem.G) throw ValidationError("refit_ols: support index out of range");
    for (int t = 0; t < problem.k; ++t) {
        Matrix Xs(problem.n(t), s);
        for (int i = 0; i < s; ++i) Xs.col(i) = problem.Xd[t].col(support[i]);
        Eigen::ColPivHouseholderQR<Matrix> qr(Xs);
        qr.setThreshold(1e-10);
        if (qr.rank() < s)
            throw NumericalError("refit_ols: restricted design of class " + std::to_string(t + 1) +
                                 " is rank deficient");
        Vector coef = qr.solve(problem.y[t]);
        for (int i = 0; i < s; ++i) beta[flat_index(t, support[i], problem.G)] = coef(i);
    }
    return beta;
}

double objective(const Problem& problem, double lambda, const std::vector<double>& beta) {
    problem.validate();
    const int k = problem.k, G = problem.G;
    const double sqrt_n0 = std::sqrt(static_cast<double>(problem.n0()));
    double loss = 0.0;
    for (int t = 0; t < k; ++t) {
        Vector bt(G);
        for (int l = 0; l < G; ++l) bt(l) = beta[flat_index(t, l, G)];
        loss += (problem.y[t] - problem.Xd[t] * bt).norm() / sqrt_n0;
    }
    double pen = 0.0;
    for (int l = 0; l < G; ++l) {
        double nsq = 0.0;
        for (int t = 0; t < k; ++t) {
            const double v = beta[flat_index(t, l, G)];
            nsq += v * v;
        }
        pen += std::sqrt(nsq);
    }
    return loss + lambda * pen;
}

} // namespace multinet::hgsl
