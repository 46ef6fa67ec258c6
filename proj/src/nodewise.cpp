#include "multinet/nodewise.hpp"

#include "multinet/parallel.hpp"

#include <cmath>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace multinet::nodewise {

hgsl::Problem build_node_problem(const MultiNetworkSample& sample, int j) {
    sample.validate();
    if (j < 0 || j >= sample.p) throw ValidationError("build_node_problem: node index out of range");
    hgsl::Problem prob;
    prob.k = sample.k;
    prob.G = sample.p - 1;
    prob.y.resize(sample.k);
    prob.Xd.resize(sample.k);
    for (int t = 0; t < sample.k; ++t) {
        prob.y[t] = sample.X[t].col(j);
        Matrix d(sample.n[t], sample.p - 1);
        for (int l = 0; l < sample.p - 1; ++l) d.col(l) = sample.X[t].col(group_to_node(j, l));
        prob.Xd[t] = std::move(d);
    }
    return prob;
}

NodewiseFit fit_node(const MultiNetworkSample& sample, int j, double lambda,
                     const FitOptions& opts) {
    const hgsl::Problem prob = build_node_problem(sample, j);
    hgsl::Solution sol = hgsl::solve(prob, lambda, opts.solver);

    std::vector<double> used = sol.beta;
    if (opts.use_refit) {
        sol.refit_beta = hgsl::refit_ols(prob, sol.support);
        used = *sol.refit_beta;
    }

    NodewiseFit fit;
    fit.j = j;
    fit.n = sample.n;
    fit.lambda_used = lambda;
    fit.support = sol.support;
    fit.iterations = sol.iterations;
    fit.converged = sol.converged;
    fit.C_hat.resize(sample.k);
    fit.C_raw.resize(sample.k);
    fit.residuals.resize(sample.k);
    fit.omega_jj.resize(sample.k);
    for (int t = 0; t < sample.k; ++t) {
        Vector c(prob.G), craw(prob.G);
        for (int l = 0; l < prob.G; ++l) {
            c(l) = used[hgsl::flat_index(t, l, prob.G)];
            craw(l) = sol.beta[hgsl::flat_index(t, l, prob.G)];
        }
        fit.C_hat[t] = c;
        fit.C_raw[t] = craw;
        fit.residuals[t] = prob.y[t] - prob.Xd[t] * c;
        const double ss = fit.residuals[t].squaredNorm();
        if (ss <= 0.0)
            throw NumericalError("fit_node: zero residual sum of squares for node " +
                                 std::to_string(j + 1) + ", class " + std::to_string(t + 1));
        fit.omega_jj[t] = sample.n[t] / ss;
    }
    return fit;
}

namespace {

std::vector<NodewiseFit> fit_all_impl(const MultiNetworkSample& sample, double lambda,
                                      const FitOptions& opts, bool parallel) {
    sample.validate();
    std::vector<NodewiseFit> fits(sample.p);
    std::vector<std::string> failures(sample.p);

#pragma omp parallel for schedule(dynamic) if (parallel && !in_omp_parallel())
    for (int j = 0; j < sample.p; ++j) {
        try {
            fits[j] = fit_node(sample, j, lambda, opts);
        } catch (const std::exception& e) {
            failures[j] = e.what();
        }
    }

    std::string msg;
    for (int j = 0; j < sample.p; ++j)
        if (!failures[j].empty())
            msg += (msg.empty() ? "" : "; ") + ("node " + std::to_string(j + 1) + ": " + failures[j]);
    if (!msg.empty()) throw NumericalError("fit_all_nodes: " + msg);
    return fits;
}

} // namespace

std::vector<NodewiseFit> fit_all_nodes(const MultiNetworkSample& sample, double lambda,
                                       const FitOptions& opts) {
    return fit_all_impl(sample, lambda, opts, true);
}

std::vector<NodewiseFit> fit_all_nodes_serial(const MultiNetworkSample& sample, double lambda,
                                              const FitOptions& opts) {
    return fit_all_impl(sample, lambda, opts, false);
}

double coef_on(const NodewiseFit& fit_a, int t, int b) {
    return fit_a.C_hat[t](node_to_group(fit_a.j, b));
}

PairStatistics pair_statistic(const std::vector<NodewiseFit>& fits, int a, int b) {
    if (a == b) throw ValidationError("pair_statistic: need two distinct nodes");
    if (a < 0 || b < 0 || a >= static_cast<int>(fits.size()) || b >= static_cast<int>(fits.size()))
        throw ValidationError("pair_statistic: node index out of range");
    const NodewiseFit& fa = fits[a];
    const NodewiseFit& fb = fits[b];
    if (fa.j != a || fb.j != b) throw ValidationError("pair_statistic: fit list out of order");

    const int k = static_cast<int>(fa.n.size());
    PairStatistics ps;
    ps.a = a;
    ps.b = b;
    ps.T.resize(k);
    for (int t = 0; t < k; ++t) {
        const Vector& ea = fa.residuals[t];
        const Vector& eb = fb.residuals[t];
        const double cross = ea.dot(eb);
        const double saa = ea.squaredNorm();
        const double sbb = eb.squaredNorm();
        const double c_ba = coef_on(fb, t, a); // coefficient of X_a in node b's regression
        const double c_ab = coef_on(fa, t, b); // coefficient of X_b in node a's regression
        ps.T[t] = (cross + saa * c_ba + sbb * c_ab) / fa.n[t];
    }
    return ps;
}

std::vector<double> j_statistic(const PrecisionSet& truth, const std::vector<NodewiseFit>& fits,
                                int a, int b) {
    if (a == b) throw ValidationError("j_statistic: need two distinct nodes");
    const NodewiseFit& fa = fits[a];
    const NodewiseFit& fb = fits[b];
    std::vector<double> J(truth.k);
    for (int t = 0; t < truth.k; ++t) {
        const double waa = truth.omega[t](a, a);
        const double wbb = truth.omega[t](b, b);
        const double wab = truth.omega[t](a, b);
        const double bracket = 1.0 - waa / fa.omega_jj[t] - wbb / fb.omega_jj[t];
        J[t] = bracket * wab / (waa * wbb);
    }
    return J;
}

PairStatistics pair_statistic(const PrecisionSet& truth, const std::vector<NodewiseFit>& fits,
                              int a, int b) {
    PairStatistics ps = pair_statistic(fits, a, b);
    ps.J = j_statistic(truth, fits, a, b);
    return ps;
}

} // namespace multinet::nodewise
