#include "multinet/inference.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace multinet::inference {

void TestConfig::validate(int k) const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("test config: alpha must lie in (0,1)");
    if (kind == TestKind::linfun) {
        if (static_cast<int>(signs.size()) != k)
            throw ValidationError("test config: sign vector length must equal k");
        for (int s : signs)
            if (s != 1 && s != -1) throw ValidationError("test config: signs must be +1 or -1");
    }
    if (!(rho > 0.0)) throw ValidationError("test config: rho must be positive");
}

double u_statistic(const std::vector<nodewise::NodewiseFit>& fits, int a, int b) {
    const auto ps = nodewise::pair_statistic(fits, a, b);
    const int k = static_cast<int>(ps.T.size());
    double usq = 0.0;
    for (int t = 0; t < k; ++t) {
        const double w = fits[a].n[t] * fits[b].omega_jj[t] * fits[a].omega_jj[t];
        usq += w * ps.T[t] * ps.T[t];
    }
    return std::sqrt(usq);
}

double v_statistic(const std::vector<nodewise::NodewiseFit>& fits, int a, int b,
                   const std::vector<int>& signs) {
    const auto ps = nodewise::pair_statistic(fits, a, b);
    const int k = static_cast<int>(ps.T.size());
    if (static_cast<int>(signs.size()) != k)
        throw ValidationError("v_statistic: sign vector length must equal k");
    double v = 0.0;
    for (int t = 0; t < k; ++t)
        v += signs[t] * std::sqrt(fits[a].n[t] * fits[a].omega_jj[t] * fits[b].omega_jj[t]) * ps.T[t];
    return v;
}

TestResult run_test(const std::vector<nodewise::NodewiseFit>& fits, int a, int b,
                    const TestConfig& config) {
    const int k = static_cast<int>(fits[a].n.size());
    config.validate(k);
    TestResult r;
    r.a = a;
    r.b = b;
    r.kind = config.kind;
    r.sided = config.sided;
    r.alpha = config.alpha;
    if (config.kind == TestKind::chi) {
        r.statistic = u_statistic(fits, a, b);
        r.critical = chi_quantile(k, 1.0 - config.alpha);
        r.reject = r.statistic > r.critical;
    } else {
        r.statistic = v_statistic(fits, a, b, config.signs) / std::sqrt(static_cast<double>(k));
        if (config.sided == Sidedness::one) {
            r.critical = normal_quantile(config.alpha);
            r.reject = r.statistic < r.critical;
        } else {
            r.critical = normal_quantile(1.0 - config.alpha / 2.0);
            r.reject = std::abs(r.statistic) > r.critical;
        }
    }
    return r;
}

EdgeSet support_recover(const std::vector<nodewise::NodewiseFit>& fits, double rho) {
    if (!(rho > 0.0)) throw ValidationError("support_recover: rho must be positive");
    const int p = static_cast<int>(fits.size());
    const int k = static_cast<int>(fits[0].n.size());
    EdgeSet es;
    es.p = p;
    const double level = std::pow(static_cast<double>(p), -2.0 - rho);
    const double q = 1.0 - level;
    if (q >= 1.0) return es; // quantile diverges; nothing can be selected
    const double crit = chi_quantile(k, q);
    for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < p; ++b)
            if (u_statistic(fits, a, b) > crit) es.insert(a, b);
    return es;
}

PrecisionSet estimate_precision(const std::vector<nodewise::NodewiseFit>& fits,
                                const TestConfig& config) {
    const int p = static_cast<int>(fits.size());
    const int k = static_cast<int>(fits[0].n.size());
    config.validate(k);
    std::vector<Matrix> omega(k, Matrix::Zero(p, p));
    for (int a = 0; a < p; ++a)
        for (int t = 0; t < k; ++t) omega[t](a, a) = fits[a].omega_jj[t];
    for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < p; ++b) {
            const TestResult r = run_test(fits, a, b, config);
            if (!r.reject) continue;
            const auto ps = nodewise::pair_statistic(fits, a, b);
            for (int t = 0; t < k; ++t) {
                const double v = -fits[a].omega_jj[t] * fits[b].omega_jj[t] * ps.T[t];
                omega[t](a, b) = v;
                omega[t](b, a) = v;
            }
        }
    PrecisionSet out;
    out.k = k;
    out.p = p;
    out.omega = std::move(omega);
    return out;
}

double validation_loss(const PrecisionSet& est, const MultiNetworkSample& val_sample) {
    if (est.p != val_sample.p || est.k != val_sample.k)
        throw ValidationError("validation_loss: dimension mismatch");
    double total = 0.0;
    for (int t = 0; t < est.k; ++t) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(est.omega[t]);
        if (es.eigenvalues().minCoeff() <= 0.0) return -std::numeric_limits<double>::infinity();
        double logdet = 0.0;
        for (int i = 0; i < est.p; ++i) logdet += std::log(es.eigenvalues()(i));
        const Matrix sigma = val_sample.X[t].transpose() * val_sample.X[t] / val_sample.n[t];
        total += logdet - (sigma * est.omega[t]).trace();
    }
    return total;
}

namespace {

// Sum over classes of the magnitude of the most negative eigenvalue; the
// all-non-PD fallback ranks candidates by how close to PD they are.
double indefiniteness(const PrecisionSet& est) {
    double pen = 0.0;
    for (const auto& m : est.omega) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
        pen += std::max(0.0, -es.eigenvalues().minCoeff());
    }
    return pen;
}

} // namespace

TuneResult tune_alpha(const std::vector<nodewise::NodewiseFit>& fits,
                      const MultiNetworkSample& validation, const std::vector<double>& grid,
                      const TestConfig& config) {
    if (grid.empty()) throw ValidationError("tune_alpha: empty grid");
    for (double a : grid)
        if (!(a > 0.0 && a < 1.0)) throw ValidationError("tune_alpha: grid values must lie in (0,1)");

    TuneResult res;
    res.grid = grid;
    std::sort(res.grid.begin(), res.grid.end());
    res.scores.resize(res.grid.size());

    std::vector<PrecisionSet> estimates(res.grid.size());
    for (size_t i = 0; i < res.grid.size(); ++i) {
        TestConfig c = config;
        c.alpha = res.grid[i];
        estimates[i] = estimate_precision(fits, c);
        res.scores[i] = validation_loss(estimates[i], validation);
    }

    // max score; scan ascending so ties resolve toward the smaller (sparser) alpha
    size_t best = 0;
    bool any_finite = false;
    for (size_t i = 0; i < res.grid.size(); ++i) {
        if (!std::isfinite(res.scores[i])) continue;
        if (!any_finite || res.scores[i] > res.scores[best]) {
            best = i;
            any_finite = true;
        }
    }
    if (!any_finite) {
        res.all_non_pd = true;
        double best_pen = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < res.grid.size(); ++i) {
            const double pen = indefiniteness(estimates[i]);
            if (pen < best_pen) {
                best_pen = pen;
                best = i;
            }
        }
    }
    res.alpha = res.grid[best];
    return res;
}

TuneResult tune_alpha(const MultiNetworkSample& train, const MultiNetworkSample& validation,
                      const std::vector<double>& grid, const TestConfig& config, double lambda,
                      const nodewise::FitOptions& opts) {
    const auto fits = nodewise::fit_all_nodes(train, lambda, opts);
    return tune_alpha(fits, validation, grid, config);
}

std::vector<double> default_alpha_grid() {
    std::vector<double> g;
    const double lo = std::log10(1e-3), hi = std::log10(0.5);
    for (int i = 0; i < 10; ++i) g.push_back(std::pow(10.0, lo + (hi - lo) * i / 9.0));
    return g;
}

} // namespace multinet::inference
