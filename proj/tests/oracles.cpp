#include "oracles.hpp"

#include <algorithm>
#include <cmath>

#include "multinet/rng.hpp"

namespace oracles {

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb, double whole, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 1e-13)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, m, fa, flm, fm, left, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, depth - 1);
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(f, a, b, fa, fm, fb, whole, 40);
}

double normal_cdf(double x) {
    const auto density = [](double t) {
        return std::exp(-0.5 * t * t) / 2.5066282746310005024;
    };
    if (x < -12.0) return 0.0;
    if (x > 12.0) return 1.0;
    if (x >= 0.0) return 0.5 + integrate(density, 0.0, x);
    return 0.5 - integrate(density, x, 0.0);
}

double chi2_cdf(double nu, double x) {
    if (x <= 0.0) return 0.0;
    const double half = 0.5 * nu;
    const double lognorm = half * std::log(2.0) + std::lgamma(half);
    if (nu < 2.0) {
        // substitute t = u^2 to remove the endpoint singularity (nu >= 1)
        const auto g = [&](double u) {
            return 2.0 * std::pow(u, nu - 1.0) * std::exp(-0.5 * u * u - lognorm);
        };
        return integrate(g, 0.0, std::sqrt(x));
    }
    const auto density = [&](double t) {
        if (t <= 0.0) return nu == 2.0 ? std::exp(-lognorm) : 0.0;
        return std::exp((half - 1.0) * std::log(t) - 0.5 * t - lognorm);
    };
    // split near the mode to keep the adaptive rule comfortable
    const double mid = std::min(x, std::max(1e-8, nu - 2.0));
    return integrate(density, 0.0, mid) + integrate(density, mid, x);
}

namespace {

double invert(const std::function<double(double)>& cdf, double q, double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (lo + hi);
        (cdf(m) < q ? lo : hi) = m;
        if (hi - lo < 1e-12) break;
    }
    return 0.5 * (lo + hi);
}

} // namespace

double normal_quantile(double q) {
    return invert([](double x) { return normal_cdf(x); }, q, -12.0, 12.0);
}

double chi2_quantile(double nu, double q) {
    double hi = nu + 20.0 * std::sqrt(2.0 * nu) + 60.0;
    while (chi2_cdf(nu, hi) < q) hi *= 2.0;
    return invert([nu](double x) { return chi2_cdf(nu, x); }, q, 0.0, hi);
}

namespace {

double golden_min(const std::function<double(double)>& f, double a, double b) {
    const double gr = 0.6180339887498949;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < 200 && (b - a) > 1e-14; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

multinet::Vector sqrt_lasso_cd(const multinet::Matrix& X, const multinet::Vector& y,
                               double lambda, int n0) {
    const int g = static_cast<int>(X.cols());
    const double sqrt_n0 = std::sqrt(static_cast<double>(n0));
    multinet::Vector beta = multinet::Vector::Zero(g);
    multinet::Vector resid = y;

    for (int sweep = 0; sweep < 20000; ++sweep) {
        double max_change = 0.0;
        for (int j = 0; j < g; ++j) {
            const multinet::Vector base = resid + X.col(j) * beta(j);
            const auto coord_obj = [&](double b) {
                return (base - X.col(j) * b).norm() / sqrt_n0 + lambda * std::abs(b);
            };
            const double span = std::abs(beta(j)) +
                                std::abs(X.col(j).dot(base)) / X.col(j).squaredNorm() + 1.0;
            double next = golden_min(coord_obj, beta(j) - span, beta(j) + span);
            // snap to the kink when it is at least as good
            if (coord_obj(0.0) <= coord_obj(next)) next = 0.0;
            max_change = std::max(max_change, std::abs(next - beta(j)));
            resid = base - X.col(j) * next;
            beta(j) = next;
        }
        if (max_change < 1e-12) break;
    }
    return beta;
}

double best_random_objective(const multinet::hgsl::Problem& problem, double lambda,
                             const std::vector<double>& center, double radius, int count,
                             std::uint64_t seed) {
    multinet::Rng rng(seed);
    double best = multinet::hgsl::objective(problem, lambda, center);
    std::vector<double> cand(center.size());
    for (int i = 0; i < count; ++i) {
        for (size_t j = 0; j < cand.size(); ++j)
            cand[j] = center[j] + radius * (2.0 * rng.uniform01() - 1.0);
        best = std::min(best, multinet::hgsl::objective(problem, lambda, cand));
    }
    return best;
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::max(f - static_cast<double>(i) / n,
                                 static_cast<double>(i + 1) / n - f));
    }
    return d;
}

} // namespace oracles
