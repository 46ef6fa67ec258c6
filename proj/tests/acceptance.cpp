// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Quantitative criteria replicate the reference simulation tables at
// desk scale (50 replications); property criteria exercise the solver and the
// distribution machinery directly.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "multinet/evalkit.hpp"
#include "multinet/hgsl.hpp"
#include "multinet/inference.hpp"
#include "multinet/nodewise.hpp"
#include "multinet/pipeline.hpp"
#include "multinet/rng.hpp"
#include "multinet/simgen.hpp"
#include "multinet/special.hpp"
#include "oracles.hpp"

using namespace multinet;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& what) {
    std::printf("[%s] criterion %2d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
    if (!ok) ++failures;
    std::fflush(stdout);
}

std::string fmt(const char* pattern, double a, double b = 0, double c = 0, double d = 0,
                double e = 0) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c, d, e);
    return buf;
}

constexpr std::uint64_t kSeed = 20240501;
constexpr int kReps = 50;

double mean_of(const pipeline::ReplicateResult& r, const std::string& key) {
    return r.summary.at(key).mean;
}

pipeline::ReplicateResult run_table(int table, int setting,
                                    std::optional<simgen::Noise> noise = std::nullopt) {
    pipeline::ReplicateOptions opts;
    opts.reps = kReps;
    opts.seed = kSeed;
    opts.alpha = 0.05;
    opts.noise_override = noise;
    opts.lambda_config.delta = 1.0;
    opts.lambda_config.xi = std::numeric_limits<double>::infinity();
    opts.lambda_config.reps = 10000;
    opts.lambda_config.seed = 7;
    return pipeline::replicate(table, setting, opts);
}

// ---- criteria 1-6: table replications ----

void criterion_1_and_beyond() {
    const auto t1s1 = run_table(1, 1); // Model I, k=5, p=48, n=100
    {
        const double fpr1 = mean_of(t1s1, "phi1.fpr_theoretical");
        const double fnr1 = mean_of(t1s1, "phi1.fnr_theoretical");
        const double roc1 = mean_of(t1s1, "phi1.roc_area");
        const double fnr2 = mean_of(t1s1, "phi2.fnr_theoretical");
        const double roc2 = mean_of(t1s1, "phi2.roc_area");
        const bool ok = fpr1 >= 0.030 && fpr1 <= 0.070 && fnr1 <= 0.02 && roc1 >= 0.995 &&
                        fnr2 <= 0.08 && roc2 >= 0.985;
        report(1, ok,
               fmt("table 1 setting 1: phi1 fpr=%.4f (in [0.030,0.070]) fnr=%.4f (<=0.02) "
                   "roc=%.4f (>=0.995); phi2 fnr=%.4f (<=0.08) roc=%.4f (>=0.985)",
                   fpr1, fnr1, roc1, fnr2, roc2));
    }

    const auto t1s2 = run_table(1, 2); // Model I, k=10, p=48, n=100
    {
        const auto& fnr_series = t1s2.raw.at("phi1.fnr_theoretical");
        int zero_reps = 0;
        for (double v : fnr_series) zero_reps += (v == 0.0) ? 1 : 0;
        const double roc2 = mean_of(t1s2, "phi2.roc_area");
        const bool ok = zero_reps >= 45 && roc2 >= 0.999;
        report(2, ok,
               fmt("table 1 setting 2: phi1 fnr==0 in %.0f/50 reps (>=45); phi2 roc=%.5f "
                   "(>=0.999)",
                   static_cast<double>(zero_reps), roc2));
    }

    const auto t2s1 = run_table(2, 1); // Model II, k=5, p=48, n=200
    {
        const double fnr2 = mean_of(t2s1, "phi2.fnr_theoretical");
        const double fnr1 = mean_of(t2s1, "phi1.fnr_theoretical");
        const auto& f2 = t2s1.raw.at("phi2.fnr_theoretical");
        const auto& f1 = t2s1.raw.at("phi1.fnr_theoretical");
        int ordered = 0;
        for (size_t i = 0; i < f1.size(); ++i) ordered += (f2[i] < f1[i]) ? 1 : 0;
        const bool ok = fnr2 >= 0.02 && fnr2 <= 0.12 && fnr1 >= 0.12 && fnr1 <= 0.34 &&
                        ordered >= 45;
        report(3, ok,
               fmt("table 2 setting 1: phi2 fnr=%.4f (in [0.02,0.12]); phi1 fnr=%.4f (in "
                   "[0.12,0.34]); phi2<phi1 in %.0f/50 reps (>=45)",
                   fnr2, fnr1, static_cast<double>(ordered)));
    }

    {
        // criterion 4: empirical vs theoretical critical values nearly coincide
        double worst = 0.0;
        for (const auto* run : {&t1s1, &t1s2, &t2s1})
            for (const char* m : {"phi1", "phi2"}) {
                const double gap = std::abs(mean_of(*run, std::string(m) + ".fnr_empirical") -
                                            mean_of(*run, std::string(m) + ".fnr_theoretical"));
                worst = std::max(worst, gap);
            }
        report(4, worst <= 0.02,
               fmt("empirical-vs-theoretical FNR gap across all runs and methods: max %.4f "
                   "(<=0.02)",
                   worst));
    }

    {
        // criterion 5: Model I setting 1 estimation with tuned alpha
        const auto t3s1 = run_table(3, 1);
        const double l1 = mean_of(t3s1, "phi1.l1_mean");
        const double l2 = mean_of(t3s1, "phi1.l2_mean");
        const double lF = mean_of(t3s1, "phi1.lF_mean");
        const auto inband = [](double v, double target) {
            return v >= 0.8 * target && v <= 1.2 * target;
        };
        const bool ok = inband(l1, 4.968) && inband(l2, 3.417) && inband(lF, 6.657);
        report(5, ok,
               fmt("table 3 setting 1 (tuned alpha, phi1): l1=%.3f (4.968 +-20%%), l2=%.3f "
                   "(3.417 +-20%%), lF=%.3f (6.657 +-20%%)",
                   l1, l2, lF));
    }

    {
        // criterion 6: Laplace robustness of the setting-1 metrics
        const auto lap = run_table(1, 1, simgen::Noise::laplace);
        double worst = 0.0;
        for (const char* key : {"phi1.fpr_theoretical", "phi1.fnr_theoretical", "phi1.roc_area",
                                "phi2.fnr_theoretical", "phi2.roc_area"})
            worst = std::max(worst, std::abs(mean_of(lap, key) - mean_of(t1s1, key)));
        report(6, worst <= 0.02,
               fmt("laplace rerun of criterion 1: max metric shift %.4f (<=0.02)", worst));
    }
}

// ---- criteria 7-9: solver properties ----

hgsl::Problem random_problem(int k, int G, int n, Rng& rng, double spread = 2.0) {
    hgsl::Problem prob;
    prob.k = k;
    prob.G = G;
    for (int t = 0; t < k; ++t) {
        Matrix X(n, G);
        for (int l = 0; l < G; ++l) {
            const double scale = 1.0 + (spread - 1.0) * rng.uniform01();
            for (int i = 0; i < n; ++i) X(i, l) = scale * rng.normal();
        }
        Vector y(n);
        for (int i = 0; i < n; ++i) y[i] = rng.normal();
        // plant a weak signal in the first group half the time
        if (rng.uniform01() < 0.5) y += X.col(0) * 0.8;
        prob.Xd.push_back(std::move(X));
        prob.y.push_back(std::move(y));
    }
    return prob;
}

void criterion_7_and_8() {
    Rng rng(4242);
    int descent_bad = 0, kkt_bad = 0, solved = 0, converged = 0;
    const int ks[] = {1, 2, 5};
    const int Gs[] = {1, 5, 20};
    const int ns[] = {10, 50};
    for (int inst = 0; inst < 200; ++inst) {
        const int k = ks[inst % 3];
        const int G = Gs[(inst / 3) % 3];
        const int n = ns[(inst / 9) % 2];
        auto prob = random_problem(k, G, n, rng);
        const auto sprob = hgsl::scaled_problem(prob, hgsl::scaling_matrix(prob));
        const double g0 =
            hgsl::kkt_residual(sprob, 0.0, std::vector<double>(static_cast<size_t>(G) * k, 0.0));
        double lam = (0.3 + 0.9 * rng.uniform01()) * g0;
        // overparameterized draws can land below the interpolation threshold,
        // which is a documented error state; raise lambda until solvable
        for (int attempt = 0; attempt < 8; ++attempt) {
            try {
                const auto sol = hgsl::solve(prob, lam);
                ++solved;
                for (size_t i = 1; i < sol.objective_trace.size(); ++i)
                    if (sol.objective_trace[i] > sol.objective_trace[i - 1] + 1e-12) {
                        ++descent_bad;
                        break;
                    }
                if (sol.converged) {
                    ++converged;
                    if (hgsl::kkt_residual(sprob, lam, sol.beta_scaled) > 1e-6) ++kkt_bad;
                }
                break;
            } catch (const NumericalError&) {
                lam *= 1.6;
                if (attempt == 7) ++descent_bad;
            }
        }
    }
    report(7, descent_bad == 0 && solved == 200,
           fmt("solver descent: %.0f/200 instances with a non-increasing trace (slack 1e-12)",
               static_cast<double>(200 - descent_bad)));

    // tiny-instance global optimality sweep
    int opt_bad = 0;
    Rng rng2(777);
    for (int inst = 0; inst < 20; ++inst) {
        const int k = 1 + (inst % 2);
        const int G = 1 + (inst % 3);
        auto prob = random_problem(k, G, 12, rng2);
        const auto sprob = hgsl::scaled_problem(prob, hgsl::scaling_matrix(prob));
        const double g0 =
            hgsl::kkt_residual(sprob, 0.0, std::vector<double>(static_cast<size_t>(G) * k, 0.0));
        const double lam = 0.6 * g0;
        hgsl::SolveOptions opts;
        opts.tol = 1e-10;
        const auto sol = hgsl::solve(prob, lam, opts);
        const double f_hat = hgsl::objective(sprob, lam, sol.beta_scaled);
        double best = oracles::best_random_objective(sprob, lam, sol.beta_scaled, 0.05, 50000,
                                                     9000 + inst);
        best = std::min(best, oracles::best_random_objective(sprob, lam, sol.beta_scaled, 0.5,
                                                             30000, 9100 + inst));
        best = std::min(best, oracles::best_random_objective(sprob, lam, sol.beta_scaled, 3.0,
                                                             20000, 9200 + inst));
        if (f_hat > best + 1e-8) ++opt_bad;
    }
    report(8, kkt_bad == 0 && opt_bad == 0 && converged > 0,
           fmt("global optimality: kkt<=1e-6 at %.0f/%.0f converged solutions; solution beats "
               "1e5 candidates on %.0f/20 tiny instances",
               static_cast<double>(converged - kkt_bad), static_cast<double>(converged),
               static_cast<double>(20 - opt_bad)));
}

void criterion_9() {
    Rng rng(31337);
    double worst_scale = 0.0, worst_k0 = 0.0, worst_cd = 0.0;
    for (int inst = 0; inst < 5; ++inst) {
        auto prob = random_problem(2, 4, 30, rng, 4.0);
        const double lam = 0.2 + 0.1 * inst;
        hgsl::SolveOptions opts;
        opts.tol = 1e-11;
        const auto sol = hgsl::solve(prob, lam, opts);

        const auto sprob = hgsl::scaled_problem(prob, hgsl::scaling_matrix(prob));
        const auto sol_std = hgsl::solve(sprob, lam, opts);
        for (size_t i = 0; i < sol.beta_scaled.size(); ++i)
            worst_scale = std::max(worst_scale,
                                   std::abs(sol.beta_scaled[i] - sol_std.beta_scaled[i]));

        hgsl::SolveOptions big = opts;
        big.k0_multiplier = 5.0;
        const auto sol_big = hgsl::solve(prob, lam, big);
        for (size_t i = 0; i < sol.beta.size(); ++i)
            worst_k0 = std::max(worst_k0, std::abs(sol.beta[i] - sol_big.beta[i]));
    }
    for (int inst = 0; inst < 5; ++inst) {
        auto prob = random_problem(1, 3, 20, rng, 2.0);
        const double lam = 0.15 + 0.05 * inst;
        hgsl::SolveOptions opts;
        opts.tol = 1e-11;
        const auto sol = hgsl::solve(prob, lam, opts);
        const auto sprob = hgsl::scaled_problem(prob, hgsl::scaling_matrix(prob));
        const Vector ref = oracles::sqrt_lasso_cd(sprob.Xd[0], sprob.y[0], lam, 20);
        for (int l = 0; l < 3; ++l)
            worst_cd = std::max(worst_cd, std::abs(sol.beta_scaled[l] - ref(l)));
    }
    report(9, worst_scale <= 1e-6 && worst_k0 <= 1e-6 && worst_cd <= 1e-6,
           fmt("invariances: column-standardization gap %.2e, K0 gap %.2e, k=1 "
               "coordinate-descent gap %.2e (all <=1e-6)",
               worst_scale, worst_k0, worst_cd));
}

// ---- criterion 10: null calibration with oracle residuals ----

nodewise::NodewiseFit oracle_fit(int j, std::vector<Vector> residuals) {
    nodewise::NodewiseFit fit;
    fit.j = j;
    for (auto& r : residuals) {
        fit.n.push_back(static_cast<int>(r.size()));
        fit.C_hat.push_back(Vector::Zero(1));
        fit.C_raw.push_back(Vector::Zero(1));
        fit.omega_jj.push_back(r.size() / r.squaredNorm());
        fit.residuals.push_back(std::move(r));
    }
    return fit;
}

void criterion_10() {
    bool ok = true;
    std::string detail = "U^2 from oracle residuals vs chi-square(k), KS at 1%:";
    for (int k : {2, 5}) {
        Rng rng(55000 + k);
        const int n = 400, pairs = 2000;
        std::vector<double> usq(pairs);
        for (int rep = 0; rep < pairs; ++rep) {
            std::vector<Vector> ra(k), rb(k);
            for (int t = 0; t < k; ++t) {
                ra[t].resize(n);
                rb[t].resize(n);
                for (int i = 0; i < n; ++i) {
                    ra[t][i] = rng.normal();
                    rb[t][i] = rng.normal();
                }
            }
            std::vector<nodewise::NodewiseFit> fits;
            fits.push_back(oracle_fit(0, std::move(ra)));
            fits.push_back(oracle_fit(1, std::move(rb)));
            const double u = inference::u_statistic(fits, 0, 1);
            usq[rep] = u * u;
        }
        const double d =
            oracles::ks_statistic(usq, [k](double x) { return chi2_cdf(k, x); });
        const double crit = 1.6276 / std::sqrt(static_cast<double>(pairs));
        ok = ok && d < crit;
        detail += fmt(" k=%.0f D=%.4f (crit %.4f);", k, d, crit);
    }
    report(10, ok, detail);
}

// ---- criterion 11: quantile oracles ----

void criterion_11() {
    double worst_chi = 0.0, worst_norm = 0.0;
    for (int k : {1, 2, 5, 10, 50})
        for (double q : {0.5, 0.9, 0.95, 0.99, 1.0 - 1e-6}) {
            const double ours = chi_quantile(k, q);
            const double ref = oracles::chi2_quantile(k, q);
            worst_chi = std::max(worst_chi, std::abs(ours * ours - ref));
        }
    for (double q : {0.001, 0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99, 0.999})
        worst_norm = std::max(worst_norm,
                              std::abs(normal_quantile(q) - oracles::normal_quantile(q)));
    report(11, worst_chi <= 1e-7 && worst_norm <= 1e-7,
           fmt("quantile oracles: chi-square gap %.2e, normal gap %.2e (both <=1e-7)", worst_chi,
               worst_norm));
}

} // namespace

int main() {
    std::printf("acceptance suite: %d replications per table criterion, seed %llu\n", kReps,
                static_cast<unsigned long long>(kSeed));
    criterion_1_and_beyond();
    criterion_7_and_8();
    criterion_9();
    criterion_10();
    criterion_11();
    std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "SUCCESS" : "FAILURE", failures);
    return failures == 0 ? 0 : 1;
}
