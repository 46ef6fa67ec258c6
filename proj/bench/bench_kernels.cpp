// Wall-clock comparison of the OpenMP kernels against their serial references:
// node-wise fitting, the all-pairs scoring sweep, and the Monte Carlo penalty
// rule. Also reports how node-wise fitting scales with the node count.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "multinet/evalkit.hpp"
#include "multinet/hgsl.hpp"
#include "multinet/nodewise.hpp"
#include "multinet/pipeline.hpp"
#include "multinet/simgen.hpp"

using namespace multinet;
using clk = std::chrono::steady_clock;

namespace {

double seconds(clk::time_point a, clk::time_point b) {
    return std::chrono::duration_cast<std::chrono::duration<double>>(b - a).count();
}

template <typename F>
double timed(F&& f) {
    const auto t0 = clk::now();
    f();
    return seconds(t0, clk::now());
}

MultiNetworkSample make_data(int k, int p, int n, std::uint64_t seed) {
    simgen::SimConfig cfg;
    cfg.k = k;
    cfg.p = p;
    cfg.n_per_class = n;
    cfg.seed = seed;
    const auto truth = simgen::generate(cfg);
    return simgen::sample_from(truth, std::vector<int>(k, n), simgen::Noise::gaussian, seed + 1);
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("openmp: not enabled\n");
#endif

    const int k = 5, n = 100;
    const auto sample = make_data(k, 48, n, 7);
    const double lambda =
        hgsl::lambda_simulated(std::vector<int>(k, n), 48, k, hgsl::LambdaConfig{});

    std::printf("%-28s %10s %10s %8s\n", "kernel", "serial(s)", "omp(s)", "speedup");

    std::vector<nodewise::NodewiseFit> fits_serial, fits_par;
    const double t_fit_s =
        timed([&] { fits_serial = nodewise::fit_all_nodes_serial(sample, lambda); });
    const double t_fit_p = timed([&] { fits_par = nodewise::fit_all_nodes(sample, lambda); });
    std::printf("%-28s %10.3f %10.3f %8.2f\n", "fit_all_nodes (k=5,p=48)", t_fit_s, t_fit_p,
                t_fit_s / t_fit_p);

    const auto truth_edges = true_edge_set(
        simgen::generate([] {
            simgen::SimConfig c;
            c.k = 5;
            c.p = 48;
            c.n_per_class = 100;
            c.seed = 7;
            return c;
        }()),
        0.0);
    inference::TestConfig cfg;
    cfg.kind = inference::TestKind::chi;
    evalkit::PairScorePanel panel_s, panel_p;
    const double t_sweep_s =
        timed([&] { panel_s = evalkit::build_panel_serial(fits_par, truth_edges, cfg); });
    const double t_sweep_p =
        timed([&] { panel_p = evalkit::build_panel(fits_par, truth_edges, cfg); });
    std::printf("%-28s %10.3f %10.3f %8.2f\n", "pair sweep (1128 pairs)", t_sweep_s, t_sweep_p,
                t_sweep_s / t_sweep_p);

    hgsl::LambdaConfig lc;
    lc.reps = 10000;
    double lam_s = 0, lam_p = 0;
    const double t_lam_s =
        timed([&] { lam_s = hgsl::lambda_simulated_serial(std::vector<int>(k, n), 48, k, lc); });
    const double t_lam_p =
        timed([&] { lam_p = hgsl::lambda_simulated(std::vector<int>(k, n), 48, k, lc); });
    std::printf("%-28s %10.3f %10.3f %8.2f\n", "lambda_simulated (1e4 reps)", t_lam_s, t_lam_p,
                t_lam_s / t_lam_p);

    // consistency: the parallel kernels must reproduce the serial results exactly
    bool same = lam_s == lam_p && panel_s.scores == panel_p.scores;
    for (size_t j = 0; j < fits_serial.size() && same; ++j)
        for (int t = 0; t < k && same; ++t)
            same = fits_serial[j].C_hat[t] == fits_par[j].C_hat[t];
    std::printf("serial/parallel agreement: %s\n", same ? "exact" : "MISMATCH");

    // node-count scaling of the fitting stage
    std::printf("\nfit_all_nodes scaling (k=2, n=100):\n%8s %12s %12s\n", "p", "time(s)",
                "time/p(ms)");
    for (int p : {16, 32, 64}) {
        const auto s = make_data(2, p, 100, 11);
        const double lam = hgsl::lambda_simulated(std::vector<int>(2, 100), p, 2, lc);
        const double t = timed([&] { nodewise::fit_all_nodes(s, lam); });
        std::printf("%8d %12.3f %12.3f\n", p, t, 1000.0 * t / p);
    }
    return same ? 0 : 1;
}
