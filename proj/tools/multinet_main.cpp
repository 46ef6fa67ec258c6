// Command-line front end: simulate, fit, test, estimate, tune-alpha, evaluate,
// replicate. Exit codes: 0 success, 2 validation error, 3 numerical failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "multinet/evalkit.hpp"
#include "multinet/io.hpp"
#include "multinet/pipeline.hpp"
#include "multinet/rng.hpp"
#include "multinet/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace multinet;

namespace {

double parse_xi(const std::string& s) {
    if (s == "inf" || s == "infinity" || s == "Inf") return std::numeric_limits<double>::infinity();
    try {
        return std::stod(s);
    } catch (...) {
        throw ValidationError("cannot parse --xi value '" + s + "'");
    }
}

simgen::Model parse_model(const std::string& s) {
    if (s == "I" || s == "1" || s == "i") return simgen::Model::I;
    if (s == "II" || s == "2" || s == "ii") return simgen::Model::II;
    throw ValidationError("--model must be I or II");
}

simgen::Noise parse_noise(const std::string& s) {
    if (s == "gaussian") return simgen::Noise::gaussian;
    if (s == "laplace") return simgen::Noise::laplace;
    throw ValidationError("--noise must be gaussian or laplace");
}

inference::TestKind parse_kind(const std::string& s) {
    if (s == "chi") return inference::TestKind::chi;
    if (s == "linfun") return inference::TestKind::linfun;
    throw ValidationError("--kind must be chi or linfun");
}

inference::Sidedness parse_sided(const std::string& s) {
    if (s == "one") return inference::Sidedness::one;
    if (s == "two") return inference::Sidedness::two;
    throw ValidationError("--sided must be one or two");
}

std::vector<int> parse_signs(const std::string& s, int k) {
    std::vector<int> out;
    for (char c : s) {
        if (c == '+')
            out.push_back(1);
        else if (c == '-')
            out.push_back(-1);
        else
            throw ValidationError("--signs must be a string of + and -");
    }
    if (out.empty()) out.assign(k, 1);
    if (static_cast<int>(out.size()) != k)
        throw ValidationError("--signs length must equal the class count");
    return out;
}

std::vector<double> parse_grid(const std::string& s) {
    std::vector<double> g;
    std::string cur;
    for (char c : s + ",") {
        if (c == ',') {
            if (!cur.empty()) g.push_back(std::stod(cur));
            cur.clear();
        } else
            cur += c;
    }
    return g;
}

std::vector<fs::path> to_paths(const std::vector<std::string>& v) {
    return {v.begin(), v.end()};
}

/// Records command, configuration, seed and every file written; saved next to
/// the outputs so a run can be reproduced exactly.
struct Manifest {
    json doc;
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    Manifest(const std::string& command, int argc, char** argv) {
        doc["command"] = command;
        doc["argv"] = json::array();
        for (int i = 0; i < argc; ++i) doc["argv"].push_back(argv[i]);
        doc["version"] = multinet::version;
    }
    void add_output(const fs::path& p) { outputs.push_back(p.string()); }
    void config(const json& cfg) { doc["config"] = cfg; }
    void seed(std::uint64_t s) { doc["seed"] = s; }
    void save(const fs::path& path) {
        add_output(path);
        doc["outputs"] = outputs;
        const auto dt = std::chrono::steady_clock::now() - start;
        doc["timings"]["total_sec"] =
            std::chrono::duration_cast<std::chrono::duration<double>>(dt).count();
        std::ofstream f(path);
        if (!f) throw ValidationError("cannot open for writing: " + path.string());
        f << doc.dump(1) << "\n";
    }
};

struct LambdaFlags {
    std::string rule = "sim";
    double delta = 1.0;
    std::string xi = "inf";
    int reps = 10000;
    double override_value = -1.0;

    hgsl::LambdaConfig config(std::uint64_t seed) const {
        hgsl::LambdaConfig c;
        c.delta = delta;
        c.xi = parse_xi(xi);
        c.reps = reps;
        c.seed = derive_seed(seed, 0x4cfa);
        return c;
    }
    pipeline::LambdaRule parsed_rule() const {
        if (rule == "sim") return pipeline::LambdaRule::sim;
        if (rule == "theory") return pipeline::LambdaRule::theory;
        throw ValidationError("--lambda-rule must be sim or theory");
    }
    double resolve(const MultiNetworkSample& sample, std::uint64_t seed) const {
        if (override_value > 0.0) return override_value;
        if (parsed_rule() == pipeline::LambdaRule::theory)
            return hgsl::lambda_theoretical(sample.n_min(), sample.p, sample.k, config(seed));
        return hgsl::lambda_simulated(sample.n, sample.p, sample.k, config(seed));
    }
};

void add_lambda_flags(CLI::App* cmd, LambdaFlags& lf) {
    cmd->add_option("--lambda-rule", lf.rule, "penalty rule: sim or theory")
        ->check(CLI::IsMember({"sim", "theory"}));
    cmd->add_option("--delta", lf.delta, "quantile exponent of the penalty rules");
    cmd->add_option("--xi", lf.xi, "prefactor tuning scalar (> 1, or inf)");
    cmd->add_option("--lambda-reps", lf.reps, "Monte Carlo replications of the sim rule");
    cmd->add_option("--lambda", lf.override_value, "explicit penalty level (overrides the rule)");
}

int run(int argc, char** argv) {
    CLI::App app{"joint estimation and testing for multiple Gaussian graphical models"};
    app.require_subcommand(1);

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "generate truth matrices and samples");
    struct {
        std::string model = "I", noise = "gaussian", out = "sim_out";
        int k = 5, p = 48, n = 100, block = 8;
        std::uint64_t seed = 0;
        bool diag_remainder = false;
    } sim_args;
    sim->add_option("--model", sim_args.model, "I or II");
    sim->add_option("--k", sim_args.k, "number of networks");
    sim->add_option("--p", sim_args.p, "number of nodes");
    sim->add_option("--n", sim_args.n, "sample size per class");
    sim->add_option("--block", sim_args.block, "diagonal block size");
    sim->add_option("--noise", sim_args.noise, "gaussian or laplace");
    sim->add_option("--seed", sim_args.seed, "RNG seed");
    sim->add_flag("--diag-remainder", sim_args.diag_remainder,
                  "allow a trailing edge-free block when p is not a multiple of the block size");
    sim->add_option("--out", sim_args.out, "output directory")->required();

    // ---- fit ----
    auto* fit = app.add_subcommand("fit", "node-wise fits for a sample");
    struct {
        std::vector<std::string> sample;
        std::string out = "fits.json";
        std::uint64_t seed = 0;
        bool center = false, no_refit = false;
    } fit_args;
    LambdaFlags fit_lambda;
    fit->add_option("--sample", fit_args.sample, "one CSV per class")->required()->expected(-1);
    fit->add_option("--seed", fit_args.seed, "RNG seed for the sim penalty rule");
    fit->add_flag("--center", fit_args.center, "center columns before fitting");
    fit->add_flag("--no-refit", fit_args.no_refit, "use raw penalized coefficients for residuals");
    add_lambda_flags(fit, fit_lambda);
    fit->add_option("--out", fit_args.out, "fits JSON path")->required();

    // ---- test ----
    auto* test = app.add_subcommand("test", "all-pairs link tests from saved fits");
    struct {
        std::vector<std::string> sample;
        std::string fits, out = "results.csv", kind = "chi", signs, sided = "one";
        double alpha = 0.05, rho = 1.0;
        bool center = false, recover = false;
    } test_args;
    test->add_option("--sample", test_args.sample, "one CSV per class")->required()->expected(-1);
    test->add_option("--fits", test_args.fits, "fits JSON from 'fit'")->required();
    test->add_option("--kind", test_args.kind, "chi or linfun");
    test->add_option("--signs", test_args.signs, "sign vector, e.g. ++-");
    test->add_option("--sided", test_args.sided, "one or two (linfun)");
    test->add_option("--alpha", test_args.alpha, "significance level");
    test->add_flag("--center", test_args.center, "center columns (must match the fit)");
    test->add_flag("--recover", test_args.recover, "also write the recovered edge set");
    test->add_option("--rho", test_args.rho, "support recovery exponent");
    test->add_option("--out", test_args.out, "results CSV path")->required();

    // ---- estimate ----
    auto* est = app.add_subcommand("estimate", "two-step precision matrix estimate");
    struct {
        std::vector<std::string> sample;
        std::string fits, out = "precision.json", kind = "chi", signs, sided = "one";
        double alpha = 0.05;
        bool center = false;
    } est_args;
    est->add_option("--sample", est_args.sample, "one CSV per class")->required()->expected(-1);
    est->add_option("--fits", est_args.fits, "fits JSON from 'fit'")->required();
    est->add_option("--kind", est_args.kind, "chi or linfun");
    est->add_option("--signs", est_args.signs, "sign vector (linfun)");
    est->add_option("--sided", est_args.sided, "one or two (linfun)");
    est->add_option("--alpha", est_args.alpha, "significance level");
    est->add_flag("--center", est_args.center, "center columns (must match the fit)");
    est->add_option("--out", est_args.out, "precision JSON path")->required();

    // ---- tune-alpha ----
    auto* tune = app.add_subcommand("tune-alpha", "pick alpha on a validation sample");
    struct {
        std::vector<std::string> train, validation;
        std::string out = "tune.json", kind = "chi", signs, sided = "one", grid;
        std::uint64_t seed = 0;
        bool center = false;
    } tune_args;
    LambdaFlags tune_lambda;
    tune->add_option("--train", tune_args.train, "training CSVs")->required()->expected(-1);
    tune->add_option("--validation", tune_args.validation, "validation CSVs")->required()->expected(-1);
    tune->add_option("--grid", tune_args.grid, "comma-separated alpha grid");
    tune->add_option("--kind", tune_args.kind, "chi or linfun");
    tune->add_option("--signs", tune_args.signs, "sign vector (linfun)");
    tune->add_option("--sided", tune_args.sided, "one or two (linfun)");
    tune->add_option("--seed", tune_args.seed, "RNG seed for the sim penalty rule");
    tune->add_flag("--center", tune_args.center, "center columns");
    add_lambda_flags(tune, tune_lambda);
    tune->add_option("--out", tune_args.out, "result JSON path")->required();

    // ---- evaluate ----
    auto* eval = app.add_subcommand("evaluate", "score fits/estimates against a known truth");
    struct {
        std::vector<std::string> sample;
        std::string truth, fits, estimate, out = "metrics.csv", kind = "chi", signs, sided = "one";
        double alpha = 0.05;
        bool center = false;
    } eval_args;
    eval->add_option("--truth", eval_args.truth, "truth precision JSON")->required();
    eval->add_option("--sample", eval_args.sample, "CSVs (with --fits)")->expected(-1);
    eval->add_option("--fits", eval_args.fits, "fits JSON: emit fpr/fnr/roc");
    eval->add_option("--est", eval_args.estimate, "precision JSON: emit matrix losses");
    eval->add_option("--kind", eval_args.kind, "chi or linfun");
    eval->add_option("--signs", eval_args.signs, "sign vector (linfun)");
    eval->add_option("--sided", eval_args.sided, "one or two (linfun)");
    eval->add_option("--alpha", eval_args.alpha, "significance level");
    eval->add_flag("--center", eval_args.center, "center columns");
    eval->add_option("--out", eval_args.out, "metrics CSV path")->required();

    // ---- replicate ----
    auto* repl = app.add_subcommand("replicate", "full simulation table replication");
    struct {
        int table = 1, setting = 1, reps = 50;
        std::uint64_t seed = 0;
        double alpha = 0.05;
        std::string noise, out = "metrics.csv", grid;
        bool quiet = false;
    } repl_args;
    LambdaFlags repl_lambda;
    repl->add_option("--table", repl_args.table, "1..4")->required();
    repl->add_option("--setting", repl_args.setting, "1..3");
    repl->add_option("--reps", repl_args.reps, "replications");
    repl->add_option("--seed", repl_args.seed, "RNG seed");
    repl->add_option("--alpha", repl_args.alpha, "significance level for testing tables");
    repl->add_option("--noise", repl_args.noise, "override: gaussian or laplace");
    repl->add_option("--grid", repl_args.grid, "alpha grid for estimation tables");
    repl->add_flag("--quiet", repl_args.quiet, "suppress progress output");
    add_lambda_flags(repl, repl_lambda);
    repl->add_option("--out", repl_args.out, "metrics CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (sim->parsed()) {
        Manifest manifest("simulate", argc, argv);
        simgen::SimConfig cfg;
        cfg.model = parse_model(sim_args.model);
        cfg.noise = parse_noise(sim_args.noise);
        cfg.k = sim_args.k;
        cfg.p = sim_args.p;
        cfg.n_per_class = sim_args.n;
        cfg.block_size = sim_args.block;
        cfg.seed = sim_args.seed;
        cfg.diag_remainder = sim_args.diag_remainder;
        manifest.seed(cfg.seed);
        manifest.config({{"model", sim_args.model},
                         {"k", cfg.k},
                         {"p", cfg.p},
                         {"n", cfg.n_per_class},
                         {"block", cfg.block_size},
                         {"noise", sim_args.noise},
                         {"diag_remainder", cfg.diag_remainder}});
        int resamples = 0;
        const auto truth = simgen::generate(cfg, &resamples);
        const auto sample = simgen::sample_from(truth, std::vector<int>(cfg.k, cfg.n_per_class),
                                                cfg.noise, derive_seed(cfg.seed, 0x5821));
        const fs::path dir = sim_args.out;
        fs::create_directories(dir);
        io::save_precision_set(truth, dir / "truth.json");
        manifest.add_output(dir / "truth.json");
        for (const auto& p : io::save_sample(sample, dir)) manifest.add_output(p);
        manifest.doc["block_resamples"] = resamples;
        manifest.save(dir / "manifest.json");
        std::cout << "wrote " << dir.string() << " (k=" << cfg.k << ", p=" << cfg.p << ")\n";
    }

    if (fit->parsed()) {
        Manifest manifest("fit", argc, argv);
        const auto sample = io::load_sample(to_paths(fit_args.sample), fit_args.center);
        const double lambda = fit_lambda.resolve(sample, fit_args.seed);
        nodewise::FitOptions opts;
        opts.use_refit = !fit_args.no_refit;
        const auto fits = nodewise::fit_all_nodes(sample, lambda, opts);
        io::save_fits(fits, lambda, fit_args.out);
        manifest.seed(fit_args.seed);
        manifest.config({{"lambda", lambda},
                         {"lambda_rule", fit_lambda.rule},
                         {"delta", fit_lambda.delta},
                         {"xi", fit_lambda.xi},
                         {"refit", !fit_args.no_refit},
                         {"center", fit_args.center}});
        manifest.add_output(fit_args.out);
        int not_converged = 0;
        for (const auto& f : fits) not_converged += f.converged ? 0 : 1;
        manifest.doc["nodes_not_converged"] = not_converged;
        manifest.save(fs::path(fit_args.out).replace_extension(".manifest.json"));
        std::cout << "lambda = " << lambda << ", fits written to " << fit_args.out << "\n";
    }

    if (test->parsed()) {
        Manifest manifest("test", argc, argv);
        const auto sample = io::load_sample(to_paths(test_args.sample), test_args.center);
        const auto fits = io::load_fits(test_args.fits, sample);
        inference::TestConfig cfg;
        cfg.kind = parse_kind(test_args.kind);
        cfg.sided = parse_sided(test_args.sided);
        cfg.alpha = test_args.alpha;
        if (cfg.kind == inference::TestKind::linfun)
            cfg.signs = parse_signs(test_args.signs, sample.k);
        std::vector<inference::TestResult> results;
        for (int a = 0; a < sample.p; ++a)
            for (int b = a + 1; b < sample.p; ++b)
                results.push_back(inference::run_test(fits, a, b, cfg));
        io::save_test_results_csv(results, test_args.out);
        manifest.add_output(test_args.out);
        const fs::path jpath = fs::path(test_args.out).replace_extension(".json");
        io::save_test_results_json(results, jpath);
        manifest.add_output(jpath);
        if (test_args.recover) {
            const auto edges = inference::support_recover(fits, test_args.rho);
            const fs::path epath = fs::path(test_args.out).replace_extension(".edges.json");
            io::save_edge_set(edges, epath);
            manifest.add_output(epath);
        }
        manifest.config({{"kind", test_args.kind},
                         {"alpha", test_args.alpha},
                         {"sided", test_args.sided},
                         {"signs", test_args.signs},
                         {"recover", test_args.recover},
                         {"rho", test_args.rho}});
        manifest.save(fs::path(test_args.out).replace_extension(".manifest.json"));
        long rejections = 0;
        for (const auto& r : results) rejections += r.reject;
        std::cout << results.size() << " pairs tested, " << rejections << " rejections\n";
    }

    if (est->parsed()) {
        Manifest manifest("estimate", argc, argv);
        const auto sample = io::load_sample(to_paths(est_args.sample), est_args.center);
        const auto fits = io::load_fits(est_args.fits, sample);
        inference::TestConfig cfg;
        cfg.kind = parse_kind(est_args.kind);
        cfg.sided = parse_sided(est_args.sided);
        cfg.alpha = est_args.alpha;
        if (cfg.kind == inference::TestKind::linfun)
            cfg.signs = parse_signs(est_args.signs, sample.k);
        const auto estimate = inference::estimate_precision(fits, cfg);
        io::save_precision_set(estimate, est_args.out);
        manifest.add_output(est_args.out);
        manifest.config({{"kind", est_args.kind}, {"alpha", est_args.alpha}});
        manifest.save(fs::path(est_args.out).replace_extension(".manifest.json"));
        std::cout << "precision estimate written to " << est_args.out << "\n";
    }

    if (tune->parsed()) {
        Manifest manifest("tune-alpha", argc, argv);
        const auto train = io::load_sample(to_paths(tune_args.train), tune_args.center);
        const auto validation = io::load_sample(to_paths(tune_args.validation), tune_args.center);
        const double lambda = tune_lambda.resolve(train, tune_args.seed);
        inference::TestConfig cfg;
        cfg.kind = parse_kind(tune_args.kind);
        cfg.sided = parse_sided(tune_args.sided);
        if (cfg.kind == inference::TestKind::linfun)
            cfg.signs = parse_signs(tune_args.signs, train.k);
        const auto grid = tune_args.grid.empty() ? inference::default_alpha_grid()
                                                 : parse_grid(tune_args.grid);
        const auto result = inference::tune_alpha(train, validation, grid, cfg, lambda);
        json j;
        j["alpha"] = result.alpha;
        j["grid"] = result.grid;
        j["scores"] = result.scores;
        j["all_non_pd"] = result.all_non_pd;
        j["lambda"] = lambda;
        std::ofstream f(tune_args.out);
        if (!f) throw ValidationError("cannot open for writing: " + tune_args.out);
        f << j.dump(1) << "\n";
        manifest.add_output(tune_args.out);
        manifest.config({{"kind", tune_args.kind}, {"lambda", lambda}});
        manifest.save(fs::path(tune_args.out).replace_extension(".manifest.json"));
        if (result.all_non_pd)
            std::cerr << "warning: no candidate alpha produced a positive definite estimate\n";
        std::cout << "chosen alpha = " << result.alpha << "\n";
    }

    if (eval->parsed()) {
        Manifest manifest("evaluate", argc, argv);
        const auto truth = io::load_precision_set(eval_args.truth);
        const auto edges = true_edge_set(truth, 0.0);
        std::ofstream f(eval_args.out);
        if (!f) throw ValidationError("cannot open for writing: " + eval_args.out);
        f << "model,setting,method,metric,mean,se\n";
        const std::string method = eval_args.kind == "chi" ? "phi2" : "phi1";
        if (!eval_args.fits.empty()) {
            if (eval_args.sample.empty())
                throw ValidationError("evaluate: --fits requires --sample");
            const auto sample = io::load_sample(to_paths(eval_args.sample), eval_args.center);
            const auto fits = io::load_fits(eval_args.fits, sample);
            inference::TestConfig cfg;
            cfg.kind = parse_kind(eval_args.kind);
            cfg.sided = parse_sided(eval_args.sided);
            cfg.alpha = eval_args.alpha;
            if (cfg.kind == inference::TestKind::linfun)
                cfg.signs = parse_signs(eval_args.signs, sample.k);
            const auto panel = evalkit::build_panel(fits, edges, cfg);
            const double theo = cfg.kind == inference::TestKind::chi
                                    ? chi_quantile(sample.k, 1.0 - cfg.alpha)
                                : cfg.sided == inference::Sidedness::one
                                    ? normal_quantile(cfg.alpha)
                                    : normal_quantile(1.0 - cfg.alpha / 2.0);
            const auto rates = evalkit::fpr_fnr(panel, theo);
            const double emp = evalkit::empirical_critical(panel, cfg.alpha);
            const auto emp_rates = evalkit::fpr_fnr(panel, emp);
            f << ",," << method << ",fpr_theoretical," << rates.fpr << ",\n";
            f << ",," << method << ",fnr_theoretical," << rates.fnr << ",\n";
            f << ",," << method << ",fnr_empirical," << emp_rates.fnr << ",\n";
            f << ",," << method << ",roc_area," << evalkit::roc_area(panel) << ",\n";
        }
        if (!eval_args.estimate.empty()) {
            const auto estp = io::load_precision_set(eval_args.estimate);
            const auto losses = evalkit::matrix_losses(estp, truth);
            f << ",,est,l1_mean," << losses.l1_mean << ",\n";
            f << ",,est,l2_mean," << losses.l2_mean << ",\n";
            f << ",,est,lF_mean," << losses.lF_mean << ",\n";
            f << ",,est,l1_sum," << losses.l1_sum << ",\n";
            f << ",,est,l2_sum," << losses.l2_sum << ",\n";
            f << ",,est,lF_sum," << losses.lF_sum << ",\n";
        }
        f.close();
        manifest.add_output(eval_args.out);
        manifest.config({{"kind", eval_args.kind}, {"alpha", eval_args.alpha}});
        manifest.save(fs::path(eval_args.out).replace_extension(".manifest.json"));
        std::cout << "metrics written to " << eval_args.out << "\n";
    }

    if (repl->parsed()) {
        Manifest manifest("replicate", argc, argv);
        pipeline::ReplicateOptions opts;
        opts.reps = repl_args.reps;
        opts.seed = repl_args.seed;
        opts.alpha = repl_args.alpha;
        if (!repl_args.noise.empty()) opts.noise_override = parse_noise(repl_args.noise);
        opts.lambda_rule = repl_lambda.parsed_rule();
        opts.lambda_config = repl_lambda.config(repl_args.seed);
        if (!repl_args.grid.empty()) opts.alpha_grid = parse_grid(repl_args.grid);
        if (!repl_args.quiet)
            opts.progress = [](int done, int total) {
                std::cerr << "\rreplication " << done << "/" << total << std::flush;
                if (done == total) std::cerr << "\n";
            };
        const auto result = pipeline::replicate(repl_args.table, repl_args.setting, opts);
        pipeline::write_metrics_csv(result, repl_args.out);
        manifest.add_output(repl_args.out);
        manifest.seed(repl_args.seed);
        manifest.config({{"table", repl_args.table},
                         {"setting", repl_args.setting},
                         {"reps", repl_args.reps},
                         {"alpha", repl_args.alpha},
                         {"lambda", result.lambda},
                         {"noise", repl_args.noise}});
        manifest.save(fs::path(repl_args.out).replace_extension(".manifest.json"));
        std::cout << "lambda = " << result.lambda << ", metrics written to " << repl_args.out
                  << "\n";
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
