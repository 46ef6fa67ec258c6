#include "multinet/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>

#include "multinet/io.hpp"
#include "multinet/parallel.hpp"
#include "multinet/rng.hpp"

namespace multinet::pipeline {

Setting table_setting(int table, int setting) {
    if (table < 1 || table > 4) throw ValidationError("replicate: table must be 1..4");
    if (setting < 1 || setting > 3) throw ValidationError("replicate: setting must be 1..3");
    Setting s;
    s.model = (table == 1 || table == 3) ? simgen::Model::I : simgen::Model::II;
    s.n = (s.model == simgen::Model::I) ? 100 : 200;
    s.k = (setting == 1) ? 5 : 10;
    s.p = (setting == 3) ? 200 : 48;
    return s;
}

bool table_is_estimation(int table) { return table == 3 || table == 4; }

double scenario_lambda(const Setting& s, LambdaRule rule, const hgsl::LambdaConfig& config) {
    if (rule == LambdaRule::theory) return hgsl::lambda_theoretical(s.n, s.p, s.k, config);
    return hgsl::lambda_simulated(std::vector<int>(s.k, s.n), s.p, s.k, config);
}

namespace {

struct FittedRep {
    PrecisionSet truth;
    EdgeSet edges;
    std::vector<nodewise::NodewiseFit> fits;
};

FittedRep fit_rep(const Setting& s, double lambda, std::uint64_t seed) {
    simgen::SimConfig cfg;
    cfg.k = s.k;
    cfg.p = s.p;
    cfg.n_per_class = s.n;
    cfg.model = s.model;
    cfg.noise = s.noise;
    cfg.seed = derive_seed(seed, 0x7421);

    FittedRep rep;
    rep.truth = simgen::generate(cfg);
    rep.edges = true_edge_set(rep.truth, 0.0);
    const auto sample = simgen::sample_from(rep.truth, std::vector<int>(s.k, s.n), s.noise,
                                            derive_seed(seed, 0x5821));
    rep.fits = nodewise::fit_all_nodes(sample, lambda);
    return rep;
}

TestMetrics panel_metrics(const evalkit::PairScorePanel& panel, double alpha, double theo_crit) {
    TestMetrics m;
    const auto theo = evalkit::fpr_fnr(panel, theo_crit);
    m.fpr_theoretical = theo.fpr;
    m.fnr_theoretical = theo.fnr;
    m.fnr_empirical = evalkit::fpr_fnr(panel, evalkit::empirical_critical(panel, alpha)).fnr;
    m.roc = evalkit::roc_area(panel);
    return m;
}

inference::TestConfig phi1_config(int k, double alpha) {
    inference::TestConfig c;
    c.kind = inference::TestKind::linfun;
    c.signs = inference::TestConfig::all_ones(k);
    c.sided = inference::Sidedness::one;
    c.alpha = alpha;
    return c;
}

inference::TestConfig phi2_config(double alpha) {
    inference::TestConfig c;
    c.kind = inference::TestKind::chi;
    c.alpha = alpha;
    return c;
}

} // namespace

TestingRep testing_rep(const Setting& s, double lambda, double alpha, std::uint64_t seed) {
    const FittedRep rep = fit_rep(s, lambda, seed);

    TestingRep out;
    const auto p2 = evalkit::build_panel(rep.fits, rep.edges, phi2_config(alpha));
    out.phi2 = panel_metrics(p2, alpha, chi_quantile(s.k, 1.0 - alpha));

    const auto p1 = evalkit::build_panel(rep.fits, rep.edges, phi1_config(s.k, alpha));
    out.phi1 = panel_metrics(p1, alpha, normal_quantile(alpha));

    // |V| <= sqrt(k) U on every pair of every simulated dataset
    for (size_t i = 0; i < p1.scores.size(); ++i)
        if (std::abs(p1.scores[i]) > p2.scores[i] + 1e-9)
            throw NumericalError("testing_rep: |V| exceeded sqrt(k) U on a pair");
    return out;
}

EstimationRep estimation_rep(const Setting& s, double lambda, const std::vector<double>& grid,
                             std::uint64_t seed) {
    const FittedRep rep = fit_rep(s, lambda, seed);
    const auto validation = simgen::sample_from(rep.truth, std::vector<int>(s.k, s.n), s.noise,
                                                derive_seed(seed, 0x76a1));

    EstimationRep out;
    const auto run = [&](const inference::TestConfig& cfg, EstMetrics& m) {
        const auto tuned = inference::tune_alpha(rep.fits, validation, grid, cfg);
        inference::TestConfig chosen = cfg;
        chosen.alpha = tuned.alpha;
        const auto est = inference::estimate_precision(rep.fits, chosen);
        const auto losses = evalkit::matrix_losses(est, rep.truth);
        m.alpha = tuned.alpha;
        m.l1_mean = losses.l1_mean;
        m.l2_mean = losses.l2_mean;
        m.lF_mean = losses.lF_mean;
        m.l1_sum = losses.l1_sum;
        m.l2_sum = losses.l2_sum;
        m.lF_sum = losses.lF_sum;
    };
    run(phi1_config(s.k, 0.05), out.phi1);
    run(phi2_config(0.05), out.phi2);
    return out;
}

Summary summarize(const std::vector<double>& values) {
    Summary s;
    if (values.empty()) {
        s.mean = s.se = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / values.size();
    if (values.size() < 2) {
        s.se = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.se = std::sqrt(ss / (values.size() - 1)) / std::sqrt(static_cast<double>(values.size()));
    return s;
}

ReplicateResult replicate(int table, int setting, const ReplicateOptions& opts) {
    if (opts.reps < 1) throw ValidationError("replicate: reps must be >= 1");
    ReplicateResult result;
    result.table = table;
    result.setting = setting;
    result.scenario = table_setting(table, setting);
    if (opts.noise_override) result.scenario.noise = *opts.noise_override;
    result.lambda = scenario_lambda(result.scenario, opts.lambda_rule, opts.lambda_config);

    const bool estimation = table_is_estimation(table);
    const std::vector<double> grid =
        opts.alpha_grid.empty() ? inference::default_alpha_grid() : opts.alpha_grid;

    // Replications run concurrently with derived seeds; each writes only its
    // own slot and the aggregation below walks them in replication order, so
    // the output is independent of scheduling.
    struct RepRecord {
        bool ok = false;
        std::string error;
        std::vector<std::pair<std::string, double>> values;
    };
    std::vector<RepRecord> records(opts.reps);
    int done = 0;

#pragma omp parallel for schedule(dynamic) if (!in_omp_parallel())
    for (int r = 0; r < opts.reps; ++r) {
        RepRecord& rec = records[r];
        const std::uint64_t rep_seed = derive_seed(opts.seed, 0x9e00, static_cast<std::uint64_t>(r));
        try {
            if (estimation) {
                const auto rep = estimation_rep(result.scenario, result.lambda, grid, rep_seed);
                for (const auto& [name, m] :
                     {std::pair<const char*, const EstMetrics&>{"phi1", rep.phi1},
                      {"phi2", rep.phi2}}) {
                    rec.values.emplace_back(std::string(name) + ".alpha", m.alpha);
                    rec.values.emplace_back(std::string(name) + ".l1_mean", m.l1_mean);
                    rec.values.emplace_back(std::string(name) + ".l2_mean", m.l2_mean);
                    rec.values.emplace_back(std::string(name) + ".lF_mean", m.lF_mean);
                    rec.values.emplace_back(std::string(name) + ".l1_sum", m.l1_sum);
                    rec.values.emplace_back(std::string(name) + ".l2_sum", m.l2_sum);
                    rec.values.emplace_back(std::string(name) + ".lF_sum", m.lF_sum);
                }
            } else {
                const auto rep = testing_rep(result.scenario, result.lambda, opts.alpha, rep_seed);
                for (const auto& [name, m] :
                     {std::pair<const char*, const TestMetrics&>{"phi1", rep.phi1},
                      {"phi2", rep.phi2}}) {
                    rec.values.emplace_back(std::string(name) + ".fpr_theoretical",
                                            m.fpr_theoretical);
                    rec.values.emplace_back(std::string(name) + ".fnr_theoretical",
                                            m.fnr_theoretical);
                    rec.values.emplace_back(std::string(name) + ".fnr_empirical", m.fnr_empirical);
                    rec.values.emplace_back(std::string(name) + ".roc_area", m.roc);
                }
            }
            rec.ok = true;
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
        if (opts.progress) {
#pragma omp critical(multinet_replicate_progress)
            opts.progress(++done, opts.reps);
        }
    }

    int failed = 0;
    for (int r = 0; r < opts.reps; ++r) {
        if (!records[r].ok) {
            ++failed;
            std::cerr << "replicate: rep " << r + 1 << " failed: " << records[r].error << "\n";
            continue;
        }
        for (const auto& [key, v] : records[r].values) result.raw[key].push_back(v);
    }
    if (failed == opts.reps) throw NumericalError("replicate: every replication failed");

    for (const auto& [key, values] : result.raw) result.summary[key] = summarize(values);
    return result;
}

void write_metrics_csv(const ReplicateResult& result, const std::filesystem::path& path) {
    std::ofstream f(path);
    if (!f) throw ValidationError("cannot open for writing: " + path.string());
    f << "model,setting,method,metric,mean,se\n";
    const std::string model = result.scenario.model == simgen::Model::I ? "I" : "II";
    for (const auto& [key, s] : result.summary) {
        const auto dot = key.find('.');
        f << model << "," << result.setting << "," << key.substr(0, dot) << ","
          << key.substr(dot + 1) << "," << io::format_double(s.mean) << ","
          << io::format_double(s.se) << "\n";
    }
}

} // namespace multinet::pipeline
