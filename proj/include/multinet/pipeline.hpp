#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "multinet/evalkit.hpp"
#include "multinet/hgsl.hpp"
#include "multinet/inference.hpp"
#include "multinet/simgen.hpp"

namespace multinet::pipeline {

/// Simulation scenario of one table row: model, dimensions, noise.
struct Setting {
    simgen::Model model = simgen::Model::I;
    int k = 5;
    int p = 48;
    int n = 100;
    simgen::Noise noise = simgen::Noise::gaussian;
};

/// Map a results-table id (1..4) and setting id (1..3) to its scenario.
/// Tables 1/3 use Model I with n = 100, tables 2/4 Model II with n = 200.
/// The node counts are 48, 48, 200 (48 keeps full size-8 blocks).
Setting table_setting(int table, int setting);

bool table_is_estimation(int table);

/// Per-replication testing metrics for one method.
struct TestMetrics {
    double fpr_theoretical = 0.0;
    double fnr_theoretical = 0.0;
    double fnr_empirical = 0.0;
    double roc = 0.0;
};

struct TestingRep {
    TestMetrics phi1; // linear-functional test, signs all +1, one-sided
    TestMetrics phi2; // chi-based test
};

/// Per-replication estimation metrics for one method (losses against truth).
struct EstMetrics {
    double alpha = 0.0;
    double l1_mean = 0.0, l2_mean = 0.0, lF_mean = 0.0;
    double l1_sum = 0.0, l2_sum = 0.0, lF_sum = 0.0;
};

struct EstimationRep {
    EstMetrics phi1;
    EstMetrics phi2;
};

/// One full simulate -> fit -> test -> evaluate cycle at significance alpha.
TestingRep testing_rep(const Setting& s, double lambda, double alpha, std::uint64_t seed);

/// One full simulate -> fit -> tune -> estimate -> losses cycle.
EstimationRep estimation_rep(const Setting& s, double lambda, const std::vector<double>& grid,
                             std::uint64_t seed);

/// The shared penalty level for a scenario (depends only on n, p, k and the rule).
enum class LambdaRule { sim, theory };
double scenario_lambda(const Setting& s, LambdaRule rule, const hgsl::LambdaConfig& config);

struct Summary {
    double mean = 0.0;
    double se = 0.0; // NaN when only one replication
};

Summary summarize(const std::vector<double>& values);

/// Aggregated metric rows plus the raw per-replication series keyed
/// "<method>.<metric>" (methods "phi1"/"phi2").
struct ReplicateResult {
    int table = 0;
    int setting = 0;
    Setting scenario;
    double lambda = 0.0;
    std::map<std::string, std::vector<double>> raw;
    std::map<std::string, Summary> summary;
};

struct ReplicateOptions {
    int reps = 50;
    std::uint64_t seed = 0;
    double alpha = 0.05;
    std::optional<simgen::Noise> noise_override;
    LambdaRule lambda_rule = LambdaRule::sim;
    hgsl::LambdaConfig lambda_config;
    std::vector<double> alpha_grid; // estimation tables; empty = default grid
    /// Called after each replication with (completed, total); may be empty.
    std::function<void(int, int)> progress;
};

/// Run a table's scenario for the requested replications. A failed replication
/// is recorded and skipped rather than aborting the run; rows are aggregated
/// over the completed ones.
ReplicateResult replicate(int table, int setting, const ReplicateOptions& opts);

/// metrics CSV rows: model,setting,method,metric,mean,se
void write_metrics_csv(const ReplicateResult& result, const std::filesystem::path& path);

} // namespace multinet::pipeline
