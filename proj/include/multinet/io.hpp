#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "multinet/inference.hpp"
#include "multinet/nodewise.hpp"
#include "multinet/types.hpp"

namespace multinet::io {

/// Double -> shortest exact decimal (17 significant digits), locale independent.
std::string format_double(double v);

/// Load one CSV per class. Every file must be a rectangular numeric CSV with a
/// header row; all files must share the same header. Class order follows path
/// order. Optionally centers each column (for real data; the generators are
/// mean zero by construction).
MultiNetworkSample load_sample(const std::vector<std::filesystem::path>& paths,
                               bool center = false);

/// Write one CSV per class, 17 significant digits; returns the paths written.
std::vector<std::filesystem::path> save_sample(const MultiNetworkSample& sample,
                                               const std::filesystem::path& dir,
                                               const std::string& stem = "class");

void save_precision_set(const PrecisionSet& set, const std::filesystem::path& path);
PrecisionSet load_precision_set(const std::filesystem::path& path);

void save_edge_set(const EdgeSet& edges, const std::filesystem::path& path);
EdgeSet load_edge_set(const std::filesystem::path& path);

/// Fits checkpoint: sparse-encoded coefficients, residual summaries, omega
/// values. Residual vectors are not stored; they are recomputed exactly from
/// the sample and the coefficients on load.
void save_fits(const std::vector<nodewise::NodewiseFit>& fits, double lambda,
               const std::filesystem::path& path);
std::vector<nodewise::NodewiseFit> load_fits(const std::filesystem::path& path,
                                             const MultiNetworkSample& sample,
                                             double* lambda_out = nullptr);

/// Batch of test decisions as CSV: a,b,statistic,critical,reject (1-based nodes).
void save_test_results_csv(const std::vector<inference::TestResult>& results,
                           const std::filesystem::path& path);
void save_test_results_json(const std::vector<inference::TestResult>& results,
                            const std::filesystem::path& path);

} // namespace multinet::io
