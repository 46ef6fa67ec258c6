#pragma once

#include <cstdint>
#include <vector>

#include "multinet/types.hpp"

namespace multinet::simgen {

enum class Model { I, II };
enum class Noise { gaussian, laplace };

struct SimConfig {
    int k = 1;
    int p = 16;
    int n_per_class = 100;
    int block_size = 8;
    Model model = Model::I;
    Noise noise = Noise::gaussian;
    std::uint64_t seed = 0;
    /// When p is not a multiple of block_size, allow a trailing block with
    /// unit diagonal and no edges instead of rejecting.
    bool diag_remainder = false;

    void validate() const;
};

/// Block-diagonal precision matrices. Blocks in the first half (rounded up)
/// get unit diagonals with off-diagonal entries drawn from U[0.2, 0.4]; the
/// remaining blocks get diagonal 3 with entries from U[0.6, 1.2]. All k graphs
/// share the support; values are drawn independently per graph. Blocks that
/// come out indefinite are redrawn (up to 100 attempts each, counted in
/// *resamples when given).
PrecisionSet gen_model1(const SimConfig& config, int* resamples = nullptr);

/// As Model I, except each within-block pair first flips a fair coin: heads
/// keeps the Model I draw across all graphs, tails picks one graph uniformly
/// at random and leaves the pair zero in the others.
PrecisionSet gen_model2(const SimConfig& config, int* resamples = nullptr);

PrecisionSet generate(const SimConfig& config, int* resamples = nullptr);

/// Draw independent rows per class: gaussian rows are Sigma^{1/2} z with z
/// standard normal and Sigma = Omega^{-1} (symmetric eigendecomposition root);
/// laplace rows use i.i.d. Laplace(0, 1/sqrt(2)) components in place of z,
/// which keeps the covariance equal to Sigma.
MultiNetworkSample sample_from(const PrecisionSet& truth, const std::vector<int>& n_per_class,
                               Noise noise, std::uint64_t seed);

} // namespace multinet::simgen
