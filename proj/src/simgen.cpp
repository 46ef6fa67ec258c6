#include "multinet/simgen.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "multinet/rng.hpp"

namespace multinet::simgen {

void SimConfig::validate() const {
    if (k < 1) throw ValidationError("sim config: k must be >= 1");
    if (p < 2) throw ValidationError("sim config: p must be >= 2");
    if (n_per_class < 2) throw ValidationError("sim config: n must be >= 2");
    if (block_size < 1) throw ValidationError("sim config: block size must be >= 1");
    if (p % block_size != 0 && !diag_remainder)
        throw ValidationError("sim config: p must be a multiple of the block size "
                              "(or enable the diagonal remainder block)");
}

namespace {

struct BlockLayout {
    int blocks = 0;     // full blocks
    int upper = 0;      // count of unit-diagonal blocks (first half, rounded up)
    int remainder = 0;  // trailing edge-free nodes
};

BlockLayout layout(const SimConfig& cfg) {
    BlockLayout b;
    b.blocks = cfg.p / cfg.block_size;
    b.remainder = cfg.p % cfg.block_size;
    b.upper = (b.blocks + 1) / 2;
    return b;
}

struct PairPlan {
    // per unordered within-block pair: which graphs carry a value
    // (model I: all; model II tails: exactly one)
    std::vector<bool> all_graphs;
    std::vector<int> single_graph; // valid when !all_graphs
};

PairPlan plan_block(const SimConfig& cfg, int block) {
    const int bs = cfg.block_size;
    const int m = bs * (bs - 1) / 2;
    PairPlan plan;
    plan.all_graphs.assign(m, true);
    plan.single_graph.assign(m, -1);
    if (cfg.model == Model::II) {
        Rng rng(derive_seed(cfg.seed, 0xc0, static_cast<std::uint64_t>(block)));
        for (int i = 0; i < m; ++i) {
            const bool heads = rng.uniform01() <= 0.5;
            plan.all_graphs[i] = heads;
            if (!heads) plan.single_graph[i] = static_cast<int>(rng.below(cfg.k));
        }
    }
    return plan;
}

// Fill one graph's diagonal block, redrawing until positive definite.
void fill_block(const SimConfig& cfg, Matrix& omega, int t, int block, const PairPlan& plan,
                int& resamples) {
    const int bs = cfg.block_size;
    const int off = block * bs;
    const bool upper = block < layout(cfg).upper;
    const double diag = upper ? 1.0 : 3.0;
    const double lo = upper ? 0.2 : 0.6;
    const double hi = upper ? 0.4 : 1.2;

    for (int attempt = 0; attempt < 100; ++attempt) {
        Rng rng(derive_seed(cfg.seed, 0xb1, static_cast<std::uint64_t>(t),
                            static_cast<std::uint64_t>(block) * 101 + attempt));
        Matrix blk = Matrix::Zero(bs, bs);
        for (int i = 0; i < bs; ++i) blk(i, i) = diag;
        int pair = 0;
        for (int i = 0; i < bs; ++i)
            for (int j = i + 1; j < bs; ++j, ++pair) {
                const bool active = plan.all_graphs[pair] || plan.single_graph[pair] == t;
                if (!active) continue;
                const double v = rng.uniform(lo, hi);
                blk(i, j) = v;
                blk(j, i) = v;
            }
        Eigen::SelfAdjointEigenSolver<Matrix> es(blk, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() > 0.0) {
            omega.block(off, off, bs, bs) = blk;
            resamples += attempt;
            return;
        }
    }
    throw NumericalError("simgen: block " + std::to_string(block + 1) + " of graph " +
                         std::to_string(t + 1) + " stayed indefinite after 100 redraws");
}

PrecisionSet generate_impl(const SimConfig& cfg, int* resamples) {
    cfg.validate();
    const BlockLayout lay = layout(cfg);
    int redraws = 0;

    std::vector<PairPlan> plans(lay.blocks);
    for (int b = 0; b < lay.blocks; ++b) plans[b] = plan_block(cfg, b);

    std::vector<Matrix> omega(cfg.k, Matrix::Zero(cfg.p, cfg.p));
    for (int t = 0; t < cfg.k; ++t) {
        for (int b = 0; b < lay.blocks; ++b) fill_block(cfg, omega[t], t, b, plans[b], redraws);
        for (int r = 0; r < lay.remainder; ++r)
            omega[t](cfg.p - 1 - r, cfg.p - 1 - r) = 1.0;
    }
    if (resamples) *resamples = redraws;
    return make_precision_set(std::move(omega), /*require_pd=*/true);
}

} // namespace

PrecisionSet gen_model1(const SimConfig& config, int* resamples) {
    SimConfig c = config;
    c.model = Model::I;
    return generate_impl(c, resamples);
}

PrecisionSet gen_model2(const SimConfig& config, int* resamples) {
    SimConfig c = config;
    c.model = Model::II;
    return generate_impl(c, resamples);
}

PrecisionSet generate(const SimConfig& config, int* resamples) {
    return generate_impl(config, resamples);
}

MultiNetworkSample sample_from(const PrecisionSet& truth, const std::vector<int>& n_per_class,
                               Noise noise, std::uint64_t seed) {
    truth.validate();
    if (static_cast<int>(n_per_class.size()) != truth.k)
        throw ValidationError("sample_from: need one sample size per class");
    const double laplace_scale = 1.0 / std::sqrt(2.0);

    std::vector<Matrix> X(truth.k);
    for (int t = 0; t < truth.k; ++t) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(truth.omega[t]);
        if (es.eigenvalues().minCoeff() <= 0.0)
            throw ValidationError("sample_from: precision matrix " + std::to_string(t + 1) +
                                  " is not positive definite");
        // Sigma^{1/2} = Omega^{-1/2} via the symmetric eigendecomposition
        const Matrix root = es.eigenvectors() *
                            es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                            es.eigenvectors().transpose();
        Rng rng(derive_seed(seed, 0xd4, static_cast<std::uint64_t>(t)));
        Matrix z(n_per_class[t], truth.p);
        for (int i = 0; i < n_per_class[t]; ++i)
            for (int j = 0; j < truth.p; ++j)
                z(i, j) = (noise == Noise::gaussian) ? rng.normal() : rng.laplace(laplace_scale);
        X[t] = z * root; // rows are Sigma^{1/2} applied to i.i.d. component vectors
    }
    return make_sample(std::move(X));
}

} // namespace multinet::simgen
