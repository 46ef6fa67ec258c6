#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "multinet/errors.hpp"

namespace multinet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// k classes of observations on the same p variables. X[t] is n[t] x p.
/// Immutable after construction; safe to share across threads.
struct MultiNetworkSample {
    int k = 0;
    int p = 0;
    std::vector<int> n;
    std::vector<Matrix> X;
    std::vector<std::string> names; // column names; size p (may be synthetic)

    int n_min() const;   // n^(0)
    int n_total() const; // N

    /// Throws ValidationError unless k>=1, p>=2, every n[t]>=2 and shapes agree.
    void validate() const;
};

MultiNetworkSample make_sample(std::vector<Matrix> X, std::vector<std::string> names = {});

/// k symmetric p x p precision matrices.
struct PrecisionSet {
    int k = 0;
    int p = 0;
    std::vector<Matrix> omega;

    /// Symmetry to 1e-10 mixed abs/rel tolerance; if require_pd, every matrix
    /// must have smallest eigenvalue > 0 (generator-output contract).
    void validate(bool require_pd = false) const;
};

PrecisionSet make_precision_set(std::vector<Matrix> omega, bool require_pd = false);

/// Unordered node pairs (0-based, stored with a < b), no self-loops.
struct EdgeSet {
    int p = 0;
    std::set<std::pair<int, int>> edges;

    void insert(int a, int b);
    bool contains(int a, int b) const;
    /// Maximum node degree (the joint sparsity statistic).
    int sparsity() const;
};

/// Pair (a,b) is an edge when max_t |omega[t](a,b)| > tol.
EdgeSet true_edge_set(const PrecisionSet& truth, double tol = 0.0);

/// Number of unordered pairs for p nodes.
inline long pair_count(int p) { return static_cast<long>(p) * (p - 1) / 2; }

} // namespace multinet
