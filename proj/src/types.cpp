#include "multinet/types.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace multinet {

int MultiNetworkSample::n_min() const {
    int m = n.empty() ? 0 : n[0];
    for (int v : n) m = std::min(m, v);
    return m;
}

int MultiNetworkSample::n_total() const {
    int s = 0;
    for (int v : n) s += v;
    return s;
}

void MultiNetworkSample::validate() const {
    if (k < 1) throw ValidationError("sample: need at least one class");
    if (p < 2) throw ValidationError("sample: need at least two variables");
    if (static_cast<int>(n.size()) != k || static_cast<int>(X.size()) != k)
        throw ValidationError("sample: class count mismatch");
    for (int t = 0; t < k; ++t) {
        if (n[t] < 2) throw ValidationError("sample: class " + std::to_string(t + 1) + " has fewer than 2 rows");
        if (X[t].rows() != n[t] || X[t].cols() != p)
            throw ValidationError("sample: class " + std::to_string(t + 1) + " has unexpected shape");
        if (!X[t].allFinite())
            throw ValidationError("sample: class " + std::to_string(t + 1) + " contains non-finite values");
    }
    if (!names.empty() && static_cast<int>(names.size()) != p)
        throw ValidationError("sample: column name count does not match p");
}

MultiNetworkSample make_sample(std::vector<Matrix> X, std::vector<std::string> names) {
    MultiNetworkSample s;
    s.k = static_cast<int>(X.size());
    s.p = X.empty() ? 0 : static_cast<int>(X[0].cols());
    for (const auto& m : X) s.n.push_back(static_cast<int>(m.rows()));
    s.X = std::move(X);
    if (names.empty()) {
        for (int j = 0; j < s.p; ++j) names.push_back("x" + std::to_string(j + 1));
    }
    s.names = std::move(names);
    s.validate();
    return s;
}

void PrecisionSet::validate(bool require_pd) const {
    if (k < 1 || static_cast<int>(omega.size()) != k)
        throw ValidationError("precision set: class count mismatch");
    for (int t = 0; t < k; ++t) {
        const Matrix& m = omega[t];
        if (m.rows() != p || m.cols() != p)
            throw ValidationError("precision set: matrix " + std::to_string(t + 1) + " is not p x p");
        for (int a = 0; a < p; ++a)
            for (int b = a + 1; b < p; ++b) {
                const double x = m(a, b), y = m(b, a);
                const double scale = std::max({1.0, std::abs(x), std::abs(y)});
                if (std::abs(x - y) > 1e-10 * scale)
                    throw ValidationError("precision set: matrix " + std::to_string(t + 1) +
                                          " is not symmetric at (" + std::to_string(a + 1) + "," +
                                          std::to_string(b + 1) + ")");
            }
        if (require_pd) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
            if (es.eigenvalues().minCoeff() <= 0.0)
                throw ValidationError("precision set: matrix " + std::to_string(t + 1) +
                                      " is not positive definite");
        }
    }
}

PrecisionSet make_precision_set(std::vector<Matrix> omega, bool require_pd) {
    PrecisionSet s;
    s.k = static_cast<int>(omega.size());
    s.p = omega.empty() ? 0 : static_cast<int>(omega[0].rows());
    s.omega = std::move(omega);
    s.validate(require_pd);
    return s;
}

void EdgeSet::insert(int a, int b) {
    if (a == b) throw ValidationError("edge set: self-loop rejected");
    if (a > b) std::swap(a, b);
    edges.insert({a, b});
}

bool EdgeSet::contains(int a, int b) const {
    if (a > b) std::swap(a, b);
    return edges.count({a, b}) > 0;
}

int EdgeSet::sparsity() const {
    std::vector<int> deg(p, 0);
    for (const auto& e : edges) {
        ++deg[e.first];
        ++deg[e.second];
    }
    return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

EdgeSet true_edge_set(const PrecisionSet& truth, double tol) {
    if (tol < 0) throw ValidationError("true_edge_set: tol must be nonnegative");
    EdgeSet es;
    es.p = truth.p;
    for (int a = 0; a < truth.p; ++a)
        for (int b = a + 1; b < truth.p; ++b) {
            double m = 0;
            for (int t = 0; t < truth.k; ++t) m = std::max(m, std::abs(truth.omega[t](a, b)));
            if (m > tol) es.insert(a, b);
        }
    return es;
}

} // namespace multinet
