#include "multinet/evalkit.hpp"

#include "multinet/parallel.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace multinet::evalkit {

namespace {

PairScorePanel build_panel_impl(const std::vector<nodewise::NodewiseFit>& fits,
                                const EdgeSet& truth, const inference::TestConfig& config,
                                bool parallel) {
    const int p = static_cast<int>(fits.size());
    const int k = static_cast<int>(fits[0].n.size());
    config.validate(k);
    if (truth.p != p) throw ValidationError("build_panel: truth edge set has wrong node count");

    PairScorePanel panel;
    panel.k = k;
    panel.p = p;
    panel.kind = config.kind;
    panel.sided = config.sided;
    const long m = pair_count(p);
    panel.scores.resize(m);
    panel.is_edge.resize(m);

    // pair index i maps to (a,b) row by row; precompute starts of each row a
    std::vector<long> row_start(p, 0);
    for (int a = 1; a < p; ++a) row_start[a] = row_start[a - 1] + (p - a);

#pragma omp parallel for schedule(dynamic) if (parallel && !in_omp_parallel())
    for (int a = 0; a < p - 1; ++a) {
        for (int b = a + 1; b < p; ++b) {
            const long idx = row_start[a] + (b - a - 1);
            double score;
            if (config.kind == inference::TestKind::chi)
                score = inference::u_statistic(fits, a, b);
            else
                score = inference::v_statistic(fits, a, b, config.signs) /
                        std::sqrt(static_cast<double>(k));
            panel.scores[idx] = score;
            panel.is_edge[idx] = truth.contains(a, b);
        }
    }
    return panel;
}

} // namespace

PairScorePanel build_panel(const std::vector<nodewise::NodewiseFit>& fits, const EdgeSet& truth,
                           const inference::TestConfig& config) {
    return build_panel_impl(fits, truth, config, true);
}

PairScorePanel build_panel_serial(const std::vector<nodewise::NodewiseFit>& fits,
                                  const EdgeSet& truth, const inference::TestConfig& config) {
    return build_panel_impl(fits, truth, config, false);
}

bool rejects(const PairScorePanel& panel, double score, double critical) {
    if (panel.kind == inference::TestKind::chi) return score > critical;
    if (panel.sided == inference::Sidedness::one) return score < critical;
    return std::abs(score) > critical;
}

namespace {

// Nearest-rank quantile of v at probability q: the ceil(q*n)-th smallest value.
double nearest_rank(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    long rank = static_cast<long>(std::ceil(q * static_cast<double>(v.size()) - 1e-12));
    rank = std::clamp(rank, 1L, static_cast<long>(v.size()));
    return v[rank - 1];
}

} // namespace

double empirical_critical(const PairScorePanel& panel, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("empirical_critical: alpha in (0,1)");
    std::vector<double> nulls;
    for (size_t i = 0; i < panel.scores.size(); ++i)
        if (!panel.is_edge[i]) nulls.push_back(panel.scores[i]);
    if (nulls.empty()) throw ValidationError("empirical_critical: no null pairs");
    if (panel.kind == inference::TestKind::chi) return nearest_rank(std::move(nulls), 1.0 - alpha);
    if (panel.sided == inference::Sidedness::one) return nearest_rank(std::move(nulls), alpha);
    for (double& s : nulls) s = std::abs(s);
    return nearest_rank(std::move(nulls), 1.0 - alpha);
}

ErrorRates fpr_fnr(const PairScorePanel& panel, double critical) {
    long nulls = 0, edges = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < panel.scores.size(); ++i) {
        const bool rej = rejects(panel, panel.scores[i], critical);
        if (panel.is_edge[i]) {
            ++edges;
            if (!rej) ++fn;
        } else {
            ++nulls;
            if (rej) ++fp;
        }
    }
    if (nulls == 0 && edges == 0) throw ValidationError("fpr_fnr: empty panel");
    ErrorRates r;
    r.fpr = nulls ? static_cast<double>(fp) / nulls : 0.0;
    r.fnr = edges ? static_cast<double>(fn) / edges : 0.0;
    return r;
}

double roc_area(const PairScorePanel& panel) {
    // orient so that larger means more evidence of an edge
    std::vector<std::pair<double, bool>> pts;
    pts.reserve(panel.scores.size());
    for (size_t i = 0; i < panel.scores.size(); ++i) {
        double s = panel.scores[i];
        if (panel.kind == inference::TestKind::linfun)
            s = panel.sided == inference::Sidedness::one ? -s : std::abs(s);
        pts.push_back({s, panel.is_edge[i]});
    }
    long n_pos = 0, n_neg = 0;
    for (const auto& q : pts) (q.second ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0)
        throw ValidationError("roc_area: need both edge and null pairs");

    std::sort(pts.begin(), pts.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    // midranks over tied scores
    double rank_sum_pos = 0.0;
    size_t i = 0;
    while (i < pts.size()) {
        size_t j = i;
        while (j < pts.size() && pts[j].first == pts[i].first) ++j;
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (size_t t = i; t < j; ++t)
            if (pts[t].second) rank_sum_pos += midrank;
        i = j;
    }
    const double u = rank_sum_pos - 0.5 * n_pos * (n_pos + 1.0);
    return u / (static_cast<double>(n_pos) * n_neg);
}

MatrixLosses matrix_losses(const PrecisionSet& est, const PrecisionSet& truth) {
    if (est.k != truth.k || est.p != truth.p)
        throw ValidationError("matrix_losses: dimension mismatch");
    MatrixLosses out;
    for (int t = 0; t < est.k; ++t) {
        const Matrix err = est.omega[t] - truth.omega[t];
        const double l1 = err.cwiseAbs().colwise().sum().maxCoeff();
        Eigen::JacobiSVD<Matrix> svd(err);
        const double l2 = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
        const double lF = err.norm();
        out.l1.push_back(l1);
        out.l2.push_back(l2);
        out.lF.push_back(lF);
        out.l1_sum += l1;
        out.l2_sum += l2;
        out.lF_sum += lF;
    }
    out.l1_mean = out.l1_sum / est.k;
    out.l2_mean = out.l2_sum / est.k;
    out.lF_mean = out.lF_sum / est.k;
    return out;
}

} // namespace multinet::evalkit
