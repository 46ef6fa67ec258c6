#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "multinet/simgen.hpp"
#include "multinet/types.hpp"

using namespace multinet;
using simgen::SimConfig;

TEST_CASE("model I block structure") {
    SimConfig cfg;
    cfg.k = 2;
    cfg.p = 16;
    cfg.seed = 1;
    const auto truth = simgen::gen_model1(cfg);

    for (int t = 0; t < 2; ++t) {
        const Matrix& m = truth.omega[t];
        // first block: unit diagonal, entries in [0.2, 0.4]
        for (int a = 0; a < 8; ++a) {
            CHECK(m(a, a) == 1.0);
            for (int b = a + 1; b < 8; ++b) {
                CHECK(m(a, b) >= 0.2);
                CHECK(m(a, b) <= 0.4);
            }
        }
        // second block: diagonal 3, entries in [0.6, 1.2]
        for (int a = 8; a < 16; ++a) {
            CHECK(m(a, a) == 3.0);
            for (int b = a + 1; b < 16; ++b) {
                CHECK(m(a, b) >= 0.6);
                CHECK(m(a, b) <= 1.2);
            }
        }
        // off-block entries exactly zero
        for (int a = 0; a < 8; ++a)
            for (int b = 8; b < 16; ++b) CHECK(m(a, b) == 0.0);
        // exact symmetry
        CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("model I joint link vectors have all components nonzero on the support") {
    SimConfig cfg;
    cfg.k = 4;
    cfg.p = 16;
    cfg.seed = 2;
    const auto truth = simgen::gen_model1(cfg);
    for (int a = 0; a < 16; ++a)
        for (int b = a + 1; b < 16; ++b) {
            bool any = false, all = true;
            for (int t = 0; t < 4; ++t) {
                const bool nz = truth.omega[t](a, b) != 0.0;
                any = any || nz;
                all = all && nz;
            }
            if (any) CHECK(all);
        }
}

TEST_CASE("generated matrices are positive definite across seeds and shapes") {
    for (auto [k, p] : {std::pair{1, 8}, {3, 16}, {5, 48}, {2, 24}}) {
        for (std::uint64_t seed : {0ULL, 7ULL, 99ULL}) {
            SimConfig cfg;
            cfg.k = k;
            cfg.p = p;
            cfg.seed = seed;
            for (auto model : {simgen::Model::I, simgen::Model::II}) {
                cfg.model = model;
                const auto truth = simgen::generate(cfg);
                for (const auto& m : truth.omega) {
                    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
                    CHECK(es.eigenvalues().minCoeff() > 0.0);
                }
            }
        }
    }
}

TEST_CASE("model I support is identical across graphs; determinism holds") {
    SimConfig cfg;
    cfg.k = 3;
    cfg.p = 24;
    cfg.seed = 5;
    const auto a = simgen::gen_model1(cfg);
    const auto b = simgen::gen_model1(cfg);
    for (int t = 0; t < 3; ++t) CHECK((a.omega[t] - b.omega[t]).cwiseAbs().maxCoeff() == 0.0);
    for (int x = 0; x < 24; ++x)
        for (int y = x + 1; y < 24; ++y) {
            const bool nz0 = a.omega[0](x, y) != 0.0;
            for (int t = 1; t < 3; ++t) CHECK((a.omega[t](x, y) != 0.0) == nz0);
        }
}

TEST_CASE("model II mixes full and single-class links roughly half and half") {
    SimConfig cfg;
    cfg.k = 5;
    cfg.p = 48;
    cfg.model = simgen::Model::II;
    cfg.seed = 11;
    const auto truth = simgen::gen_model2(cfg);

    int full = 0, single = 0, within = 0;
    for (int a = 0; a < 48; ++a)
        for (int b = a + 1; b < 48; ++b) {
            if (a / 8 != b / 8) {
                for (int t = 0; t < 5; ++t) CHECK(truth.omega[t](a, b) == 0.0);
                continue;
            }
            ++within;
            int nz = 0;
            for (int t = 0; t < 5; ++t) nz += truth.omega[t](a, b) != 0.0 ? 1 : 0;
            CHECK((nz == 1 || nz == 5)); // heads -> all classes, tails -> exactly one
            (nz == 5 ? full : single)++;
        }
    CHECK(within == 6 * 28);
    // binomial(168, 1/2): mean 84, sd ~6.5; 4 sigma window
    CHECK(single >= 84 - 26);
    CHECK(single <= 84 + 26);
    CHECK(full + single == within);
}

TEST_CASE("block layout validation and the remainder option") {
    SimConfig cfg;
    cfg.k = 1;
    cfg.p = 50;
    cfg.seed = 1;
    CHECK_THROWS_AS(simgen::generate(cfg), ValidationError);
    cfg.diag_remainder = true;
    const auto truth = simgen::generate(cfg);
    // trailing two nodes carry no edges and unit diagonal
    for (int r : {48, 49}) {
        CHECK(truth.omega[0](r, r) == 1.0);
        for (int b = 0; b < 48; ++b) CHECK(truth.omega[0](r, b) == 0.0);
    }
    CHECK(truth.omega[0](49, 48) == 0.0);
}

TEST_CASE("sample_from") {
    SUBCASE("gaussian sampling concentrates around the target covariance") {
        const int n = 10000, p = 5;
        const auto eye = make_precision_set({Matrix::Identity(p, p)});
        const auto s = simgen::sample_from(eye, {n}, simgen::Noise::gaussian, 21);
        const Matrix cov = s.X[0].transpose() * s.X[0] / n;
        const double band = 5.0 / std::sqrt(static_cast<double>(n));
        CHECK((cov - Matrix::Identity(p, p)).cwiseAbs().maxCoeff() < band);
    }
    SUBCASE("laplace noise keeps unit variance and has heavy tails") {
        const int n = 40000, p = 3;
        const auto eye = make_precision_set({Matrix::Identity(p, p)});
        const auto s = simgen::sample_from(eye, {n}, simgen::Noise::laplace, 22);
        for (int j = 0; j < p; ++j) {
            const double var = s.X[0].col(j).squaredNorm() / n;
            CHECK(std::abs(var - 1.0) < 0.1);
            double m4 = 0.0;
            for (int i = 0; i < n; ++i) m4 += std::pow(s.X[0](i, j), 4.0);
            m4 /= n;
            const double excess_kurtosis = m4 / (var * var) - 3.0;
            CHECK(excess_kurtosis == doctest::Approx(3.0).epsilon(0.2));
        }
    }
    SUBCASE("a non-identity covariance is reproduced") {
        Matrix omega(2, 2);
        omega << 2.0, 0.8, 0.8, 1.5;
        const auto truth = make_precision_set({omega});
        const int n = 20000;
        const auto s = simgen::sample_from(truth, {n}, simgen::Noise::gaussian, 23);
        const Matrix cov = s.X[0].transpose() * s.X[0] / n;
        const Matrix sigma = omega.inverse();
        CHECK((cov - sigma).cwiseAbs().maxCoeff() < 0.05);
    }
    SUBCASE("same seed reproduces the sample; classes are independent streams") {
        SimConfig cfg;
        cfg.k = 2;
        cfg.p = 8;
        cfg.seed = 31;
        const auto truth = simgen::gen_model1(cfg);
        const auto s1 = simgen::sample_from(truth, {20, 25}, simgen::Noise::gaussian, 77);
        const auto s2 = simgen::sample_from(truth, {20, 25}, simgen::Noise::gaussian, 77);
        for (int t = 0; t < 2; ++t) CHECK((s1.X[t] - s2.X[t]).cwiseAbs().maxCoeff() == 0.0);
        const auto s3 = simgen::sample_from(truth, {20, 25}, simgen::Noise::gaussian, 78);
        CHECK((s1.X[0] - s3.X[0]).cwiseAbs().maxCoeff() > 0.0);
    }
    SUBCASE("non-PD truth is rejected") {
        Matrix bad(2, 2);
        bad << 1.0, 2.0, 2.0, 1.0;
        PrecisionSet ps;
        ps.k = 1;
        ps.p = 2;
        ps.omega = {bad};
        CHECK_THROWS_AS(simgen::sample_from(ps, {10}, simgen::Noise::gaussian, 1), ValidationError);
    }
}

TEST_CASE("config validation") {
    SimConfig cfg;
    cfg.k = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.k = 1;
    cfg.p = 9;
    cfg.block_size = 8;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}
