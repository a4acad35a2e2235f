#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gscp/spectral.hpp"
#include "gscp/synthetic.hpp"

using namespace gscp;

namespace {

SignalStream spectral_noise(int T, const Eigen::VectorXd& variances,
                            std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    SignalStream y;
    y.domain = Domain::spectral;
    y.values.resize(T, variances.size());
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < variances.size(); ++i)
            y.values(t, i) = std::sqrt(variances[i]) * normal(rng);
    return y;
}

SignalStream white_noise(int T, int p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    SignalStream y;
    y.domain = Domain::vertex;
    y.values.resize(T, p);
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < p; ++i) y.values(t, i) = normal(rng);
    return y;
}

}  // namespace

TEST_CASE("psd clamps entries up to the floor") {
    Eigen::VectorXd raw(3);
    raw << 4.0, 0.0, 1e-20;
    Psd p(raw);
    CHECK(p.floor() == Catch::Approx(4e-8));
    CHECK(p.values()[0] == 4.0);
    CHECK(p.values()[1] == Catch::Approx(4e-8));
    CHECK(p.values()[2] == Catch::Approx(4e-8));
    CHECK_THROWS_AS(Psd(Eigen::VectorXd::Constant(2, -1.0)), std::invalid_argument);
}

TEST_CASE("ml psd of a constant stream is the floor vector") {
    SignalStream y;
    y.domain = Domain::spectral;
    y.values = Eigen::MatrixXd::Constant(10, 3, 7.0);
    Psd p = estimate_psd_ml(y, 10);
    // zero variance everywhere: the all-zero estimate falls back to an
    // absolute floor
    CHECK(p.values().minCoeff() == p.values().maxCoeff());
    CHECK(p.values()[0] == Catch::Approx(1e-8));
}

TEST_CASE("ml psd recovers a diagonal gaussian within 5 percent") {
    Eigen::VectorXd truth(2);
    truth << 1.0, 4.0;
    SignalStream y = spectral_noise(5000, truth, 77);
    Psd p = estimate_psd_ml(y, 5000);
    CHECK(p.values()[0] == Catch::Approx(1.0).epsilon(0.05));
    CHECK(p.values()[1] == Catch::Approx(4.0).epsilon(0.05));
}

TEST_CASE("ml psd clamps a deterministic frequency to the floor") {
    Eigen::VectorXd truth(2);
    truth << 1.0, 0.0;  // second frequency identically zero
    SignalStream y = spectral_noise(200, truth, 5);
    Psd p = estimate_psd_ml(y, y.length());
    CHECK(p.values()[1] == Catch::Approx(p.floor()));
    CHECK(p.values()[0] > 0.5);
}

TEST_CASE("ml psd validates the window") {
    SignalStream y = spectral_noise(10, Eigen::VectorXd::Ones(2), 1);
    CHECK_THROWS_AS(estimate_psd_ml(y, 1), std::invalid_argument);
    CHECK_THROWS_AS(estimate_psd_ml(y, 11), std::invalid_argument);
}

TEST_CASE("standardize divides by the per-frequency scale") {
    Eigen::VectorXd raw(2);
    raw << 4.0, 1.0;
    Psd p(raw);
    SignalStream y;
    y.domain = Domain::spectral;
    y.values.resize(1, 2);
    y.values << 2.0, 3.0;
    SignalStream z = standardize(y, p);
    CHECK(z.values(0, 0) == Catch::Approx(1.0));
    CHECK(z.values(0, 1) == Catch::Approx(3.0));
}

TEST_CASE("standardize with a unit psd is the identity") {
    Psd p(Eigen::VectorXd::Ones(4));
    SignalStream y = spectral_noise(6, Eigen::VectorXd::Ones(4), 13);
    SignalStream z = standardize(y, p);
    CHECK((z.values - y.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("standardized noise has unit sample variance") {
    Eigen::VectorXd truth(3);
    truth << 0.5, 2.0, 9.0;
    SignalStream y = spectral_noise(5000, truth, 99);
    Psd p = estimate_psd_ml(y, 5000);
    SignalStream z = standardize(y, p);
    for (int i = 0; i < 3; ++i) {
        const auto col = z.values.col(i);
        double mean = col.mean();
        double var = (col.array() - mean).square().sum() / z.length();
        CHECK(var > 0.9);
        CHECK(var < 1.1);
    }
}

TEST_CASE("apply_filter with a unit response is the identity") {
    Graph g(3, {{0, 1}, {1, 2}});
    SpectralBasis b = eigendecompose(build_laplacian(g));
    SignalStream y = white_noise(5, 3, 3);
    GraphFilter f{Eigen::VectorXd::Ones(3)};
    SignalStream z = apply_filter(b, f, y);
    CHECK((z.values - y.values).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("apply_filter with a zero response annihilates the stream") {
    Graph g(3, {{0, 1}, {1, 2}});
    SpectralBasis b = eigendecompose(build_laplacian(g));
    SignalStream y = white_noise(5, 3, 4);
    GraphFilter f{Eigen::VectorXd::Zero(3)};
    CHECK(apply_filter(b, f, y).values.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("apply_filter acts as pointwise multiplication in the spectrum") {
    Graph g(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
    SpectralBasis b = eigendecompose(build_laplacian(g));
    SignalStream y = white_noise(6, 4, 8);
    GraphFilter f{(Eigen::VectorXd(4) << 0.3, -1.2, 2.0, 0.0).finished()};
    SignalStream z = apply_filter(b, f, y);
    Eigen::MatrixXd want =
        gft(b, y).values.array().rowwise() * f.response.transpose().array();
    CHECK((gft(b, z).values - want).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("filtered white noise is stationary in the spectral domain") {
    // Filtered white noise must have a diagonal spectral covariance equal to
    // the squared frequency response.
    Graph g = gen_er(30, 0.3, 2024);
    SpectralBasis b = eigendecompose(build_laplacian(g));
    GraphFilter f = scenario_filter(Scenario::I, b.eigenvalues);

    const int n = 20000;
    SignalStream z = gft(b, apply_filter(b, f, white_noise(n, 30, 11)));
    Eigen::MatrixXd centered =
        z.values.rowwise() - z.values.colwise().mean();
    Eigen::MatrixXd cov = centered.transpose() * centered / n;

    Eigen::VectorXd h2 = f.response.array().square();
    for (int i = 0; i < 30; ++i) {
        CHECK(cov(i, i) == Catch::Approx(h2[i]).epsilon(0.10));
        for (int j = i + 1; j < 30; ++j) {
            // var(x y) = P_i P_j for independent gaussians
            double se = std::sqrt(h2[i] * h2[j] / n);
            CHECK(std::abs(cov(i, j)) < 5 * se);
        }
    }
}

TEST_CASE("nnls solves an invertible system exactly") {
    Eigen::MatrixXd a(2, 2);
    a << 2.0, 1.0, 1.0, 3.0;
    Eigen::VectorXd x_true(2);
    x_true << 0.7, 1.4;
    Eigen::VectorXd x = nnls(a, a * x_true);
    CHECK((x - x_true).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("nnls clamps negative coordinates at zero") {
    // Unconstrained solution is (-1, 2); the nonnegative optimum zeroes the
    // first coordinate.
    Eigen::MatrixXd a(2, 2);
    a << 1.0, 0.0, 0.0, 1.0;
    Eigen::VectorXd b(2);
    b << -1.0, 2.0;
    Eigen::VectorXd x = nnls(a, b);
    CHECK(x[0] == 0.0);
    CHECK(x[1] == Catch::Approx(2.0));
}

TEST_CASE("gaussian filter bank spans the spectrum") {
    Eigen::VectorXd theta(4);
    theta << 0.0, 1.0, 2.0, 6.0;
    auto bank = gaussian_filter_bank(theta, 5);
    REQUIRE(bank.size() == 5);
    // centers run from theta_min to theta_max, so the first filter peaks at
    // the smallest eigenvalue and the last at the largest
    CHECK(bank.front().response[0] == Catch::Approx(1.0));
    CHECK(bank.back().response[3] == Catch::Approx(1.0));
    for (const GraphFilter& f : bank) {
        CHECK(f.response.minCoeff() >= 0.0);
        CHECK(f.response.maxCoeff() <= 1.0 + 1e-12);
    }
}

TEST_CASE("filterbank psd recovers a flat spectrum") {
    Graph g = gen_er(20, 0.3, 7);
    SpectralBasis b = eigendecompose(build_laplacian(g));
    // unit-response filter: the observed signal is already white with P = 1.
    // Pointwise accuracy is limited by the white-noise probes (error ~ 1/sqrt(K)),
    // so the per-frequency band is loose while the overall level is tight.
    SignalStream y = white_noise(4000, 20, 15);
    Psd p = estimate_psd_filterbank(b, y, 4000, 60, 200, 42);
    CHECK(p.values().mean() == Catch::Approx(1.0).epsilon(0.05));
    for (int i = 0; i < 20; ++i) {
        CHECK(p.values()[i] > 0.5);
        CHECK(p.values()[i] < 1.5);
    }
}

TEST_CASE("filterbank psd is invariant to node relabeling") {
    Graph g = gen_er(15, 0.4, 91);
    SignalStream y = white_noise(300, 15, 33);

    // relabeled copy: node v -> (v + 3) % 15
    auto relabel = [](int v) { return (v + 3) % 15; };
    std::vector<Edge> edges;
    for (const Edge& e : g.edges()) {
        int u = relabel(e.u), v = relabel(e.v);
        if (u > v) std::swap(u, v);
        edges.push_back({u, v, e.weight});
    }
    Graph gp(15, edges);
    SignalStream yp;
    yp.domain = Domain::vertex;
    yp.values.resize(y.length(), 15);
    for (int v = 0; v < 15; ++v) yp.values.col(relabel(v)) = y.values.col(v);

    SpectralBasis b = eigendecompose(build_laplacian(g));
    SpectralBasis bp = eigendecompose(build_laplacian(gp));
    Psd p1 = estimate_psd_filterbank(b, y, 300, 40, 10, 5);
    Psd p2 = estimate_psd_filterbank(bp, yp, 300, 40, 10, 5);
    CHECK((p1.values() - p2.values()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("filterbank psd reports conditioning diagnostics") {
    Graph g = gen_er(10, 0.5, 3);
    SpectralBasis b = eigendecompose(build_laplacian(g));
    SignalStream y = white_noise(100, 10, 8);
    FilterbankInfo info;
    estimate_psd_filterbank(b, y, 100, 30, 5, 1, &info);
    CHECK(info.condition > 0.0);
    CHECK(info.nnls_sweeps > 0);
}

TEST_CASE("filterbank psd validates the window") {
    Graph g(2, {{0, 1}});
    SpectralBasis b = eigendecompose(build_laplacian(g));
    SignalStream y = white_noise(10, 2, 1);
    CHECK_THROWS_AS(estimate_psd_filterbank(b, y, 1, 10, 2, 0),
                    std::invalid_argument);
}
