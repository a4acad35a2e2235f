#include "gscp/spectral.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace gscp {

namespace {
constexpr double kFloorRatio = 1e-8;
}

Psd::Psd(Eigen::VectorXd raw) : values_(std::move(raw)) {
    if (values_.size() == 0) throw std::invalid_argument("empty psd");
    if (!values_.allFinite()) throw std::invalid_argument("psd entries must be finite");
    if (values_.minCoeff() < 0) throw std::invalid_argument("psd entries must be nonnegative");
    double top = values_.maxCoeff();
    floor_ = top > 0 ? kFloorRatio * top : kFloorRatio;
    values_ = values_.cwiseMax(floor_);
}

Psd estimate_psd_ml(const SignalStream& ytilde, int window) {
    if (ytilde.domain != Domain::spectral)
        throw std::invalid_argument("psd estimation expects a spectral stream");
    if (window < 2) throw std::invalid_argument("window must be at least 2");
    if (window > ytilde.length())
        throw std::invalid_argument("window exceeds stream length");

    auto head = ytilde.values.topRows(window);
    Eigen::RowVectorXd mean = head.colwise().mean();
    Eigen::VectorXd var =
        (head.rowwise() - mean).array().square().colwise().sum().transpose() / window;
    return Psd(std::move(var));
}

SignalStream standardize(const SignalStream& ytilde, const Psd& psd) {
    if (ytilde.domain != Domain::spectral)
        throw std::invalid_argument("standardize expects a spectral stream");
    if (psd.dim() != ytilde.width())
        throw std::invalid_argument("psd length does not match stream width");
    Eigen::ArrayXd scale = psd.values().array().sqrt().inverse();
    SignalStream out{ytilde.values, Domain::spectral};
    out.values.array().rowwise() *= scale.transpose();
    return out;
}

SignalStream apply_filter(const SpectralBasis& basis, const GraphFilter& f,
                          const SignalStream& y) {
    if (y.domain != Domain::vertex)
        throw std::invalid_argument("apply_filter expects a vertex-domain stream");
    if (y.width() != basis.dim() || f.response.size() != basis.dim())
        throw std::invalid_argument("filter/basis/stream dimensions disagree");
    // Row-wise U diag(h) U^T y_t.
    Eigen::MatrixXd spectral = y.values * basis.eigenvectors;
    spectral.array().rowwise() *= f.response.transpose().array();
    return SignalStream{spectral * basis.eigenvectors.transpose(), Domain::vertex};
}

std::vector<GraphFilter> gaussian_filter_bank(const Eigen::VectorXd& eigenvalues,
                                              int count) {
    if (count < 2) throw std::invalid_argument("need at least two filters");
    double lo = eigenvalues.minCoeff();
    double hi = eigenvalues.maxCoeff();
    double sigma = (hi - lo) / count;
    if (sigma <= 0) sigma = 1.0;  // degenerate all-equal spectrum
    std::vector<GraphFilter> bank;
    bank.reserve(count);
    for (int m = 0; m < count; ++m) {
        double center = lo + (hi - lo) * m / (count - 1);
        Eigen::VectorXd h =
            (-(eigenvalues.array() - center).square() / (2 * sigma * sigma)).exp();
        bank.push_back(GraphFilter{std::move(h)});
    }
    return bank;
}

Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                     int max_sweeps, double tol, int* sweeps_used) {
    if (a.rows() != b.size()) throw std::invalid_argument("nnls dimension mismatch");
    int p = static_cast<int>(a.cols());
    Eigen::MatrixXd g = a.transpose() * a;
    Eigen::VectorXd c = a.transpose() * b;
    if (!g.allFinite() || !c.allFinite())
        throw std::runtime_error("nnls system is not finite");

    Eigen::VectorXd x = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd gx = Eigen::VectorXd::Zero(p);  // g * x, kept incrementally
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        double shift = 0.0;
        for (int i = 0; i < p; ++i) {
            double gii = g(i, i);
            if (gii <= 0) continue;  // column absent from the system
            double xi = std::max(0.0, x[i] + (c[i] - gx[i]) / gii);
            double delta = xi - x[i];
            if (delta != 0.0) {
                gx += delta * g.col(i);
                x[i] = xi;
                shift = std::max(shift, std::abs(delta) * std::sqrt(gii));
            }
        }
        if (shift <= tol * (1.0 + x.norm())) break;
    }
    if (sweeps_used) *sweeps_used = sweep;
    return x;
}

Psd estimate_psd_filterbank(const SpectralBasis& basis, const SignalStream& y,
                            int window, int num_filters, int noise_probes,
                            std::uint64_t seed, FilterbankInfo* info) {
    if (y.domain != Domain::vertex)
        throw std::invalid_argument("filterbank estimation expects a vertex stream");
    if (y.width() != basis.dim())
        throw std::invalid_argument("stream width does not match basis dimension");
    if (window < 2) throw std::invalid_argument("window must be at least 2");
    if (window > y.length()) throw std::invalid_argument("window exceeds stream length");
    if (num_filters < 2) throw std::invalid_argument("need at least two filters");
    if (noise_probes < 1) throw std::invalid_argument("need at least one noise probe");

    const int p = basis.dim();
    auto bank = gaussian_filter_bank(basis.eigenvalues, num_filters);

    // Mean-removed spectral coefficients of the warm-up window.
    Eigen::MatrixXd head = y.values.topRows(window) * basis.eigenvectors;
    Eigen::RowVectorXd mean = head.colwise().mean();
    head.rowwise() -= mean;
    Eigen::VectorXd coeff_energy =
        head.array().square().colwise().mean().transpose();  // E[ytilde_i^2]

    // White-noise probes drawn once, in the spectral domain, so the
    // estimate depends on the spectrum alone and not on node labels.
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd probes(noise_probes, p);
    for (int k = 0; k < noise_probes; ++k)
        for (int i = 0; i < p; ++i) probes(k, i) = normal(rng);
    Eigen::VectorXd probe_energy =
        probes.array().square().colwise().mean().transpose();

    // System rows: filtered-signal energy = sum_i gain_m(i)^2 P(i), with
    // the squared gains estimated through the probes.
    Eigen::MatrixXd a(num_filters, p);
    Eigen::VectorXd e(num_filters);
    for (int m = 0; m < num_filters; ++m) {
        Eigen::ArrayXd g2 = bank[m].response.array().square();
        a.row(m) = (g2 * probe_energy.array()).matrix().transpose();
        e[m] = (g2 * coeff_energy.array()).sum();
    }

    Eigen::MatrixXd gram = a.transpose() * a;
    if (!gram.allFinite()) {
        throw std::runtime_error("filterbank system is singular: non-finite entries");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    double emax = es.eigenvalues().maxCoeff();
    double emin = std::max(es.eigenvalues().minCoeff(), 0.0);
    double condition = emin > 0 ? emax / emin : std::numeric_limits<double>::infinity();
    if (info) info->condition = condition;
    if (!(emax > 0)) {
        std::ostringstream msg;
        msg << "filterbank system is singular (condition " << condition << ")";
        throw std::runtime_error(msg.str());
    }

    int sweeps = 0;
    Eigen::VectorXd recovered = nnls(a, e, 4000, 1e-12, &sweeps);
    if (info) info->nnls_sweeps = sweeps;
    if (!recovered.allFinite()) {
        std::ostringstream msg;
        msg << "filterbank recovery failed (condition " << condition << ")";
        throw std::runtime_error(msg.str());
    }
    return Psd(std::move(recovered));
}

}  // namespace gscp
