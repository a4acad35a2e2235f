#ifndef GSCP_SPECTRAL_HPP
#define GSCP_SPECTRAL_HPP

#include <cstdint>

#include "gscp/graph.hpp"

namespace gscp {

/// Per-frequency variance vector of a stationary stream. Entries are
/// clamped from below at a floor of 1e-8 times the largest entry (absolute
/// 1e-8 when the whole vector is zero) so downstream division is safe.
class Psd {
public:
    Psd() = default;
    explicit Psd(Eigen::VectorXd raw);

    const Eigen::VectorXd& values() const { return values_; }
    int dim() const { return static_cast<int>(values_.size()); }
    double floor() const { return floor_; }

private:
    Eigen::VectorXd values_;
    double floor_ = 0.0;
};

/// Frequency response of a graph filter: one gain per eigenvalue.
struct GraphFilter {
    Eigen::VectorXd response;
};

/// Sample variance per spectral coefficient over the first `window` rows,
/// window mean removed, divisor = window.
Psd estimate_psd_ml(const SignalStream& ytilde, int window);

struct FilterbankInfo {
    double condition = 0.0;   // cond(A^T A) of the recovery system
    int nnls_sweeps = 0;
};

/// Filter-bank estimator: num_filters Gaussian band-pass responses spread
/// over the eigenvalue range measure the filtered signal energy; the
/// filter gains at each frequency are estimated from noise_probes seeded
/// white-noise draws; the per-frequency variances are recovered with
/// nonnegative least squares. Deterministic given the seed.
Psd estimate_psd_filterbank(const SpectralBasis& basis, const SignalStream& y,
                            int window, int num_filters, int noise_probes,
                            std::uint64_t seed, FilterbankInfo* info = nullptr);

/// Divide column i by sqrt(psd[i]) so each frequency has unit noise
/// variance.
SignalStream standardize(const SignalStream& ytilde, const Psd& psd);

/// z_t = U diag(h) U^T y_t applied row-wise.
SignalStream apply_filter(const SpectralBasis& basis, const GraphFilter& f,
                          const SignalStream& y);

/// Gaussian band-pass bank over [lo, hi]: center m spread uniformly,
/// common width (hi - lo) / count.
std::vector<GraphFilter> gaussian_filter_bank(const Eigen::VectorXd& eigenvalues,
                                              int count);

/// min ||Ax - b||^2 subject to x >= 0, by cyclic coordinate descent on the
/// normal equations. Deterministic.
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                     int max_sweeps = 4000, double tol = 1e-12,
                     int* sweeps_used = nullptr);

}  // namespace gscp

#endif
