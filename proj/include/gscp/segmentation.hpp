#ifndef GSCP_SEGMENTATION_HPP
#define GSCP_SEGMENTATION_HPP

#include <functional>
#include <string>
#include <vector>

#include "gscp/spectral.hpp"

namespace gscp {

/// Ordered change-point set tau_1 < ... < tau_d with tau_d = T (tau_0 = 0
/// implicit). d = tau.size() is the number of segments; segment l
/// (1-based) covers timestamps (tau_{l-1}, tau_l], i.e. rows
/// [tau_{l-1}, tau_l) of a 0-based T x p matrix.
struct Segmentation {
    std::vector<int> tau;

    int num_segments() const { return static_cast<int>(tau.size()); }
    int horizon() const { return tau.empty() ? 0 : tau.back(); }

    /// Change-points without the mandatory final T.
    std::vector<int> interior() const;

    int segment_begin(int l) const { return l == 0 ? 0 : tau[l - 1]; }
    int segment_end(int l) const { return tau[l]; }
    int segment_length(int l) const { return segment_end(l) - segment_begin(l); }

    bool operator==(const Segmentation&) const = default;
};

void validate_segmentation(const Segmentation& seg, int T);

/// Cumulative first and second moments per column, row 0 = zeros, so any
/// segment statistic is an O(1) difference.
struct PrefixTable {
    Eigen::MatrixXd s1;  // (T+1) x p
    Eigen::MatrixXd s2;

    int length() const { return static_cast<int>(s1.rows()) - 1; }
    int width() const { return static_cast<int>(s1.cols()); }
};

PrefixTable build_prefix(const SignalStream& ytilde);

inline double soft_threshold(double x, double t) {
    double mag = std::abs(x) - t;
    return mag > 0 ? (x > 0 ? mag : -mag) : 0.0;
}

/// Closed-form penalized segment mean for frequency i over rows (a, b]:
/// soft threshold of the empirical mean at level lambda * psd[i] / 2.
double shrunk_mean(const PrefixTable& prefix, int a, int b, int i,
                   double lambda, const Psd& psd);

/// l1-penalized segment cost over rows (a, b]: per-frequency residual of
/// the shrunk mean weighted by 1 / (T * psd[i]) plus the l1 term, both with
/// the 1/T normalization. Nonnegative.
double segment_cost_l1(const PrefixTable& prefix, int a, int b, double lambda,
                       const Psd& psd);

/// Shrunk means for every segment and frequency. Rows align with segments;
/// entries are exactly zero where thresholded out.
Eigen::MatrixXd shrunk_segment_means(const PrefixTable& prefix,
                                     const Segmentation& seg, double lambda,
                                     const Psd& psd);

/// Dense cost table over all half-open row ranges [a, b), 0 <= a < b <= T.
class CostTable {
public:
    explicit CostTable(int T, double fill = 0.0);

    double& at(int a, int b) { return v_[static_cast<size_t>(a) * (T_ + 1) + b]; }
    double at(int a, int b) const { return v_[static_cast<size_t>(a) * (T_ + 1) + b]; }
    int horizon() const { return T_; }

    template <class F>
    static CostTable from(int T, F&& cost) {
        CostTable t(T);
        for (int a = 0; a < T; ++a)
            for (int b = a + 1; b <= T; ++b) t.at(a, b) = cost(a, b);
        return t;
    }

private:
    int T_;
    std::vector<double> v_;
};

/// Optimal segmentations for every model size d = 1..max_segments (index
/// d - 1). Entries for infeasible d (d * min_segment_length > T) are
/// absent: size() may be smaller than max_segments.
struct DpResult {
    std::vector<Segmentation> segmentations;
    std::vector<double> costs;

    int max_feasible() const { return static_cast<int>(costs.size()); }
};

/// Exact dynamic program over additive segment costs. Ties are broken
/// toward the smallest last change-point, which makes the output
/// deterministic.
DpResult dp_segment(const CostTable& costs, int max_segments,
                    int min_segment_length = 1);

struct PenaltyConstants {
    double lambda = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
};

/// Default penalization constants for a standardized stream:
/// lambda = 3*sqrt(2)*sqrt(log p + L)/T, c1 = 6*sqrt(2), c2 = 3*sqrt(2).
/// Requires L > log 2.
PenaltyConstants default_constants(int p, int T, double L);

struct DetectionDiagnostics {
    std::string detector;
    std::string psd_mode;
    double c1 = 0.0, c2 = 0.0;        // direct-penalty constants
    double k1 = 0.0, k2 = 0.0, k3 = 0.0;  // calibrated constants
    bool relaxed_calibration = false;
    double psd_condition = 0.0;
};

struct DetectionResult {
    Segmentation segmentation;
    Eigen::MatrixXd means;           // num_segments x p; empty for kernels
    double lambda = 0.0;
    std::vector<double> cost_curve;  // optimal cost per d = 1..Dmax
    int selected_d = 0;
    DetectionDiagnostics diagnostics;
};

/// Penalized-likelihood detector on a standardized spectral stream
/// (unit-variance columns): exact DP per model size, then
/// d_hat = argmin_d cost_d + d/T * (c1 + c2 log(T/d)), means recovered by
/// soft thresholding at level lambda/2.
DetectionResult lasso_detector(const SignalStream& ytilde_std, double lambda,
                               double c1, double c2, int max_segments,
                               int min_segment_length = 1);

}  // namespace gscp

#endif
