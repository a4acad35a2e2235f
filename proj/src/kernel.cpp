#include "gscp/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "robust_fit.hpp"

namespace gscp {

namespace {

// Pairwise squared distances from norms and inner products.
Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& y) {
    Eigen::MatrixXd g = y * y.transpose();
    Eigen::VectorXd n = g.diagonal();
    Eigen::MatrixXd d = n.replicate(1, y.rows()) + n.transpose().replicate(y.rows(), 1) -
                        2.0 * g;
    return d.cwiseMax(0.0);  // guard tiny negatives from cancellation
}

}  // namespace

double median_heuristic_bandwidth(const SignalStream& y) {
    const int T = y.length();
    if (T < 2) throw std::invalid_argument("median heuristic needs two signals");
    Eigen::MatrixXd d2 = squared_distances(y.values);
    std::vector<double> v;
    v.reserve(static_cast<size_t>(T) * (T - 1) / 2);
    for (int t = 0; t < T; ++t)
        for (int u = t + 1; u < T; ++u) v.push_back(d2(t, u));
    auto mid = v.begin() + v.size() / 2;
    std::nth_element(v.begin(), mid, v.end());
    double med = *mid;
    if (v.size() % 2 == 0) {
        double lo = *std::max_element(v.begin(), mid);
        med = 0.5 * (lo + med);
    }
    return med / 2.0;
}

Eigen::MatrixXd gram(const SignalStream& y, const KernelSpec& spec,
                     const ShiftOperator* s) {
    if (y.length() < 1) throw std::invalid_argument("empty stream");
    switch (spec.kind) {
        case KernelKind::linear:
            return y.values * y.values.transpose();
        case KernelKind::laplacian: {
            if (s == nullptr)
                throw std::invalid_argument("laplacian kernel needs the shift operator");
            if (s->dim() != y.width())
                throw std::invalid_argument("shift operator does not match the stream");
            return y.values * s->matrix * y.values.transpose();
        }
        case KernelKind::gaussian: {
            double h = spec.bandwidth > 0 ? spec.bandwidth
                                          : median_heuristic_bandwidth(y);
            if (!(h > 0)) h = 1.0;  // all signals identical: kernel is constant
            Eigen::MatrixXd d2 = squared_distances(y.values);
            return (-d2 / (2.0 * h)).array().exp();
        }
    }
    throw std::logic_error("unknown kernel kind");
}

KernelCostTable::KernelCostTable(const Eigen::MatrixXd& gram_matrix) {
    const int T = static_cast<int>(gram_matrix.rows());
    if (gram_matrix.cols() != T || T < 1)
        throw std::invalid_argument("gram matrix must be square");
    diag_prefix_ = Eigen::VectorXd::Zero(T + 1);
    for (int t = 0; t < T; ++t)
        diag_prefix_[t + 1] = diag_prefix_[t] + gram_matrix(t, t);
    row_prefix_ = Eigen::MatrixXd::Zero(T, T + 1);
    for (int t = 0; t < T; ++t)
        for (int u = 0; u < T; ++u)
            row_prefix_(t, u + 1) = row_prefix_(t, u) + gram_matrix(t, u);
}

double KernelCostTable::segment_cost(int a, int b) const {
    const int T = horizon();
    if (a < 0 || b <= a || b > T)
        throw std::invalid_argument("segment range out of bounds");
    const double n = b - a;
    double block = 0.0;
    for (int t = a; t < b; ++t) block += row_prefix_(t, b) - row_prefix_(t, a);
    return diag_prefix_[b] - diag_prefix_[a] - block / n;
}

namespace {

struct KernelCalibration {
    double k2 = 0.0;
    double k3 = 0.0;
    bool relaxed = false;
};

KernelCalibration calibrate_kernel(const DpResult& dp, int T,
                                   RobustRegression kind, bool allow_relaxed) {
    std::vector<int> ds;
    double lt = std::log(static_cast<double>(T));
    double cutoff = lt > 0 ? 0.6 * T / lt : std::numeric_limits<double>::infinity();
    for (int d = 1; d <= dp.max_feasible(); ++d)
        if (d > cutoff) ds.push_back(d);

    bool relaxed = false;
    if (ds.size() < 4) {
        if (!allow_relaxed)
            throw CalibrationError(
                "slope heuristic needs at least 4 models above the complexity cutoff");
        if (dp.max_feasible() < 4)
            throw CalibrationError("slope heuristic needs at least 4 distinct models");
        relaxed = true;
        ds.clear();
        double low = 0.6 * dp.max_feasible();
        for (int d = 1; d <= dp.max_feasible(); ++d)
            if (d > low) ds.push_back(d);
        while (static_cast<int>(ds.size()) < 4) {
            // extend downward to the 4 highest-complexity models
            ds.insert(ds.begin(), ds.empty() ? dp.max_feasible() : ds.front() - 1);
        }
    }

    const int n = static_cast<int>(ds.size());
    Eigen::MatrixXd x(n, 3);
    Eigen::VectorXd y(n);
    for (int r = 0; r < n; ++r) {
        double dt = static_cast<double>(ds[r]) / T;
        x(r, 0) = 1.0;
        x(r, 1) = dt;
        x(r, 2) = dt * std::log(static_cast<double>(T) / ds[r]);
        y[r] = dp.costs[ds[r] - 1];
    }
    Eigen::VectorXd beta = detail::robust_fit(x, y, kind);
    KernelCalibration c;
    c.k2 = std::max(0.0, -2.0 * beta[1]);
    c.k3 = std::max(0.0, -2.0 * beta[2]);
    c.relaxed = relaxed;
    return c;
}

std::string kernel_name(KernelKind kind) {
    switch (kind) {
        case KernelKind::linear: return "kernel_linear";
        case KernelKind::laplacian: return "kernel_laplacian";
        case KernelKind::gaussian: return "kernel_gaussian";
    }
    return "kernel";
}

}  // namespace

DetectionResult kernel_detector(const SignalStream& y, const KernelConfig& config,
                                const ShiftOperator* s) {
    const int T = y.length();
    if (T < 2) throw std::invalid_argument("stream too short");

    KernelCostTable table(gram(y, config.spec, s));
    auto costs = CostTable::from(
        T, [&](int a, int b) { return table.segment_cost(a, b) / T; });

    int dmax = config.max_segments > 0
                   ? config.max_segments
                   : auto_max_segments(T, config.min_segment_length);
    DpResult dp = dp_segment(costs, dmax, config.min_segment_length);

    // With a single candidate the choice is forced and needs no calibration.
    KernelCalibration cal;
    if (dp.max_feasible() > 1)
        cal = calibrate_kernel(dp, T, config.regression,
                               config.allow_relaxed_calibration);

    int best_d = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int d = 1; d <= dp.max_feasible(); ++d) {
        double pen = dp.costs[d - 1] +
                     static_cast<double>(d) / T *
                         (cal.k2 + cal.k3 * std::log(static_cast<double>(T) / d));
        if (pen < best) {
            best = pen;
            best_d = d;
        }
    }

    DetectionResult result;
    result.segmentation = dp.segmentations[best_d - 1];
    result.cost_curve = dp.costs;
    result.selected_d = best_d;
    result.diagnostics.detector = kernel_name(config.spec.kind);
    result.diagnostics.k2 = cal.k2;
    result.diagnostics.k3 = cal.k3;
    result.diagnostics.relaxed_calibration = cal.relaxed;
    return result;
}

}  // namespace gscp
