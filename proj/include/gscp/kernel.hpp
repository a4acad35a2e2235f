#ifndef GSCP_KERNEL_HPP
#define GSCP_KERNEL_HPP

#include "gscp/model_selection.hpp"

namespace gscp {

enum class KernelKind { linear, laplacian, gaussian };

struct KernelSpec {
    KernelKind kind = KernelKind::linear;
    double bandwidth = 0.0;  // gaussian only; <= 0 selects the median heuristic
};

/// Median of pairwise squared distances divided by 2.
double median_heuristic_bandwidth(const SignalStream& y);

/// T x T Gram matrix. The laplacian kind k(x, y) = x^T S y requires the
/// shift operator.
Eigen::MatrixXd gram(const SignalStream& y, const KernelSpec& spec,
                     const ShiftOperator* s = nullptr);

/// Segment costs sum k(y_t, y_t) - mean of the within-segment Gram block,
/// evaluated in O(b - a) from row-cumulative sums.
class KernelCostTable {
public:
    explicit KernelCostTable(const Eigen::MatrixXd& gram_matrix);

    /// Un-normalized within-segment scatter over rows (a, b).
    double segment_cost(int a, int b) const;

    int horizon() const { return static_cast<int>(diag_prefix_.size()) - 1; }

private:
    Eigen::VectorXd diag_prefix_;  // T+1
    Eigen::MatrixXd row_prefix_;   // T x (T+1)
};

inline double kernel_segment_cost(const KernelCostTable& table, int a, int b) {
    return table.segment_cost(a, b);
}

struct KernelConfig {
    KernelSpec spec;
    int max_segments = 0;  // 0 = automatic
    int min_segment_length = 1;
    RobustRegression regression = RobustRegression::huber;
    bool allow_relaxed_calibration = true;
};

/// DP over kernel segment costs (normalized by T) with the number of
/// change-points chosen by a slope-heuristic penalty d/T (k2 + k3
/// log(T/d)). Produces no segment means.
DetectionResult kernel_detector(const SignalStream& y, const KernelConfig& config,
                                const ShiftOperator* s = nullptr);

}  // namespace gscp

#endif
