#ifndef GSCP_EVALUATION_HPP
#define GSCP_EVALUATION_HPP

#include <functional>

#include "gscp/segmentation.hpp"
#include "gscp/synthetic.hpp"

namespace gscp {

/// Hausdorff distance between interior change-point sets. When exactly one
/// side is empty the distance is the largest min(tau, T - tau) of the
/// other side; two empty sets are at distance 0.
double hausdorff(const std::vector<int>& pred, const std::vector<int>& truth,
                 int T);

/// Rand index of the two segmentations viewed as clusterings of {1..T}:
/// agreeing pairs over C(T, 2), from segment overlap counts.
double rand_index(const std::vector<int>& pred, const std::vector<int>& truth,
                  int T);

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// One-to-many matching within the margin. An empty prediction scores
/// precision 0 by convention.
Prf precision_recall_f1(const std::vector<int>& pred,
                        const std::vector<int>& truth, int margin = 10);

struct MetricStats {
    double mean = 0.0;
    double stddev = 0.0;  // population
};

MetricStats summarize(const std::vector<double>& xs);

struct DetectorMetrics {
    std::string name;
    MetricStats hausdorff;
    MetricStats rand;
    MetricStats precision;
    MetricStats recall;
    MetricStats f1;
    std::vector<double> per_instance_hausdorff;
    std::vector<double> per_instance_rand;
    std::vector<double> per_instance_precision;
    std::vector<double> per_instance_recall;
    std::vector<double> per_instance_f1;
};

struct MetricsReport {
    std::string scenario;
    int instances = 0;
    int margin = 10;
    std::vector<DetectorMetrics> detectors;
};

using DetectorFn = std::function<DetectionResult(const ScenarioInstance&)>;

struct NamedDetector {
    std::string name;
    DetectorFn run;
};

/// Instance i is generated with seed base.seed + i and handed to every
/// detector; metrics use interior change-points only. Instances run
/// concurrently (GSCP_THREADS workers); aggregation is order-independent.
MetricsReport run_benchmark(const ScenarioConfig& base,
                            const std::vector<NamedDetector>& detectors,
                            int n_instances, int margin = 10);

/// Aligned text table, one detector per row, std in parentheses.
std::string format_report(const MetricsReport& report);

}  // namespace gscp

#endif
