#include "gscp/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "gscp/parallel.hpp"

namespace gscp {

namespace {

void check_interior(const std::vector<int>& cps, int T, const char* who) {
    int prev = 0;
    for (int t : cps) {
        if (t <= prev || t >= T)
            throw std::invalid_argument(std::string(who) +
                                        " change-points must be interior and ascending");
        prev = t;
    }
}

double directed(const std::vector<int>& from, const std::vector<int>& to) {
    double worst = 0.0;
    for (int a : from) {
        double best = std::numeric_limits<double>::infinity();
        for (int b : to) best = std::min(best, static_cast<double>(std::abs(a - b)));
        worst = std::max(worst, best);
    }
    return worst;
}

double edge_distance(const std::vector<int>& cps, int T) {
    double worst = 0.0;
    for (int t : cps)
        worst = std::max(worst, static_cast<double>(std::min(t, T - t)));
    return worst;
}

}  // namespace

double hausdorff(const std::vector<int>& pred, const std::vector<int>& truth,
                 int T) {
    if (T < 1) throw std::invalid_argument("horizon must be positive");
    check_interior(pred, T, "predicted");
    check_interior(truth, T, "true");
    if (pred.empty() && truth.empty()) return 0.0;
    if (pred.empty()) return edge_distance(truth, T);
    if (truth.empty()) return edge_distance(pred, T);
    return std::max(directed(pred, truth), directed(truth, pred));
}

double rand_index(const std::vector<int>& pred, const std::vector<int>& truth,
                  int T) {
    if (T < 1) throw std::invalid_argument("horizon must be positive");
    check_interior(pred, T, "predicted");
    check_interior(truth, T, "true");
    if (T == 1) return 1.0;

    auto boundaries = [T](const std::vector<int>& cps) {
        std::vector<int> b{0};
        b.insert(b.end(), cps.begin(), cps.end());
        b.push_back(T);
        return b;
    };
    std::vector<int> pb = boundaries(pred), tb = boundaries(truth);

    auto pairs = [](double n) { return n * (n - 1) / 2.0; };
    double same_pred = 0.0, same_truth = 0.0, same_both = 0.0;
    for (size_t i = 0; i + 1 < pb.size(); ++i) same_pred += pairs(pb[i + 1] - pb[i]);
    for (size_t j = 0; j + 1 < tb.size(); ++j) same_truth += pairs(tb[j + 1] - tb[j]);
    for (size_t i = 0; i + 1 < pb.size(); ++i)
        for (size_t j = 0; j + 1 < tb.size(); ++j) {
            int lo = std::max(pb[i], tb[j]);
            int hi = std::min(pb[i + 1], tb[j + 1]);
            if (hi > lo) same_both += pairs(hi - lo);
        }

    double total = pairs(T);
    double agree = total - same_pred - same_truth + 2.0 * same_both;
    return agree / total;
}

Prf precision_recall_f1(const std::vector<int>& pred,
                        const std::vector<int>& truth, int margin) {
    if (margin < 0) throw std::invalid_argument("margin must be nonnegative");
    auto matched = [margin](const std::vector<int>& from, const std::vector<int>& to) {
        if (from.empty()) return 0.0;  // vacuous score is 0 by convention
        int hit = 0;
        for (int a : from)
            for (int b : to)
                if (std::abs(a - b) <= margin) {
                    ++hit;
                    break;
                }
        return static_cast<double>(hit) / from.size();
    };
    Prf out;
    out.precision = matched(pred, truth);
    out.recall = matched(truth, pred);
    double s = out.precision + out.recall;
    out.f1 = s > 0 ? 2.0 * out.precision * out.recall / s : 0.0;
    return out;
}

MetricStats summarize(const std::vector<double>& xs) {
    MetricStats s;
    if (xs.empty()) return s;
    double n = static_cast<double>(xs.size());
    for (double x : xs) s.mean += x;
    s.mean /= n;
    double var = 0.0;
    for (double x : xs) var += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(var / n);  // population convention
    return s;
}

MetricsReport run_benchmark(const ScenarioConfig& base,
                            const std::vector<NamedDetector>& detectors,
                            int n_instances, int margin) {
    if (n_instances < 1) throw std::invalid_argument("need at least one instance");
    if (detectors.empty()) throw std::invalid_argument("need at least one detector");

    MetricsReport report;
    report.scenario = to_string(base.scenario);
    report.instances = n_instances;
    report.margin = margin;
    report.detectors.resize(detectors.size());
    for (size_t k = 0; k < detectors.size(); ++k) {
        DetectorMetrics& m = report.detectors[k];
        m.name = detectors[k].name;
        m.per_instance_hausdorff.resize(n_instances);
        m.per_instance_rand.resize(n_instances);
        m.per_instance_precision.resize(n_instances);
        m.per_instance_recall.resize(n_instances);
        m.per_instance_f1.resize(n_instances);
    }

    std::exception_ptr failure;
    std::mutex failure_lock;
    parallel_for(n_instances, [&](int i) {
        try {
            ScenarioConfig cfg = base;
            cfg.seed = base.seed + static_cast<std::uint64_t>(i);
            ScenarioInstance instance = gen_scenario(cfg);
            const std::vector<int>& truth = instance.truth.change_points;
            const int T = instance.truth.horizon;
            for (size_t k = 0; k < detectors.size(); ++k) {
                DetectionResult r = detectors[k].run(instance);
                std::vector<int> pred = r.segmentation.interior();
                DetectorMetrics& m = report.detectors[k];
                m.per_instance_hausdorff[i] = hausdorff(pred, truth, T);
                m.per_instance_rand[i] = rand_index(pred, truth, T);
                Prf prf = precision_recall_f1(pred, truth, margin);
                m.per_instance_precision[i] = prf.precision;
                m.per_instance_recall[i] = prf.recall;
                m.per_instance_f1[i] = prf.f1;
            }
        } catch (...) {
            std::lock_guard<std::mutex> hold(failure_lock);
            if (!failure) failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);

    for (DetectorMetrics& m : report.detectors) {
        m.hausdorff = summarize(m.per_instance_hausdorff);
        m.rand = summarize(m.per_instance_rand);
        m.precision = summarize(m.per_instance_precision);
        m.recall = summarize(m.per_instance_recall);
        m.f1 = summarize(m.per_instance_f1);
    }
    return report;
}

std::string format_report(const MetricsReport& report) {
    auto cell = [](const MetricStats& s) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f (%.2f)", s.mean, s.stddev);
        return std::string(buf);
    };

    std::vector<std::vector<std::string>> rows;
    rows.push_back({"Detector", "Hausdorff", "Rand", "Precision", "Recall", "F1"});
    for (const DetectorMetrics& m : report.detectors)
        rows.push_back({m.name, cell(m.hausdorff), cell(m.rand), cell(m.precision),
                        cell(m.recall), cell(m.f1)});

    std::vector<size_t> width(rows[0].size(), 0);
    for (const auto& row : rows)
        for (size_t c = 0; c < row.size(); ++c)
            width[c] = std::max(width[c], row[c].size());

    std::ostringstream out;
    out << "Scenario " << report.scenario << ", " << report.instances
        << " instances, margin " << report.margin << "\n";
    for (const auto& row : rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            out << row[c];
            if (c + 1 < row.size())
                out << std::string(width[c] - row[c].size() + 2, ' ');
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace gscp
