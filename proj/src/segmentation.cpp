#include "gscp/segmentation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gscp {

std::vector<int> Segmentation::interior() const {
    if (tau.empty()) return {};
    return std::vector<int>(tau.begin(), tau.end() - 1);
}

void validate_segmentation(const Segmentation& seg, int T) {
    if (seg.tau.empty()) throw std::invalid_argument("empty segmentation");
    int prev = 0;
    for (int t : seg.tau) {
        if (t <= prev) throw std::invalid_argument("change-points must increase");
        prev = t;
    }
    if (seg.tau.back() != T)
        throw std::invalid_argument("segmentation must end at the horizon");
}

PrefixTable build_prefix(const SignalStream& ytilde) {
    const auto& y = ytilde.values;
    int T = static_cast<int>(y.rows());
    int p = static_cast<int>(y.cols());
    PrefixTable table;
    table.s1 = Eigen::MatrixXd::Zero(T + 1, p);
    table.s2 = Eigen::MatrixXd::Zero(T + 1, p);
    for (int t = 0; t < T; ++t) {
        table.s1.row(t + 1) = table.s1.row(t) + y.row(t);
        table.s2.row(t + 1) = table.s2.row(t) + y.row(t).array().square().matrix();
    }
    return table;
}

namespace {

void check_range(const PrefixTable& prefix, int a, int b) {
    if (a < 0 || b <= a || b > prefix.length())
        throw std::invalid_argument("segment range out of bounds");
}

}  // namespace

double shrunk_mean(const PrefixTable& prefix, int a, int b, int i,
                   double lambda, const Psd& psd) {
    check_range(prefix, a, b);
    double n = b - a;
    double m = (prefix.s1(b, i) - prefix.s1(a, i)) / n;
    return soft_threshold(m, lambda * psd.values()[i] / 2.0);
}

double segment_cost_l1(const PrefixTable& prefix, int a, int b, double lambda,
                       const Psd& psd) {
    check_range(prefix, a, b);
    const double T = prefix.length();
    const double n = b - a;
    double cost = 0.0;
    for (int i = 0; i < prefix.width(); ++i) {
        double s1 = prefix.s1(b, i) - prefix.s1(a, i);
        double s2 = prefix.s2(b, i) - prefix.s2(a, i);
        double mu = soft_threshold(s1 / n, lambda * psd.values()[i] / 2.0);
        cost += (s2 - 2.0 * mu * s1 + n * mu * mu) / (T * psd.values()[i]) +
                lambda * n * std::abs(mu) / T;
    }
    return cost;
}

Eigen::MatrixXd shrunk_segment_means(const PrefixTable& prefix,
                                     const Segmentation& seg, double lambda,
                                     const Psd& psd) {
    int d = seg.num_segments();
    int p = prefix.width();
    Eigen::MatrixXd means(d, p);
    for (int l = 0; l < d; ++l)
        for (int i = 0; i < p; ++i)
            means(l, i) = shrunk_mean(prefix, seg.segment_begin(l),
                                      seg.segment_end(l), i, lambda, psd);
    return means;
}

CostTable::CostTable(int T, double fill)
    : T_(T), v_(static_cast<size_t>(T + 1) * (T + 1), fill) {
    if (T < 1) throw std::invalid_argument("cost table needs a positive horizon");
}

DpResult dp_segment(const CostTable& costs, int max_segments,
                    int min_segment_length) {
    const int T = costs.horizon();
    if (max_segments < 1 || max_segments > T)
        throw std::invalid_argument("max_segments must lie in [1, T]");
    if (min_segment_length < 1)
        throw std::invalid_argument("min_segment_length must be positive");

    const int msl = min_segment_length;
    const int dmax = std::min(max_segments, T / msl);
    const double inf = std::numeric_limits<double>::infinity();

    // best[k][t]: optimal cost of covering (0, t] with exactly k+1 segments.
    std::vector<std::vector<double>> best(dmax, std::vector<double>(T + 1, inf));
    std::vector<std::vector<int>> from(dmax, std::vector<int>(T + 1, -1));

    for (int t = msl; t <= T; ++t) {
        best[0][t] = costs.at(0, t);
        from[0][t] = 0;
    }
    for (int k = 1; k < dmax; ++k) {
        for (int t = (k + 1) * msl; t <= T; ++t) {
            double b = inf;
            int arg = -1;
            // Ascending s with strict improvement keeps the smallest
            // last change-point on ties.
            for (int s = k * msl; s + msl <= t; ++s) {
                if (best[k - 1][s] == inf) continue;
                double cand = best[k - 1][s] + costs.at(s, t);
                if (cand < b) {
                    b = cand;
                    arg = s;
                }
            }
            best[k][t] = b;
            from[k][t] = arg;
        }
    }

    DpResult result;
    for (int d = 1; d <= dmax; ++d) {
        if (best[d - 1][T] == inf) break;
        Segmentation seg;
        seg.tau.resize(d);
        int t = T;
        for (int k = d - 1; k >= 0; --k) {
            seg.tau[k] = t;
            t = from[k][t];
        }
        result.segmentations.push_back(std::move(seg));
        result.costs.push_back(best[d - 1][T]);
    }
    return result;
}

PenaltyConstants default_constants(int p, int T, double L) {
    if (p < 1 || T < 1) throw std::invalid_argument("p and T must be positive");
    if (!(L > std::log(2.0)))
        throw std::invalid_argument("L must exceed log 2");
    const double r2 = std::sqrt(2.0);
    PenaltyConstants c;
    c.lambda = 3.0 * r2 * std::sqrt(std::log(static_cast<double>(p)) + L) / T;
    c.c1 = 6.0 * r2;
    c.c2 = 3.0 * r2;
    return c;
}

DetectionResult lasso_detector(const SignalStream& ytilde_std, double lambda,
                               double c1, double c2, int max_segments,
                               int min_segment_length) {
    if (ytilde_std.domain != Domain::spectral)
        throw std::invalid_argument("detector expects a spectral stream");
    const int T = ytilde_std.length();
    const int p = ytilde_std.width();
    if (max_segments < 1 || max_segments > T)
        throw std::invalid_argument("max_segments must lie in [1, T]");

    PrefixTable prefix = build_prefix(ytilde_std);
    Psd unit(Eigen::VectorXd::Ones(p));
    auto costs = CostTable::from(T, [&](int a, int b) {
        return segment_cost_l1(prefix, a, b, lambda, unit);
    });
    DpResult dp = dp_segment(costs, max_segments, min_segment_length);

    int best_d = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int d = 1; d <= dp.max_feasible(); ++d) {
        double penalized =
            dp.costs[d - 1] + d * (c1 + c2 * std::log(static_cast<double>(T) / d)) / T;
        if (penalized < best) {
            best = penalized;
            best_d = d;
        }
    }

    DetectionResult result;
    result.segmentation = dp.segmentations[best_d - 1];
    result.means = shrunk_segment_means(prefix, result.segmentation, lambda, unit);
    result.lambda = lambda;
    result.cost_curve = dp.costs;
    result.selected_d = best_d;
    result.diagnostics.detector = "lasso";
    result.diagnostics.c1 = c1;
    result.diagnostics.c2 = c2;
    return result;
}

}  // namespace gscp
