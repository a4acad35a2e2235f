#include "gscp/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "robust_fit.hpp"

namespace gscp {

namespace detail {

namespace {

double median(std::vector<double> v) {
    size_t n = v.size();
    auto mid = v.begin() + n / 2;
    std::nth_element(v.begin(), mid, v.end());
    if (n % 2 == 1) return *mid;
    double hi = *mid;
    double lo = *std::max_element(v.begin(), mid);
    return 0.5 * (lo + hi);
}

double mad_scale(const Eigen::VectorXd& r) {
    std::vector<double> v(r.data(), r.data() + r.size());
    double center = median(v);
    for (double& x : v) x = std::abs(x - center);
    return median(std::move(v)) / 0.6745;
}

}  // namespace

Eigen::VectorXd robust_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           RobustRegression kind) {
    const int n = static_cast<int>(x.rows());
    if (y.size() != n) throw std::invalid_argument("robust fit: size mismatch");
    if (n < x.cols())
        throw std::invalid_argument("robust fit needs at least as many rows as columns");

    Eigen::VectorXd beta = x.colPivHouseholderQr().solve(y);
    const double delta = 1.345;
    const double tiny = 1e-12 * (1.0 + y.cwiseAbs().maxCoeff());

    for (int iter = 0; iter < 100; ++iter) {
        Eigen::VectorXd r = y - x * beta;
        Eigen::VectorXd w(n);
        if (kind == RobustRegression::huber) {
            double s = mad_scale(r);
            if (s <= tiny) break;  // (near-)exact fit
            for (int i = 0; i < n; ++i) {
                double a = std::abs(r[i]);
                w[i] = a <= delta * s ? 1.0 : delta * s / a;
            }
        } else {
            for (int i = 0; i < n; ++i) w[i] = 1.0 / std::max(std::abs(r[i]), 1e-10);
        }
        Eigen::VectorXd sw = w.cwiseSqrt();
        Eigen::MatrixXd xw = sw.asDiagonal() * x;
        Eigen::VectorXd next = xw.colPivHouseholderQr().solve(sw.cwiseProduct(y));
        bool done = (next - beta).norm() <= 1e-10 * (1.0 + beta.norm());
        beta = next;
        if (done) break;
    }
    return beta;
}

}  // namespace detail

std::vector<int> lasso_support(const SignalStream& ytilde_std, double lambda) {
    if (ytilde_std.domain != Domain::spectral)
        throw std::invalid_argument("support extraction expects a spectral stream");
    if (lambda < 0) throw std::invalid_argument("lambda must be nonnegative");
    const auto& y = ytilde_std.values;
    const double thr = lambda * y.rows() / 2.0;
    std::vector<int> support;
    for (int i = 0; i < y.cols(); ++i)
        if ((y.col(i).cwiseAbs().array() > thr).any()) support.push_back(i);
    return support;
}

double lse_segment_cost(const PrefixTable& prefix, int a, int b,
                        const std::vector<int>& support) {
    if (a < 0 || b <= a || b > prefix.length())
        throw std::invalid_argument("segment range out of bounds");
    const double T = prefix.length();
    const double n = b - a;
    double total = (prefix.s2.row(b) - prefix.s2.row(a)).sum();
    for (int i : support) {
        if (i < 0 || i >= prefix.width())
            throw std::invalid_argument("support index out of range");
        double s1 = prefix.s1(b, i) - prefix.s1(a, i);
        total -= s1 * s1 / n;
    }
    return total / T;
}

std::vector<double> default_lambda_grid(const SignalStream& ytilde_std,
                                        int count, double span) {
    if (ytilde_std.domain != Domain::spectral)
        throw std::invalid_argument("lambda grid expects a spectral stream");
    if (count < 1) throw std::invalid_argument("grid needs at least one value");
    if (!(span > 1.0)) throw std::invalid_argument("span must exceed 1");
    if (ytilde_std.length() < 1) throw std::invalid_argument("empty stream");

    double top = ytilde_std.values.cwiseAbs().maxCoeff();
    if (!(top > 0)) top = 1.0;  // constant-zero stream: any grid is equivalent
    const double lambda_max = 2.0 * top / ytilde_std.length();

    std::vector<double> grid(count);
    if (count == 1) {
        grid[0] = lambda_max;
        return grid;
    }
    for (int j = 0; j < count; ++j)
        grid[j] = lambda_max * std::pow(span, -static_cast<double>(count - 1 - j) /
                                                  (count - 1));
    return grid;
}

ModelGrid sweep(const SignalStream& ytilde_std,
                const std::vector<double>& lambdas, int max_segments,
                int min_segment_length) {
    if (ytilde_std.domain != Domain::spectral)
        throw std::invalid_argument("sweep expects a spectral stream");
    if (lambdas.empty()) throw std::invalid_argument("empty lambda grid");
    const int T = ytilde_std.length();
    const int p = ytilde_std.width();
    if (max_segments < 1 || max_segments > T)
        throw std::invalid_argument("max_segments must lie in [1, T]");

    ModelGrid grid;
    grid.lambdas = lambdas;
    grid.horizon = T;
    grid.max_segments = max_segments;
    grid.support_of_lambda.resize(lambdas.size());

    for (size_t l = 0; l < lambdas.size(); ++l) {
        std::vector<int> s = lasso_support(ytilde_std, lambdas[l]);
        auto it = std::find(grid.supports.begin(), grid.supports.end(), s);
        if (it == grid.supports.end()) {
            grid.support_of_lambda[l] = static_cast<int>(grid.supports.size());
            grid.supports.push_back(std::move(s));
        } else {
            grid.support_of_lambda[l] =
                static_cast<int>(it - grid.supports.begin());
        }
    }

    PrefixTable prefix = build_prefix(ytilde_std);

    // Total energy per range; fitted energy is subtracted per support below.
    CostTable base = CostTable::from(T, [&](int a, int b) {
        return (prefix.s2.row(b) - prefix.s2.row(a)).sum();
    });

    // Fitted-energy table for the current column set, updated by the
    // symmetric difference between consecutive supports. Along a default
    // (ascending) grid the supports are nested, so each column enters and
    // leaves at most once across the whole sweep.
    CostTable fit(T, 0.0);
    std::vector<char> in_fit(p, 0);
    auto toggle_column = [&](int i, double sign) {
        for (int a = 0; a < T; ++a)
            for (int b = a + 1; b <= T; ++b) {
                double s1 = prefix.s1(b, i) - prefix.s1(a, i);
                fit.at(a, b) += sign * s1 * s1 / (b - a);
            }
        in_fit[i] = sign > 0;
    };

    std::vector<DpResult> dp_of_support(grid.supports.size());
    for (size_t sid = 0; sid < grid.supports.size(); ++sid) {
        std::vector<char> want(p, 0);
        for (int i : grid.supports[sid]) want[i] = 1;
        for (int i = 0; i < p; ++i) {
            if (want[i] && !in_fit[i]) toggle_column(i, 1.0);
            if (!want[i] && in_fit[i]) toggle_column(i, -1.0);
        }
        CostTable costs = CostTable::from(
            T, [&](int a, int b) { return (base.at(a, b) - fit.at(a, b)) / T; });
        dp_of_support[sid] = dp_segment(costs, max_segments, min_segment_length);
    }

    const double inf = std::numeric_limits<double>::infinity();
    grid.cells.resize(lambdas.size() * static_cast<size_t>(max_segments));
    for (size_t l = 0; l < lambdas.size(); ++l) {
        int sid = grid.support_of_lambda[l];
        const DpResult& dp = dp_of_support[sid];
        for (int d = 1; d <= max_segments; ++d) {
            ModelCell& cell = grid.cells[l * max_segments + (d - 1)];
            cell.lambda_index = static_cast<int>(l);
            cell.support_id = sid;
            cell.support_size = static_cast<int>(grid.supports[sid].size());
            cell.d = d;
            if (d <= dp.max_feasible()) {
                cell.cost = dp.costs[d - 1];
                cell.segmentation = dp.segmentations[d - 1];
            } else {
                cell.cost = inf;  // infeasible under the length constraint
            }
        }
    }
    return grid;
}

namespace {

struct FitModel {
    int support_id = 0;
    int size = 0;  // D_m
    int d = 0;
    double cost = 0.0;
};

// One entry per distinct (support, d) pair with a feasible solution.
std::vector<FitModel> distinct_models(const ModelGrid& grid) {
    std::set<std::pair<int, int>> seen;
    std::vector<FitModel> models;
    for (const ModelCell& cell : grid.cells) {
        if (!std::isfinite(cell.cost)) continue;
        if (!seen.insert({cell.support_id, cell.d}).second) continue;
        models.push_back({cell.support_id, cell.support_size, cell.d, cell.cost});
    }
    return models;
}

SlopeConstants calibrate(const std::vector<FitModel>& models, int T,
                         RobustRegression kind, bool relaxed) {
    const int n = static_cast<int>(models.size());
    Eigen::MatrixXd x(n, 4);
    Eigen::VectorXd y(n);
    for (int r = 0; r < n; ++r) {
        const FitModel& m = models[r];
        double dt = static_cast<double>(m.d) / T;
        x(r, 0) = 1.0;
        x(r, 1) = static_cast<double>(m.size) / T;
        x(r, 2) = dt;
        x(r, 3) = dt * std::log(static_cast<double>(T) / m.d);
        y[r] = m.cost;
    }

    // A feature with no variation in the fit set is indistinguishable from
    // the intercept; drop it and give its constant a zero slope.
    std::vector<int> keep{0};
    for (int c = 1; c < 4; ++c) {
        double lo = x.col(c).minCoeff(), hi = x.col(c).maxCoeff();
        if (hi - lo > 1e-12 * (1.0 + std::abs(hi))) keep.push_back(c);
    }
    Eigen::MatrixXd xr(n, keep.size());
    for (size_t c = 0; c < keep.size(); ++c) xr.col(c) = x.col(keep[c]);
    Eigen::VectorXd beta_r = detail::robust_fit(xr, y, kind);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(4);
    for (size_t c = 0; c < keep.size(); ++c) beta[keep[c]] = beta_r[c];

    SlopeConstants c;
    c.k1 = std::max(0.0, -2.0 * beta[1]);
    c.k2 = std::max(0.0, -2.0 * beta[2]);
    c.k3 = std::max(0.0, -2.0 * beta[3]);
    c.relaxed = relaxed;
    return c;
}

double strict_cutoff(int T) {
    double lt = std::log(static_cast<double>(T));
    return lt > 0 ? 0.6 * T / lt : std::numeric_limits<double>::infinity();
}

// High-complexity models: the slope heuristic reads noise-overfitting
// slopes, so a model must be saturated in every penalized dimension —
// segment count above the d cutoff and support size near the top of the
// grid. Cells with small supports still carry unexplained signal energy;
// including them would let the support slope absorb signal instead of
// noise and blow up the support constant.
std::vector<FitModel> high_complexity(const std::vector<FitModel>& models,
                                      double d_cutoff) {
    int max_size = 0;
    for (const FitModel& m : models) max_size = std::max(max_size, m.size);
    double size_cutoff = 0.6 * max_size - 1e-9;  // vacuous when sizes are all 0
    std::vector<FitModel> out;
    for (const FitModel& m : models)
        if (m.d > d_cutoff && m.size > size_cutoff) out.push_back(m);
    return out;
}

}  // namespace

SlopeConstants slope_heuristic(const ModelGrid& grid, RobustRegression kind) {
    std::vector<FitModel> high =
        high_complexity(distinct_models(grid), strict_cutoff(grid.horizon));
    if (high.size() < 4)
        throw CalibrationError(
            "slope heuristic needs at least 4 models above the complexity cutoff");
    return calibrate(high, grid.horizon, kind, false);
}

SlopeConstants slope_heuristic_relaxed(const ModelGrid& grid,
                                       RobustRegression kind) {
    std::vector<FitModel> models = distinct_models(grid);
    std::vector<FitModel> high = high_complexity(models, strict_cutoff(grid.horizon));
    if (high.size() >= 4) return calibrate(high, grid.horizon, kind, false);

    if (models.size() < 4)
        throw CalibrationError("slope heuristic needs at least 4 distinct models");

    int max_d = 0;
    for (const FitModel& m : models) max_d = std::max(max_d, m.d);
    high = high_complexity(models, 0.6 * max_d);
    if (high.size() < 4) {
        // Last resort: the 4 highest-complexity models available.
        std::sort(models.begin(), models.end(), [](const FitModel& a, const FitModel& b) {
            if (a.d != b.d) return a.d > b.d;
            if (a.size != b.size) return a.size > b.size;
            return a.support_id < b.support_id;
        });
        high.assign(models.begin(), models.begin() + 4);
    }
    return calibrate(high, grid.horizon, kind, true);
}

ModelChoice select_model(const ModelGrid& grid, double k1, double k2, double k3) {
    const double T = grid.horizon;
    bool found = false;
    ModelChoice best;
    int best_size = 0;
    double best_lambda = 0.0;

    for (const ModelCell& cell : grid.cells) {
        if (!std::isfinite(cell.cost)) continue;
        double pen = cell.cost + k1 * cell.support_size / T +
                     cell.d / T * (k2 + k3 * std::log(T / cell.d));
        double lam = grid.lambdas[cell.lambda_index];
        bool take;
        if (!found) {
            take = true;
        } else if (pen != best.penalized_cost) {
            take = pen < best.penalized_cost;
        } else if (cell.d != best.d) {
            take = cell.d < best.d;
        } else if (cell.support_size != best_size) {
            take = cell.support_size < best_size;
        } else {
            take = lam < best_lambda;
        }
        if (take) {
            best.lambda_index = cell.lambda_index;
            best.d = cell.d;
            best.penalized_cost = pen;
            best_size = cell.support_size;
            best_lambda = lam;
            found = true;
        }
    }
    if (!found) throw std::invalid_argument("model grid has no feasible cell");
    return best;
}

int auto_max_segments(int T, int min_segment_length) {
    if (T < 1) throw std::invalid_argument("horizon must be positive");
    if (min_segment_length < 1)
        throw std::invalid_argument("min_segment_length must be positive");
    double lt = std::log(static_cast<double>(T));
    int d = lt > 0 ? static_cast<int>(std::ceil(0.6 * T / lt)) + 8 : T;
    return std::clamp(d, 1, std::max(1, T / min_segment_length));
}

DetectionResult variable_selection_detector(const SignalStream& y,
                                            const SpectralBasis& basis,
                                            const VarSelConfig& config) {
    if (y.domain != Domain::vertex)
        throw std::invalid_argument("detector expects a vertex-domain stream");
    if (y.width() != basis.dim())
        throw std::invalid_argument("stream width does not match the basis");
    const int T = y.length();
    if (T < 2) throw std::invalid_argument("stream too short");

    SignalStream ytilde = gft(basis, y);

    Psd psd;
    FilterbankInfo fb;
    switch (config.psd_mode) {
        case PsdMode::exact:
            if (config.exact_psd.dim() != basis.dim())
                throw std::invalid_argument("exact psd has the wrong dimension");
            psd = config.exact_psd;
            break;
        case PsdMode::ml:
            psd = estimate_psd_ml(ytilde, config.window);
            break;
        case PsdMode::filterbank:
            psd = estimate_psd_filterbank(basis, y, config.window,
                                          config.filterbank_filters,
                                          config.filterbank_probes, config.seed, &fb);
            break;
    }

    SignalStream std_stream = standardize(ytilde, psd);

    std::vector<double> lambdas =
        config.lambda_grid.empty()
            ? default_lambda_grid(std_stream, config.lambda_count, config.lambda_span)
            : config.lambda_grid;
    int dmax = config.max_segments > 0
                   ? config.max_segments
                   : auto_max_segments(T, config.min_segment_length);

    ModelGrid grid = sweep(std_stream, lambdas, dmax, config.min_segment_length);

    SlopeConstants constants = config.allow_relaxed_calibration
                                   ? slope_heuristic_relaxed(grid, config.regression)
                                   : slope_heuristic(grid, config.regression);
    ModelChoice choice = select_model(grid, constants.k1, constants.k2, constants.k3);

    const ModelCell& chosen = grid.cell(choice.lambda_index, choice.d);
    double lambda_hat = grid.lambdas[choice.lambda_index];

    PrefixTable prefix = build_prefix(std_stream);
    Psd unit(Eigen::VectorXd::Ones(std_stream.width()));

    DetectionResult result;
    result.segmentation = chosen.segmentation;
    result.means =
        shrunk_segment_means(prefix, result.segmentation, lambda_hat, unit);
    result.lambda = lambda_hat;
    for (int d = 1; d <= dmax; ++d) {
        const ModelCell& cell = grid.cell(choice.lambda_index, d);
        if (!std::isfinite(cell.cost)) break;
        result.cost_curve.push_back(cell.cost);
    }
    result.selected_d = choice.d;

    result.diagnostics.detector = "variable_selection";
    switch (config.psd_mode) {
        case PsdMode::exact: result.diagnostics.psd_mode = "exact"; break;
        case PsdMode::ml: result.diagnostics.psd_mode = "ml"; break;
        case PsdMode::filterbank: result.diagnostics.psd_mode = "filterbank"; break;
    }
    result.diagnostics.k1 = constants.k1;
    result.diagnostics.k2 = constants.k2;
    result.diagnostics.k3 = constants.k3;
    result.diagnostics.relaxed_calibration = constants.relaxed;
    result.diagnostics.psd_condition = fb.condition;
    return result;
}

DetectionResult variable_selection_detector(const SignalStream& y, const Graph& g,
                                            const VarSelConfig& config) {
    SpectralBasis basis = eigendecompose(build_shift_operator(g, config.gso));
    return variable_selection_detector(y, basis, config);
}

}  // namespace gscp
