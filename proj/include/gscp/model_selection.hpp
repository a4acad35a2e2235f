#ifndef GSCP_MODEL_SELECTION_HPP
#define GSCP_MODEL_SELECTION_HPP

#include <stdexcept>

#include "gscp/segmentation.hpp"

namespace gscp {

/// Raised when the slope heuristic has too few high-complexity models to
/// fit the penalty constants.
class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Columns that survive the entrywise soft threshold at level
/// lambda * T / 2 (sorted, 0-based). Supports are nested: a larger lambda
/// yields a subset.
std::vector<int> lasso_support(const SignalStream& ytilde_std, double lambda);

/// Least-squares segment cost over rows (a, b) with means restricted to
/// the support: supported frequencies pay the residual around their
/// empirical mean, the rest pay their full energy. Divided by T.
double lse_segment_cost(const PrefixTable& prefix, int a, int b,
                        const std::vector<int>& support);

/// Log-spaced grid descending from lambda_max = 2 max|y| / T (empty
/// support) to lambda_max / span, returned ascending.
std::vector<double> default_lambda_grid(const SignalStream& ytilde_std,
                                        int count = 30, double span = 1000.0);

struct ModelCell {
    int lambda_index = 0;
    int support_id = 0;
    int support_size = 0;  // D_m
    int d = 0;             // number of segments
    double cost = 0.0;     // optimal restricted LSE cost
    Segmentation segmentation;
};

/// Exact DP solutions over the full lambda x d grid. Lambdas sharing a
/// support share one DP solve; cells index back into the unique supports.
struct ModelGrid {
    std::vector<double> lambdas;
    std::vector<std::vector<int>> supports;  // unique, by first appearance
    std::vector<int> support_of_lambda;
    std::vector<ModelCell> cells;  // lambda-major, d = 1..max_segments
    int horizon = 0;
    int max_segments = 0;

    const ModelCell& cell(int lambda_index, int d) const {
        return cells[static_cast<size_t>(lambda_index) * max_segments + (d - 1)];
    }
};

ModelGrid sweep(const SignalStream& ytilde_std,
                const std::vector<double>& lambdas, int max_segments,
                int min_segment_length = 1);

enum class RobustRegression { huber, lad };

struct SlopeConstants {
    double k1 = 0.0;
    double k2 = 0.0;
    double k3 = 0.0;
    bool relaxed = false;  // set when the complexity cutoff was lowered
};

/// Calibrate penalty constants by robust linear regression of the cost of
/// high-complexity models (d > 0.6 T / log T) on the penalty features
/// (D_m/T, d/T, (d/T) log(T/d)), slopes multiplied by -2 and clamped at 0.
/// Duplicated grid cells (same support and d) enter the fit once. Throws
/// CalibrationError when fewer than 4 high-complexity models exist.
SlopeConstants slope_heuristic(const ModelGrid& grid,
                               RobustRegression kind = RobustRegression::huber);

/// Same recipe but with the cutoff lowered to 0.6 * (largest d in the
/// grid) when the strict cutoff leaves fewer than 4 models. Only throws
/// when the grid itself has fewer than 4 distinct models.
SlopeConstants slope_heuristic_relaxed(const ModelGrid& grid,
                                       RobustRegression kind = RobustRegression::huber);

struct ModelChoice {
    int lambda_index = 0;
    int d = 0;
    double penalized_cost = 0.0;
};

/// argmin over the grid of cost + k1 D_m/T + d/T (k2 + k3 log(T/d)).
/// Ties break toward smaller d, then smaller D_m, then smaller lambda, so
/// the choice does not depend on grid ordering.
ModelChoice select_model(const ModelGrid& grid, double k1, double k2, double k3);

enum class PsdMode { exact, ml, filterbank };

struct VarSelConfig {
    std::vector<double> lambda_grid;  // empty = data-driven default
    int lambda_count = 30;
    double lambda_span = 1000.0;
    int max_segments = 0;  // 0 = automatic from T
    int min_segment_length = 1;
    int window = 50;
    PsdMode psd_mode = PsdMode::ml;
    Psd exact_psd;  // consulted when psd_mode == exact
    int filterbank_filters = 300;
    int filterbank_probes = 10;
    std::uint64_t seed = 0;
    RobustRegression regression = RobustRegression::huber;
    bool allow_relaxed_calibration = true;
    GsoKind gso = GsoKind::laplacian;
};

/// Default model-size cap: comfortably past the slope-heuristic complexity
/// cutoff so calibration has models to fit.
int auto_max_segments(int T, int min_segment_length = 1);

/// Full pipeline on a vertex-domain stream: GFT, PSD estimation,
/// standardization, support sweep, slope-heuristic calibration, model
/// choice, then sparse means at the chosen lambda.
DetectionResult variable_selection_detector(const SignalStream& y,
                                            const Graph& g,
                                            const VarSelConfig& config);

/// Same pipeline starting from a precomputed basis (saves repeated
/// eigendecompositions when many streams share a graph).
DetectionResult variable_selection_detector(const SignalStream& y,
                                            const SpectralBasis& basis,
                                            const VarSelConfig& config);

}  // namespace gscp

#endif
