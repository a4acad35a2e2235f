#ifndef GSCP_SYNTHETIC_HPP
#define GSCP_SYNTHETIC_HPP

#include <random>

#include "gscp/spectral.hpp"

namespace gscp {

enum class Scenario { I, II };

Scenario scenario_from_string(const std::string& s);
std::string to_string(Scenario s);

struct ScenarioConfig {
    Scenario scenario = Scenario::I;
    int num_nodes = 500;
    std::uint64_t seed = 0;

    // change-point law: gaps are floor + Exp(mean), rounded
    double gap_mean = 20.0;
    int gap_floor = 30;
    double poisson_mean = 5.0;  // scenario I change count
    int fixed_changes = 4;      // scenario II change count

    double er_prob = 0.3;
    int ba_attachment = 4;

    double coeff_min = -5.0;
    double coeff_max = 5.0;
    int initial_modes_one = 100;   // scenario I: first eigenvectors in the mean
    int initial_modes_two = 20;    // scenario II
    int resampled_coeffs = 20;     // scenario I: coefficients redrawn per change
    int hub_count = 5;             // scenario II: second change
    int random_nodes = 20;         // scenario II: later changes
};

struct GroundTruth {
    std::vector<int> change_points;  // interior, ascending
    int horizon = 0;
    Eigen::MatrixXd segment_means;   // (change count + 1) x p, vertex domain
    GraphFilter filter;              // generating response at the eigenvalues
};

struct ScenarioInstance {
    SignalStream stream;  // vertex domain, T x p
    Graph graph;
    SpectralBasis basis;
    GroundTruth truth;
};

/// Erdos-Renyi draw, retried on disconnection up to max_retries times.
Graph gen_er(int p, double prob, std::uint64_t seed, int max_retries = 100);

/// Barabasi-Albert preferential attachment from an initial m-clique;
/// every incoming node attaches to m distinct existing nodes.
Graph gen_ba(int p, int m, std::uint64_t seed);

/// Scenario response shapes evaluated at the eigenvalues and normalized to
/// unit average power (sum of squares / p = 1).
GraphFilter scenario_filter(Scenario s, const Eigen::VectorXd& eigenvalues);

struct ChangePointDraw {
    std::vector<int> interior;
    int horizon = 0;
};

/// Change count is Poisson (scenario I, redrawn when zero) or fixed
/// (scenario II); every gap, including the final one after the last
/// change, is gap_floor + Exp(gap_mean) rounded to the nearest integer.
ChangePointDraw gen_changepoints(const ScenarioConfig& config, std::mt19937_64& rng);

/// Full instance: graph, eigenbasis, planted piecewise-constant means and
/// stationary filtered-noise stream. Identical config and seed reproduce
/// the instance bit for bit.
ScenarioInstance gen_scenario(const ScenarioConfig& config);

}  // namespace gscp

#endif
