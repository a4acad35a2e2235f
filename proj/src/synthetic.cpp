#include "gscp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gscp {

Scenario scenario_from_string(const std::string& s) {
    if (s == "I" || s == "1" || s == "i") return Scenario::I;
    if (s == "II" || s == "2" || s == "ii") return Scenario::II;
    throw std::invalid_argument("unknown scenario: " + s);
}

std::string to_string(Scenario s) {
    return s == Scenario::I ? "I" : "II";
}

Graph gen_er(int p, double prob, std::uint64_t seed, int max_retries) {
    if (p < 1) throw std::invalid_argument("graph needs at least one node");
    if (prob < 0.0 || prob > 1.0)
        throw std::invalid_argument("edge probability must lie in [0, 1]");
    if (max_retries < 1) throw std::invalid_argument("max_retries must be positive");

    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(prob);
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        std::vector<Edge> edges;
        for (int u = 0; u < p; ++u)
            for (int v = u + 1; v < p; ++v)
                if (coin(rng)) edges.push_back({u, v, 1.0});
        Graph g(p, std::move(edges));
        if (g.connected()) return g;
    }
    throw std::runtime_error("no connected draw after " +
                             std::to_string(max_retries) + " attempts");
}

Graph gen_ba(int p, int m, std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("attachment count must be positive");
    if (p < m) throw std::invalid_argument("need at least m nodes");

    std::mt19937_64 rng(seed);
    std::vector<Edge> edges;
    // One entry per degree unit; sampling from it is degree-proportional.
    std::vector<int> repeats;
    for (int u = 0; u < m; ++u)
        for (int v = u + 1; v < m; ++v) {
            edges.push_back({u, v, 1.0});
            repeats.push_back(u);
            repeats.push_back(v);
        }

    for (int v = m; v < p; ++v) {
        std::vector<int> targets;
        std::vector<char> used(v, 0);
        while (static_cast<int>(targets.size()) < m) {
            int t;
            if (repeats.empty()) {
                // degenerate start (m = 1 clique has no edges): uniform
                std::uniform_int_distribution<int> u(0, v - 1);
                t = u(rng);
            } else {
                std::uniform_int_distribution<size_t> u(0, repeats.size() - 1);
                t = repeats[u(rng)];
            }
            if (used[t]) continue;
            used[t] = 1;
            targets.push_back(t);
        }
        for (int t : targets) {
            edges.push_back({t, v, 1.0});
            repeats.push_back(t);
            repeats.push_back(v);
        }
    }
    return Graph(p, std::move(edges));
}

GraphFilter scenario_filter(Scenario s, const Eigen::VectorXd& eigenvalues) {
    const int p = static_cast<int>(eigenvalues.size());
    if (p < 1) throw std::invalid_argument("empty eigenvalue list");

    Eigen::VectorXd h(p);
    if (s == Scenario::I) {
        for (int i = 0; i < p; ++i)
            h[i] = 1.0 / (std::log(eigenvalues[i] + 10.0) + 1.0);
    } else {
        // Gamma(shape 20, rate 5) density, evaluated in log space.
        const double shape = 20.0, rate = 5.0;
        const double norm = shape * std::log(rate) - std::lgamma(shape);
        for (int i = 0; i < p; ++i) {
            double t = eigenvalues[i];
            h[i] = t > 0 ? std::exp(norm + (shape - 1.0) * std::log(t) - rate * t)
                         : 0.0;
        }
    }

    double energy = h.squaredNorm();
    if (!(energy > 0)) throw std::runtime_error("filter response vanishes");
    GraphFilter f;
    f.response = h * std::sqrt(p / energy);  // unit average power
    return f;
}

ChangePointDraw gen_changepoints(const ScenarioConfig& config,
                                 std::mt19937_64& rng) {
    if (config.gap_mean <= 0 || config.gap_floor < 1)
        throw std::invalid_argument("invalid gap law");

    int count;
    if (config.scenario == Scenario::I) {
        if (config.poisson_mean <= 0)
            throw std::invalid_argument("poisson mean must be positive");
        std::poisson_distribution<int> pois(config.poisson_mean);
        do {
            count = pois(rng);
        } while (count == 0);
    } else {
        if (config.fixed_changes < 1)
            throw std::invalid_argument("need at least one change");
        count = config.fixed_changes;
    }

    std::exponential_distribution<double> exp_draw(1.0 / config.gap_mean);
    ChangePointDraw draw;
    int t = 0;
    for (int l = 0; l <= count; ++l) {
        t += static_cast<int>(std::llround(config.gap_floor + exp_draw(rng)));
        if (l < count)
            draw.interior.push_back(t);
        else
            draw.horizon = t;
    }
    return draw;
}

namespace {

// First k slots of a partial Fisher-Yates shuffle: k distinct values in [0, n).
std::vector<int> pick_distinct(int n, int k, std::mt19937_64& rng) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (int j = 0; j < k; ++j) {
        std::uniform_int_distribution<int> u(j, n - 1);
        std::swap(idx[j], idx[u(rng)]);
    }
    idx.resize(k);
    return idx;
}

void validate(const ScenarioConfig& c) {
    if (c.num_nodes < 2) throw std::invalid_argument("need at least two nodes");
    if (c.er_prob <= 0 || c.er_prob >= 1)
        throw std::invalid_argument("edge probability must lie in (0, 1)");
    if (c.ba_attachment < 1)
        throw std::invalid_argument("attachment count must be positive");
    if (!(c.coeff_max > c.coeff_min))
        throw std::invalid_argument("empty coefficient range");
    if (c.initial_modes_one < 1 || c.initial_modes_two < 1 ||
        c.resampled_coeffs < 1 || c.hub_count < 1 || c.random_nodes < 1)
        throw std::invalid_argument("scenario counts must be positive");
}

// Nodes ordered by degree (descending), ties broken by index.
std::vector<int> by_degree(const Graph& g) {
    std::vector<double> deg = g.degrees();
    std::vector<int> order(g.num_nodes());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return deg[a] > deg[b];
    });
    return order;
}

}  // namespace

ScenarioInstance gen_scenario(const ScenarioConfig& config) {
    validate(config);
    const int p = config.num_nodes;

    std::mt19937_64 rng(config.seed);
    std::uint64_t graph_seed = rng();

    Graph graph = config.scenario == Scenario::I
                      ? gen_er(p, config.er_prob, graph_seed)
                      : gen_ba(p, config.ba_attachment, graph_seed);
    SpectralBasis basis = eigendecompose(build_laplacian(graph));
    GraphFilter filter = scenario_filter(config.scenario, basis.eigenvalues);

    ChangePointDraw cps = gen_changepoints(config, rng);
    const int T = cps.horizon;
    const int d = static_cast<int>(cps.interior.size()) + 1;

    std::uniform_real_distribution<double> coeff(config.coeff_min, config.coeff_max);
    Eigen::MatrixXd means(d, p);  // vertex domain, one row per segment

    if (config.scenario == Scenario::I) {
        const int modes = std::min(config.initial_modes_one, p);
        Eigen::VectorXd c = Eigen::VectorXd::Zero(p);
        for (int i = 0; i < modes; ++i) c[i] = coeff(rng);
        means.row(0) = (basis.eigenvectors * c).transpose();
        for (int l = 1; l < d; ++l) {
            std::vector<int> pick =
                pick_distinct(modes, std::min(config.resampled_coeffs, modes), rng);
            std::sort(pick.begin(), pick.end());
            for (int i : pick) c[i] = coeff(rng);
            means.row(l) = (basis.eigenvectors * c).transpose();
        }
    } else {
        const int modes = std::min(config.initial_modes_two, p);
        Eigen::VectorXd c = Eigen::VectorXd::Zero(p);
        for (int i = 0; i < modes; ++i) c[i] = coeff(rng);
        Eigen::VectorXd mu = basis.eigenvectors * c;
        means.row(0) = mu.transpose();

        std::vector<int> order = by_degree(graph);
        auto adjacency = graph.adjacency_list();
        for (int l = 1; l < d; ++l) {
            std::vector<int> nodes;
            if (l == 1) {
                nodes.push_back(order[0]);  // hub and all its neighbors
                nodes.insert(nodes.end(), adjacency[order[0]].begin(),
                             adjacency[order[0]].end());
            } else if (l == 2) {
                nodes.assign(order.begin(),
                             order.begin() + std::min(config.hub_count, p));
            } else {
                nodes = pick_distinct(p, std::min(config.random_nodes, p), rng);
            }
            std::sort(nodes.begin(), nodes.end());
            nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
            for (int v : nodes) mu[v] = coeff(rng);
            means.row(l) = mu.transpose();
        }
    }

    // Stationary noise: filtered white noise, one row per timestamp.
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd w(T, p);
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < p; ++i) w(t, i) = gauss(rng);
    Eigen::MatrixXd filtered = (w * basis.eigenvectors) *
                               filter.response.asDiagonal() *
                               basis.eigenvectors.transpose();

    ScenarioInstance instance{SignalStream{}, std::move(graph), std::move(basis),
                              GroundTruth{}};
    instance.truth.change_points = cps.interior;
    instance.truth.horizon = T;
    instance.truth.segment_means = means;
    instance.truth.filter = filter;

    Eigen::MatrixXd y = filtered;
    int seg = 0;
    for (int t = 0; t < T; ++t) {
        if (seg < d - 1 && t >= cps.interior[seg]) ++seg;
        y.row(t) += means.row(seg);
    }
    instance.stream.values = std::move(y);
    instance.stream.domain = Domain::vertex;
    return instance;
}

}  // namespace gscp
