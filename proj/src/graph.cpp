#include "gscp/graph.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

namespace gscp {

Graph::Graph(int num_nodes, std::vector<Edge> edges)
    : num_nodes_(num_nodes), edges_(std::move(edges)) {
    if (num_nodes_ <= 0) throw std::invalid_argument("graph needs at least one node");
    std::set<std::pair<int, int>> seen;
    for (auto& e : edges_) {
        if (e.u > e.v) std::swap(e.u, e.v);
        if (e.u == e.v) throw std::invalid_argument("self-loop not allowed");
        if (e.u < 0 || e.v >= num_nodes_)
            throw std::invalid_argument("edge endpoint out of range");
        if (!(e.weight > 0)) throw std::invalid_argument("edge weight must be positive");
        if (!seen.insert({e.u, e.v}).second)
            throw std::invalid_argument("duplicate edge");
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.u, a.v) < std::tie(b.u, b.v);
    });
}

std::vector<double> Graph::degrees() const {
    std::vector<double> deg(num_nodes_, 0.0);
    for (const auto& e : edges_) {
        deg[e.u] += e.weight;
        deg[e.v] += e.weight;
    }
    return deg;
}

std::vector<std::vector<int>> Graph::adjacency_list() const {
    std::vector<std::vector<int>> adj(num_nodes_);
    for (const auto& e : edges_) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    return adj;
}

bool Graph::connected() const {
    auto adj = adjacency_list();
    std::vector<char> seen(num_nodes_, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                ++count;
                stack.push_back(v);
            }
        }
    }
    return count == num_nodes_;
}

ShiftOperator build_laplacian(const Graph& g) {
    int p = g.num_nodes();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
    for (const auto& e : g.edges()) {
        m(e.u, e.v) -= e.weight;
        m(e.v, e.u) -= e.weight;
        m(e.u, e.u) += e.weight;
        m(e.v, e.v) += e.weight;
    }
    return ShiftOperator{std::move(m)};
}

ShiftOperator build_adjacency(const Graph& g) {
    int p = g.num_nodes();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
    for (const auto& e : g.edges()) {
        m(e.u, e.v) = e.weight;
        m(e.v, e.u) = e.weight;
    }
    return ShiftOperator{std::move(m)};
}

ShiftOperator build_shift_operator(const Graph& g, GsoKind kind) {
    return kind == GsoKind::laplacian ? build_laplacian(g) : build_adjacency(g);
}

SpectralBasis eigendecompose(const ShiftOperator& s) {
    const auto& m = s.matrix;
    if (m.rows() != m.cols()) throw std::invalid_argument("shift operator not square");
    double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12) throw std::invalid_argument("shift operator not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition did not converge");

    SpectralBasis basis{solver.eigenvalues(), solver.eigenvectors()};
    // Sign convention: first entry with magnitude above 1e-12 made positive.
    int p = basis.dim();
    for (int j = 0; j < p; ++j) {
        for (int i = 0; i < p; ++i) {
            double x = basis.eigenvectors(i, j);
            if (std::abs(x) > 1e-12) {
                if (x < 0) basis.eigenvectors.col(j) = -basis.eigenvectors.col(j);
                break;
            }
        }
    }
    return basis;
}

SignalStream gft(const SpectralBasis& b, const SignalStream& y) {
    if (y.domain != Domain::vertex)
        throw std::invalid_argument("gft expects a vertex-domain stream");
    if (y.width() != b.dim())
        throw std::invalid_argument("stream width does not match basis dimension");
    return SignalStream{y.values * b.eigenvectors, Domain::spectral};
}

SignalStream igft(const SpectralBasis& b, const SignalStream& ytilde) {
    if (ytilde.domain != Domain::spectral)
        throw std::invalid_argument("igft expects a spectral-domain stream");
    if (ytilde.width() != b.dim())
        throw std::invalid_argument("stream width does not match basis dimension");
    return SignalStream{ytilde.values * b.eigenvectors.transpose(), Domain::vertex};
}

}  // namespace gscp
