#ifndef GSCP_GRAPH_HPP
#define GSCP_GRAPH_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace gscp {

/// Undirected weighted edge, endpoints 0-based.
struct Edge {
    int u = 0;
    int v = 0;
    double weight = 1.0;
};

/// Simple undirected graph. No self-loops, no duplicate edges, positive
/// weights. Immutable after construction.
class Graph {
public:
    Graph(int num_nodes, std::vector<Edge> edges);

    int num_nodes() const { return num_nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }

    /// Weighted degree per node.
    std::vector<double> degrees() const;

    /// Neighbor lists (unweighted view).
    std::vector<std::vector<int>> adjacency_list() const;

    bool connected() const;

private:
    int num_nodes_;
    std::vector<Edge> edges_;  // stored with u < v
};

enum class GsoKind { laplacian, adjacency };

/// Graph shift operator: a symmetric p x p matrix whose sparsity pattern
/// follows the graph (diagonal entries always allowed).
struct ShiftOperator {
    Eigen::MatrixXd matrix;
    int dim() const { return static_cast<int>(matrix.rows()); }
};

/// Combinatorial Laplacian L = D - W. Rows sum to zero.
ShiftOperator build_laplacian(const Graph& g);

/// Weighted adjacency matrix.
ShiftOperator build_adjacency(const Graph& g);

ShiftOperator build_shift_operator(const Graph& g, GsoKind kind);

/// Orthonormal eigenbasis of a shift operator. Eigenvalues ascending,
/// column i of eigenvectors paired with eigenvalues[i]. Each eigenvector's
/// first nonzero entry is positive, which fixes the sign and makes the
/// decomposition deterministic (up to the inherent ambiguity of repeated
/// eigenvalues).
struct SpectralBasis {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    int dim() const { return static_cast<int>(eigenvalues.size()); }
};

SpectralBasis eigendecompose(const ShiftOperator& s);

enum class Domain { vertex, spectral };

/// A time-indexed stream of signals on a fixed graph: row t of values is
/// the signal observed at time t. The domain tag records whether rows live
/// on the vertices or in the spectral basis.
struct SignalStream {
    Eigen::MatrixXd values;
    Domain domain = Domain::vertex;

    int length() const { return static_cast<int>(values.rows()); }
    int width() const { return static_cast<int>(values.cols()); }
};

/// Forward transform: row-wise projection onto the eigenbasis, Y -> Y U.
SignalStream gft(const SpectralBasis& b, const SignalStream& y);

/// Inverse transform, Ytilde -> Ytilde U^T.
SignalStream igft(const SpectralBasis& b, const SignalStream& ytilde);

}  // namespace gscp

#endif
