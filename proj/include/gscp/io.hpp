#ifndef GSCP_IO_HPP
#define GSCP_IO_HPP

#include <string>

#include "gscp/graph.hpp"

namespace gscp {

/// Numeric CSV, no header, '%.10g' entries, LF line endings.
void write_csv_matrix(const std::string& path, const Eigen::MatrixXd& m);

/// Parse a rectangular numeric CSV. Malformed input raises
/// std::runtime_error naming the offending line.
Eigen::MatrixXd read_csv_matrix(const std::string& path);

/// Edge list, one "u v" or "u v w" per line, 0-based indices, '#' comments
/// ignored. Unit weights are written without the weight column.
void write_edge_list(const std::string& path, const Graph& g);

/// num_nodes < 0 infers p as max index + 1 (isolated trailing nodes then
/// need an explicit count).
Graph read_edge_list(const std::string& path, int num_nodes = -1);

}  // namespace gscp

#endif
