#include "gscp/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gscp {

namespace {

[[noreturn]] void fail(const std::string& path, int line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

void write_csv_matrix(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path, std::ios::binary);  // binary keeps LF on any platform
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << format_number(m(r, c));
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write to " + path + " failed");
}

Eigen::MatrixXd read_csv_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        size_t pos = 0;
        while (true) {
            size_t comma = line.find(',', pos);
            std::string field = line.substr(
                pos, comma == std::string::npos ? std::string::npos : comma - pos);
            size_t used = 0;
            double v;
            try {
                v = std::stod(field, &used);
            } catch (const std::exception&) {
                fail(path, lineno, "not a number: '" + field + "'");
            }
            while (used < field.size() &&
                   (field[used] == ' ' || field[used] == '\t'))
                ++used;
            if (used != field.size())
                fail(path, lineno, "trailing characters: '" + field + "'");
            row.push_back(v);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size())
            fail(path, lineno, "expected " + std::to_string(rows.front().size()) +
                                   " columns, got " + std::to_string(row.size()));
        rows.push_back(std::move(row));
    }

    Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    return m;
}

void write_edge_list(const std::string& path, const Graph& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    for (const Edge& e : g.edges()) {
        out << e.u << ' ' << e.v;
        if (e.weight != 1.0) out << ' ' << format_number(e.weight);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write to " + path + " failed");
}

Graph read_edge_list(const std::string& path, int num_nodes) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::vector<Edge> edges;
    int max_node = -1;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;

        std::istringstream fields(line);
        std::string a, b, w, rest;
        if (!(fields >> a >> b)) fail(path, lineno, "expected two node indices");
        bool has_weight = static_cast<bool>(fields >> w);
        fields.clear();
        if (fields >> rest) fail(path, lineno, "trailing characters: '" + rest + "'");

        auto parse_int = [&](const std::string& s) {
            size_t used = 0;
            int v = 0;
            try {
                v = std::stoi(s, &used);
            } catch (const std::exception&) {
                fail(path, lineno, "not a node index: '" + s + "'");
            }
            if (used != s.size()) fail(path, lineno, "not a node index: '" + s + "'");
            return v;
        };
        Edge e;
        e.u = parse_int(a);
        e.v = parse_int(b);
        if (has_weight) {
            size_t used = 0;
            try {
                e.weight = std::stod(w, &used);
            } catch (const std::exception&) {
                fail(path, lineno, "not a weight: '" + w + "'");
            }
            if (used != w.size()) fail(path, lineno, "not a weight: '" + w + "'");
        }
        max_node = std::max({max_node, e.u, e.v});
        edges.push_back(e);
    }

    int p = num_nodes >= 0 ? num_nodes : max_node + 1;
    return Graph(p, std::move(edges));
}

}  // namespace gscp
