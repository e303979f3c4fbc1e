#include <algorithm>
#include <cmath>
#include <string>

#include "csv.hpp"
#include "pgvar/graph.hpp"

namespace pgvar {

Graph load_edge_list(const std::filesystem::path& path, int n_nodes) {
  auto in = csv::open_in(path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::format_error, path.string() + ": empty file");
  const auto header = csv::split(line);
  require(header.size() == 3 && header[0] == "src" && header[1] == "dst" && header[2] == "weight",
          ErrorCode::format_error, path.string() + ": expected header 'src,dst,weight'");

  std::vector<Edge> edges;
  int max_index = -1;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line);
    require(fields.size() == 3, ErrorCode::format_error, csv::where(path, row) + ": expected 3 fields");
    const auto src = csv::parse_int(fields[0], path, row);
    const auto dst = csv::parse_int(fields[1], path, row);
    const double w = csv::parse_double(fields[2], path, row);
    require(src >= 0 && dst >= 0, ErrorCode::format_error, csv::where(path, row) + ": negative index");
    require(std::isfinite(w), ErrorCode::format_error, csv::where(path, row) + ": non-finite weight");
    edges.push_back({static_cast<int>(src), static_cast<int>(dst), w});
    max_index = std::max({max_index, static_cast<int>(src), static_cast<int>(dst)});
  }
  if (n_nodes < 0) n_nodes = max_index + 1;
  return Graph::from_edges(n_nodes, std::move(edges));
}

void save_edge_list(const Graph& g, const std::filesystem::path& path) {
  std::string text = "src,dst,weight\n";
  for (const Edge& e : g.edges()) {
    text += std::to_string(e.src);
    text += ',';
    text += std::to_string(e.dst);
    text += ',';
    csv::append_double(text, e.weight);
    text += '\n';
  }
  auto out = csv::open_out(path);
  out << text;
}

Eigen::MatrixXd load_points(const std::filesystem::path& path) {
  auto in = csv::open_in(path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::format_error, path.string() + ": empty file");
  const auto header = csv::split(line);
  require(header.size() >= 2 && header[0] == "node", ErrorCode::format_error,
          path.string() + ": expected header 'node,c1,...,cD'");
  const auto dim = static_cast<Eigen::Index>(header.size() - 1);

  std::vector<double> values;
  std::size_t row = 0;
  Eigen::Index n = 0;
  while (std::getline(in, line)) {
    ++row;
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line);
    require(fields.size() == header.size(), ErrorCode::format_error,
            csv::where(path, row) + ": ragged row");
    require(csv::parse_int(fields[0], path, row) == n, ErrorCode::format_error,
            csv::where(path, row) + ": node ids must be 0..N-1 in order");
    for (Eigen::Index c = 0; c < dim; ++c) {
      const double v = csv::parse_double(fields[c + 1], path, row);
      require(std::isfinite(v), ErrorCode::format_error, csv::where(path, row) + ": non-finite coordinate");
      values.push_back(v);
    }
    ++n;
  }
  Eigen::MatrixXd points(n, dim);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < dim; ++c) points(i, c) = values[i * dim + c];
  return points;
}

void save_points(const Eigen::MatrixXd& points, const std::filesystem::path& path) {
  std::string text = "node";
  for (Eigen::Index c = 0; c < points.cols(); ++c) text += ",c" + std::to_string(c + 1);
  text += '\n';
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    text += std::to_string(i);
    for (Eigen::Index c = 0; c < points.cols(); ++c) {
      text += ',';
      csv::append_double(text, points(i, c));
    }
    text += '\n';
  }
  auto out = csv::open_out(path);
  out << text;
}

}  // namespace pgvar
