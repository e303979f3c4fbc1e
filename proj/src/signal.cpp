#include "pgvar/signal.hpp"

#include <cmath>
#include <string>

#include "csv.hpp"
#include "pgvar/error.hpp"

namespace pgvar {

SignalSequence::SignalSequence(int n_nodes, int n_features, RowMatrix data)
    : n_nodes_(n_nodes), n_features_(n_features), data_(std::move(data)) {
  require(n_nodes > 0 && n_features > 0, ErrorCode::invalid_shape, "sequence needs N, F > 0");
  require(data_.cols() == static_cast<Eigen::Index>(n_nodes) * n_features, ErrorCode::invalid_shape,
          "row length " + std::to_string(data_.cols()) + " != N*F = " +
              std::to_string(static_cast<long long>(n_nodes) * n_features));
  require(data_.allFinite(), ErrorCode::invalid_input, "sequence contains non-finite values");
}

Eigen::VectorXd SignalSequence::node_signal(int t, int node) const {
  return data_.row(t).segment(static_cast<Eigen::Index>(node) * n_features_, n_features_).transpose();
}

Eigen::VectorXd SignalSequence::feature_signal(int t, int feature) const {
  Eigen::VectorXd out(n_nodes_);
  for (int i = 0; i < n_nodes_; ++i) out[i] = data_(t, static_cast<Eigen::Index>(i) * n_features_ + feature);
  return out;
}

SignalSequence SignalSequence::slice(int begin, int end) const {
  require(begin >= 0 && begin <= end && end <= n_steps(), ErrorCode::invalid_parameter,
          "slice [" + std::to_string(begin) + "," + std::to_string(end) + ") out of range");
  SignalSequence out;
  out.n_nodes_ = n_nodes_;
  out.n_features_ = n_features_;
  out.data_ = data_.middleRows(begin, end - begin);
  return out;
}

Eigen::VectorXd PreprocessTransform::apply(const Eigen::VectorXd& x) const { return (x - mean) / scale; }

Eigen::VectorXd PreprocessTransform::invert(const Eigen::VectorXd& y) const { return y * scale + mean; }

SignalSequence PreprocessTransform::apply(const SignalSequence& seq) const {
  require(seq.dimension() == mean.size(), ErrorCode::dimension_mismatch, "transform dimension mismatch");
  RowMatrix out = (seq.data().rowwise() - mean.transpose()) / scale;
  return SignalSequence(seq.n_nodes(), seq.n_features(), std::move(out));
}

SignalSequence PreprocessTransform::invert(const SignalSequence& seq) const {
  require(seq.dimension() == mean.size(), ErrorCode::dimension_mismatch, "transform dimension mismatch");
  RowMatrix out = (seq.data() * scale).rowwise() + mean.transpose();
  return SignalSequence(seq.n_nodes(), seq.n_features(), std::move(out));
}

std::pair<SignalSequence, PreprocessTransform> preprocess(const SignalSequence& seq) {
  require(seq.n_steps() >= 2, ErrorCode::insufficient_data, "preprocessing needs at least 2 steps");
  PreprocessTransform tr;
  tr.mean = seq.data().colwise().mean().transpose();
  const RowMatrix centered = seq.data().rowwise() - tr.mean.transpose();
  tr.scale = centered.cwiseAbs().maxCoeff();
  require(tr.scale > 0.0, ErrorCode::degenerate_scale, "sequence is constant after centering");
  return {SignalSequence(seq.n_nodes(), seq.n_features(), centered / tr.scale), tr};
}

Eigen::MatrixXd reshape_to_matrix(const Eigen::VectorXd& x, int n_nodes, int n_features) {
  require(n_nodes > 0 && n_features > 0 && x.size() == static_cast<Eigen::Index>(n_nodes) * n_features,
          ErrorCode::invalid_shape,
          "vector of length " + std::to_string(x.size()) + " cannot be reshaped to " +
              std::to_string(n_features) + "x" + std::to_string(n_nodes));
  return Eigen::Map<const Eigen::MatrixXd>(x.data(), n_features, n_nodes);
}

Eigen::VectorXd flatten(const Eigen::MatrixXd& node_signals) {
  return Eigen::Map<const Eigen::VectorXd>(node_signals.data(), node_signals.size());
}

std::pair<SignalSequence, std::vector<int>> load_sequence_with_times(const std::filesystem::path& path,
                                                                     int n_features) {
  require(n_features > 0, ErrorCode::invalid_parameter, "n_features must be positive");
  auto in = csv::open_in(path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::format_error, path.string() + ": empty file");
  const auto header = csv::split(line);
  require(header.size() >= 2 && header[0] == "t", ErrorCode::format_error,
          path.string() + ": expected header 't,v0,...'");
  const auto dim = static_cast<Eigen::Index>(header.size() - 1);
  for (Eigen::Index c = 0; c < dim; ++c)
    require(header[c + 1] == "v" + std::to_string(c), ErrorCode::format_error,
            path.string() + ": header column " + std::to_string(c + 1) + " should be v" + std::to_string(c));
  require(dim % n_features == 0, ErrorCode::invalid_shape,
          path.string() + ": " + std::to_string(dim) + " columns not divisible by F = " +
              std::to_string(n_features));

  std::vector<double> values;
  std::vector<int> times;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line);
    require(static_cast<Eigen::Index>(fields.size()) == dim + 1, ErrorCode::format_error,
            csv::where(path, row) + ": ragged row (" + std::to_string(fields.size()) + " fields, expected " +
                std::to_string(dim + 1) + ")");
    const auto t = csv::parse_int(fields[0], path, row);
    require(times.empty() || t > times.back(), ErrorCode::format_error,
            csv::where(path, row) + ": time column must increase");
    times.push_back(static_cast<int>(t));
    for (Eigen::Index c = 0; c < dim; ++c) {
      const double v = csv::parse_double(fields[c + 1], path, row);
      require(std::isfinite(v), ErrorCode::format_error, csv::where(path, row) + ": non-finite value");
      values.push_back(v);
    }
  }
  require(!times.empty(), ErrorCode::format_error, path.string() + ": no data rows");
  RowMatrix data = Eigen::Map<RowMatrix>(values.data(), static_cast<Eigen::Index>(times.size()), dim);
  return {SignalSequence(static_cast<int>(dim / n_features), n_features, std::move(data)), std::move(times)};
}

SignalSequence load_sequence(const std::filesystem::path& path, int n_features) {
  return load_sequence_with_times(path, n_features).first;
}

void save_sequence(const SignalSequence& seq, const std::vector<int>& times, const std::filesystem::path& path) {
  require(static_cast<int>(times.size()) == seq.n_steps(), ErrorCode::invalid_parameter,
          "one time label per step required");
  std::string text = "t";
  for (Eigen::Index c = 0; c < seq.dimension(); ++c) text += ",v" + std::to_string(c);
  text += '\n';
  for (int t = 0; t < seq.n_steps(); ++t) {
    text += std::to_string(times[t]);
    for (Eigen::Index c = 0; c < seq.dimension(); ++c) {
      text += ',';
      csv::append_double(text, seq.data()(t, c));
    }
    text += '\n';
  }
  auto out = csv::open_out(path);
  out << text;
}

void save_sequence(const SignalSequence& seq, const std::filesystem::path& path) {
  std::vector<int> times(seq.n_steps());
  for (int t = 0; t < seq.n_steps(); ++t) times[t] = t;
  save_sequence(seq, times, path);
}

SeriesSplit split_series(int n_steps, double in_fraction, double train_fraction, int max_lag) {
  require(in_fraction > 0.0 && in_fraction < 1.0, ErrorCode::invalid_parameter, "in_fraction must be in (0, 1)");
  require(train_fraction > 0.0 && train_fraction < 1.0, ErrorCode::invalid_parameter,
          "train_fraction must be in (0, 1)");
  require(n_steps > 0 && max_lag >= 0, ErrorCode::invalid_parameter, "invalid series length or lag");
  // The epsilon keeps products like 0.7 * 70 from flooring to 48.
  auto floor_of = [](double v) { return static_cast<int>(std::floor(v + 1e-9)); };
  const int n_in = floor_of(in_fraction * n_steps);
  const int n_train = floor_of(train_fraction * n_in);
  SeriesSplit split{{0, n_train}, {n_train, n_in}, {n_in, n_steps}};

  const int min_len = max_lag + 1;
  auto check = [&](const Segment& s, const char* name) {
    require(s.size() >= min_len, ErrorCode::insufficient_data,
            std::string(name) + " segment has " + std::to_string(s.size()) + " steps, needs at least " +
                std::to_string(min_len) + " for lag " + std::to_string(max_lag));
  };
  check(split.train, "training");
  check(split.validation, "validation");
  check(split.test, "test");
  return split;
}

}  // namespace pgvar
