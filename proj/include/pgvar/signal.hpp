#pragma once

#include <filesystem>
#include <utility>

#include <Eigen/Dense>

namespace pgvar {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// T steps of F-dimensional graph signals on N nodes. Row t is x_t in
// node-major order: entry i*F + f holds feature f of node i.
class SignalSequence {
 public:
  SignalSequence() = default;
  SignalSequence(int n_nodes, int n_features, RowMatrix data);

  int n_nodes() const { return n_nodes_; }
  int n_features() const { return n_features_; }
  int n_steps() const { return static_cast<int>(data_.rows()); }
  Eigen::Index dimension() const { return data_.cols(); }

  const RowMatrix& data() const { return data_; }
  Eigen::Map<const Eigen::VectorXd> step(int t) const {
    return Eigen::Map<const Eigen::VectorXd>(data_.row(t).data(), data_.cols());
  }
  // x_t(i), length F.
  Eigen::VectorXd node_signal(int t, int node) const;
  // x_t^(f), length N.
  Eigen::VectorXd feature_signal(int t, int feature) const;

  // Steps [begin, end).
  SignalSequence slice(int begin, int end) const;

 private:
  int n_nodes_ = 0;
  int n_features_ = 0;
  RowMatrix data_;
};

// x -> (x - mean) / scale with a per-entry temporal mean and one global scale.
struct PreprocessTransform {
  Eigen::VectorXd mean;
  double scale = 1.0;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd invert(const Eigen::VectorXd& y) const;
  SignalSequence apply(const SignalSequence& seq) const;
  SignalSequence invert(const SignalSequence& seq) const;
};

// Zero per-entry mean, unit maximum absolute value.
std::pair<SignalSequence, PreprocessTransform> preprocess(const SignalSequence& seq);

// Node-major length-N*F vector to the F x N matrix whose column i is x(i).
// Column-major vec of the result is x itself.
Eigen::MatrixXd reshape_to_matrix(const Eigen::VectorXd& x, int n_nodes, int n_features);
Eigen::VectorXd flatten(const Eigen::MatrixXd& node_signals);

// CSV with header `t,v0,...,v{NF-1}`. N is inferred as columns / n_features.
SignalSequence load_sequence(const std::filesystem::path& path, int n_features = 1);
void save_sequence(const SignalSequence& seq, const std::filesystem::path& path);
// Writes arbitrary time labels; used for prediction output.
void save_sequence(const SignalSequence& seq, const std::vector<int>& times,
                   const std::filesystem::path& path);
// Returns the time labels read from the `t` column.
std::pair<SignalSequence, std::vector<int>> load_sequence_with_times(const std::filesystem::path& path,
                                                                     int n_features = 1);

struct Segment {
  int begin = 0;
  int end = 0;

  int size() const { return end - begin; }
  bool contains(int t) const { return t >= begin && t < end; }
};

struct SeriesSplit {
  Segment train;
  Segment validation;
  Segment test;

  Segment in_sample() const { return {train.begin, validation.end}; }
};

// Contiguous temporal split with floor rounding. Every segment must hold at
// least max_lag + 1 steps.
SeriesSplit split_series(int n_steps, double in_fraction, double train_fraction, int max_lag = 0);

}  // namespace pgvar
