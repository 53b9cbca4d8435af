#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "relsim/dense_matrix.hpp"

namespace relsim {

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  double l2 = 0.0;
  std::vector<std::string> feature_schema;

  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

/// Per-column affine transform fit on training rows. Columns with zero
/// variance keep scale 1 so they pass through centered.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const DenseMatrix& x);
  void apply(DenseMatrix& x) const;

  friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

struct TrainOptions {
  double l2 = 1e-4;
  std::size_t epochs = 500;
  double lr = 0.1;
  std::uint64_t seed = 0;
  /// Inverse-prevalence sample weights, so each class carries half the loss.
  bool balance_classes = true;
};

struct TrainResult {
  LinearModel model;
  /// Objective after initialization, then after each epoch.
  std::vector<double> loss_history;
};

/// Sample weights n / (2 n_c) for class c; uniform when a class is absent
/// or balancing is off.
std::vector<double> sample_weights(std::span<const int> labels, bool balance);

struct Objective {
  double loss = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
};

/// Weighted mean log-loss plus (l2/2)|w|^2 and its gradient. The bias is
/// not regularized.
Objective logistic_objective(const DenseMatrix& x, std::span<const int> labels,
                             std::span<const double> weights, std::span<const double> w, double b,
                             double l2);

/// Full-batch gradient descent. A step that would raise the objective is
/// halved until it does not, so the loss history never increases.
///
/// Throws DataError on NaN/Inf features or labels outside {0,1}, and
/// std::invalid_argument on shape mismatch.
TrainResult train_logistic(const DenseMatrix& x, std::span<const int> labels,
                           std::vector<std::string> schema, const TrainOptions& options = {});

/// Sigmoid of the linear score for each row. Throws DataError when the
/// column count differs from the model schema.
std::vector<double> predict_scores(const LinearModel& model, const DenseMatrix& x);

/// As above, and also requires `schema` to equal the model's schema.
std::vector<double> predict_scores(const LinearModel& model, const DenseMatrix& x,
                                   std::span<const std::string> schema);

/// CSV `feature,weight,mean,scale`, with `(bias)` and `(l2)` rows first.
void save_model(const std::filesystem::path& path, const LinearModel& model,
                const Standardizer& standardizer);
void load_model(const std::filesystem::path& path, LinearModel& model, Standardizer& standardizer);

}  // namespace relsim
