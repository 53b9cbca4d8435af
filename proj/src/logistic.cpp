#include "relsim/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relsim/csv.hpp"
#include "relsim/error.hpp"
#include "relsim/random.hpp"

namespace relsim {

namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_inputs(const DenseMatrix& x, std::span<const int> labels) {
  if (labels.size() != x.rows()) {
    throw std::invalid_argument("train_logistic: " + std::to_string(labels.size()) + " labels for " +
                                std::to_string(x.rows()) + " rows");
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (double v : x.row(r)) {
      if (!std::isfinite(v)) {
        throw DataError("train_logistic: non-finite feature value in row " + std::to_string(r));
      }
    }
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw DataError("train_logistic: labels must be 0 or 1");
  }
}

}  // namespace

Standardizer Standardizer::fit(const DenseMatrix& x) {
  Standardizer s;
  const std::size_t d = x.cols();
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 1.0);
  if (x.rows() == 0) return s;
  const double n = static_cast<double>(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    for (std::size_t c = 0; c < d; ++c) s.mean[c] += row[c];
  }
  for (double& m : s.mean) m /= n;
  std::vector<double> var(d, 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    for (std::size_t c = 0; c < d; ++c) {
      const double dv = row[c] - s.mean[c];
      var[c] += dv * dv;
    }
  }
  for (std::size_t c = 0; c < d; ++c) {
    const double sd = std::sqrt(var[c] / n);
    s.scale[c] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

void Standardizer::apply(DenseMatrix& x) const {
  if (x.cols() != mean.size()) throw std::invalid_argument("Standardizer::apply: column count mismatch");
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = (row[c] - mean[c]) / scale[c];
  }
}

std::vector<double> sample_weights(std::span<const int> labels, bool balance) {
  std::vector<double> w(labels.size(), 1.0);
  std::size_t pos = 0;
  for (int y : labels) pos += y == 1;
  const std::size_t neg = labels.size() - pos;
  if (!balance || pos == 0 || neg == 0) return w;
  const double n = static_cast<double>(labels.size());
  const double wp = n / (2.0 * static_cast<double>(pos));
  const double wn = n / (2.0 * static_cast<double>(neg));
  for (std::size_t i = 0; i < labels.size(); ++i) w[i] = labels[i] == 1 ? wp : wn;
  return w;
}

Objective logistic_objective(const DenseMatrix& x, std::span<const int> labels,
                             std::span<const double> weights, std::span<const double> w, double b,
                             double l2) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (labels.size() != n || weights.size() != n || w.size() != d) {
    throw std::invalid_argument("logistic_objective: shape mismatch");
  }
  Objective obj;
  obj.grad_w.assign(d, 0.0);
  double total_weight = 0.0;
  for (double s : weights) total_weight += s;
  if (!(total_weight > 0.0)) throw std::invalid_argument("logistic_objective: zero total weight");

  double loss = 0.0;
  double gb = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = x.row(r);
    double z = b;
    for (std::size_t c = 0; c < d; ++c) z += row[c] * w[c];
    const double y = labels[r];
    loss += weights[r] * (softplus(z) - y * z);
    const double resid = weights[r] * (sigmoid(z) - y);
    gb += resid;
    for (std::size_t c = 0; c < d; ++c) obj.grad_w[c] += resid * row[c];
  }
  const double inv = 1.0 / total_weight;
  double wsq = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    obj.grad_w[c] = obj.grad_w[c] * inv + l2 * w[c];
    wsq += w[c] * w[c];
  }
  obj.loss = loss * inv + 0.5 * l2 * wsq;
  obj.grad_b = gb * inv;
  return obj;
}

TrainResult train_logistic(const DenseMatrix& x, std::span<const int> labels,
                           std::vector<std::string> schema, const TrainOptions& options) {
  check_inputs(x, labels);
  if (schema.size() != x.cols()) {
    throw std::invalid_argument("train_logistic: schema has " + std::to_string(schema.size()) +
                                " names for " + std::to_string(x.cols()) + " columns");
  }
  if (x.rows() == 0) throw DataError("train_logistic: no training rows");
  if (!(options.lr > 0.0) || !(options.l2 >= 0.0)) {
    throw std::invalid_argument("train_logistic: lr must be positive and l2 nonnegative");
  }

  const auto weights = sample_weights(labels, options.balance_classes);
  TrainResult result;
  LinearModel& m = result.model;
  m.l2 = options.l2;
  m.feature_schema = std::move(schema);
  m.weights.resize(x.cols());
  Rng rng(options.seed);
  for (double& w : m.weights) w = 1e-3 * (2.0 * rng.uniform() - 1.0);

  Objective obj = logistic_objective(x, labels, weights, m.weights, m.bias, m.l2);
  result.loss_history.push_back(obj.loss);
  double step = options.lr;
  std::vector<double> trial(x.cols());
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    while (step > 1e-20) {
      for (std::size_t c = 0; c < trial.size(); ++c) trial[c] = m.weights[c] - step * obj.grad_w[c];
      const double trial_b = m.bias - step * obj.grad_b;
      Objective next = logistic_objective(x, labels, weights, trial, trial_b, m.l2);
      if (std::isfinite(next.loss) && next.loss <= obj.loss) {
        m.weights.swap(trial);
        m.bias = trial_b;
        obj = std::move(next);
        break;
      }
      step *= 0.5;
    }
    result.loss_history.push_back(obj.loss);
  }
  return result;
}

std::vector<double> predict_scores(const LinearModel& model, const DenseMatrix& x) {
  if (x.cols() != model.weights.size()) {
    throw DataError("predict_scores: features have " + std::to_string(x.cols()) +
                    " columns but the model expects " + std::to_string(model.weights.size()));
  }
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    double z = model.bias;
    for (std::size_t c = 0; c < row.size(); ++c) z += row[c] * model.weights[c];
    out[r] = sigmoid(z);
  }
  return out;
}

std::vector<double> predict_scores(const LinearModel& model, const DenseMatrix& x,
                                   std::span<const std::string> schema) {
  if (!std::equal(schema.begin(), schema.end(), model.feature_schema.begin(),
                  model.feature_schema.end())) {
    throw DataError("predict_scores: feature schema does not match the model's");
  }
  return predict_scores(model, x);
}

void save_model(const std::filesystem::path& path, const LinearModel& model,
                const Standardizer& standardizer) {
  const std::size_t d = model.weights.size();
  if (model.feature_schema.size() != d || standardizer.mean.size() != d ||
      standardizer.scale.size() != d) {
    throw std::invalid_argument("save_model: inconsistent model dimensions");
  }
  auto out = csv::open_output(path);
  out << "feature,weight,mean,scale\n";
  out << "(bias)," << csv::format_double(model.bias) << ",0,1\n";
  out << "(l2)," << csv::format_double(model.l2) << ",0,1\n";
  for (std::size_t c = 0; c < d; ++c) {
    out << model.feature_schema[c] << ',' << csv::format_double(model.weights[c]) << ','
        << csv::format_double(standardizer.mean[c]) << ',' << csv::format_double(standardizer.scale[c])
        << '\n';
  }
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

void load_model(const std::filesystem::path& path, LinearModel& model, Standardizer& standardizer) {
  auto in = csv::open_input(path);
  const std::string source = path.string();
  csv::expect_header(in, "feature,weight,mean,scale", source);
  csv::LineReader reader(in, 1);
  LinearModel m;
  Standardizer s;
  bool have_bias = false;
  bool have_l2 = false;
  std::string line;
  while (reader.next(line)) {
    const std::string where = source + ": line " + std::to_string(reader.line_number());
    const auto f = csv::split(line);
    if (f.size() != 4) throw DataError(where + ": expected 4 columns");
    const double w = csv::parse_double(f[1], where);
    if (f[0] == "(bias)") {
      m.bias = w;
      have_bias = true;
    } else if (f[0] == "(l2)") {
      m.l2 = w;
      have_l2 = true;
    } else {
      const double scale = csv::parse_double(f[3], where);
      if (!(scale > 0.0)) throw DataError(where + ": scale must be positive");
      m.feature_schema.emplace_back(f[0]);
      m.weights.push_back(w);
      s.mean.push_back(csv::parse_double(f[2], where));
      s.scale.push_back(scale);
    }
  }
  if (!have_bias || !have_l2) throw DataError(source + ": missing (bias) or (l2) row");
  model = std::move(m);
  standardizer = std::move(s);
}

}  // namespace relsim
