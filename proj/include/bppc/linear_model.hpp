#pragma once

// Linear SVM (hinge loss, L2) trained by dual coordinate descent, Platt
// calibration of its scores, and a plain-text model file.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bppc/features.hpp"
#include "bppc/rng.hpp"

namespace bppc {

struct TrainingExample {
  FeatureVector features;
  int label = 0;  // 1: item in the optimal pricing solution
  std::string instance_tag;
};

struct LinearModel {
  std::array<double, kNumFeatures> weights{};
  double bias = 0.0;
  double platt_a = 0.0;
  double platt_b = 0.0;
  NormalizationPolicy normalization;
  // Range of each feature over the training data (informational).
  std::array<double, kNumFeatures> feature_min{};
  std::array<double, kNumFeatures> feature_max{};

  double score(const FeatureVector& f) const {
    const auto x = f.as_array();
    double s = bias;
    for (int k = 0; k < kNumFeatures; ++k) s += weights[k] * x[k];
    return s;
  }

  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kMinProbability = 1e-6;

// 1 / (1 + exp(t)) without overflow.
inline double logistic_of_neg(double t) {
  if (t >= 0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

inline double platt_probability(double a, double b, double score) { return logistic_of_neg(a * score + b); }

inline double predict_probability(const LinearModel& m, const FeatureVector& f) {
  return std::clamp(platt_probability(m.platt_a, m.platt_b, m.score(f)), kMinProbability, 1.0 - kMinProbability);
}

inline std::vector<double> predict_probability(const LinearModel& m, const std::vector<FeatureVector>& fs) {
  std::vector<double> p;
  p.reserve(fs.size());
  for (const auto& f : fs) p.push_back(predict_probability(m, f));
  return p;
}

struct PlattFit {
  double a = 0.0;
  double b = 0.0;
  int iterations = 0;
  bool converged = false;  // false: line search failed or iteration cap hit
};

// Maximum-likelihood fit of P(y=1|s) = 1 / (1 + exp(a s + b)) by Newton's
// method with backtracking, on the smoothed targets
// t+ = (N+ + 1) / (N+ + 2), t- = 1 / (N- + 2).
inline PlattFit fit_platt(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
  double n_pos = 0, n_neg = 0;
  for (int y : labels) (y ? n_pos : n_neg) += 1;
  if (n_pos == 0 || n_neg == 0) throw TrainingError("Platt scaling needs both classes");

  constexpr int kMaxIter = 100;
  constexpr double kMinStep = 1e-10;
  constexpr double kSigma = 1e-12;
  constexpr double kEps = 1e-8;
  const double hi = (n_pos + 1.0) / (n_pos + 2.0);
  const double lo = 1.0 / (n_neg + 2.0);
  const std::size_t n = scores.size();
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = labels[i] ? hi : lo;

  auto objective = [&](double a, double b) {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = scores[i] * a + b;
      f += z >= 0 ? t[i] * z + std::log1p(std::exp(-z)) : (t[i] - 1.0) * z + std::log1p(std::exp(z));
    }
    return f;
  };

  PlattFit fit;
  fit.a = 0.0;
  fit.b = std::log((n_neg + 1.0) / (n_pos + 1.0));
  double fval = objective(fit.a, fit.b);
  for (fit.iterations = 0; fit.iterations < kMaxIter; ++fit.iterations) {
    double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = scores[i] * fit.a + fit.b;
      double p, q;
      if (z >= 0) {
        const double e = std::exp(-z);
        p = e / (1.0 + e);
        q = 1.0 / (1.0 + e);
      } else {
        const double e = std::exp(z);
        p = 1.0 / (1.0 + e);
        q = e / (1.0 + e);
      }
      const double d2 = p * q;
      h11 += scores[i] * scores[i] * d2;
      h22 += d2;
      h21 += scores[i] * d2;
      const double d1 = t[i] - p;
      g1 += scores[i] * d1;
      g2 += d1;
    }
    if (std::hypot(g1, g2) < kEps) {
      fit.converged = true;
      break;
    }
    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    bool accepted = false;
    while (step >= kMinStep) {
      const double na = fit.a + step * da, nb = fit.b + step * db;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        fit.a = na;
        fit.b = nb;
        fval = nf;
        accepted = true;
        break;
      }
      step /= 2.0;
    }
    if (!accepted) {
      // No descent possible at working precision: the gradient is as small
      // as rounding allows.
      fit.converged = std::hypot(g1, g2) < 1e-6 * static_cast<double>(n);
      break;
    }
  }
  return fit;
}

struct SvmConfig {
  double c = 10.0;  // weight of the average hinge loss against 0.5 * |w|^2
  int max_epochs = 2000;
  double tolerance = 1e-5;  // projected-gradient spread
  std::uint64_t seed = 1;
  double holdout_fraction = 0.2;  // stratified split used to fit Platt parameters
  bool balance_classes = true;  // scale positive loss by #negatives / #positives
};

// Positive-class loss multiplier under class balancing.
inline double positive_class_weight(std::size_t n_pos, std::size_t n_neg) {
  if (n_pos == 0) throw TrainingError("no positive examples");
  return static_cast<double>(n_neg) / static_cast<double>(n_pos);
}

struct SvmFit {
  std::array<double, kNumFeatures> weights{};
  double bias = 0.0;
  int epochs = 0;
};

// Hinge-loss linear SVM with the bias as an extra constant feature:
//   min 0.5 |(w, b)|^2 + (C / m) sum_i c_{y_i} max(0, 1 - y_i (w.x_i + b)),
// solved in the dual by cyclic coordinate descent over a seeded permutation.
inline SvmFit train_linear_svm(const std::vector<TrainingExample>& data, const SvmConfig& cfg) {
  std::size_t n_pos = 0;
  for (const auto& e : data) n_pos += e.label ? 1 : 0;
  const std::size_t n_neg = data.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw TrainingError("training data must contain both classes");
  const double pos_weight = cfg.balance_classes ? positive_class_weight(n_pos, n_neg) : 1.0;
  const double m = static_cast<double>(data.size());

  constexpr int D = kNumFeatures + 1;
  std::vector<std::array<double, D>> x(data.size());
  std::vector<double> y(data.size()), upper(data.size()), qii(data.size()), alpha(data.size(), 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto f = data[i].features.as_array();
    for (int k = 0; k < kNumFeatures; ++k) x[i][k] = f[k];
    x[i][kNumFeatures] = 1.0;
    y[i] = data[i].label ? 1.0 : -1.0;
    upper[i] = cfg.c * (data[i].label ? pos_weight : 1.0) / m;
    qii[i] = 0.0;
    for (double v : x[i]) qii[i] += v * v;
  }
  std::array<double, D> w{};
  std::vector<std::size_t> perm(data.size());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(cfg.seed);
  SvmFit fit;
  for (fit.epochs = 0; fit.epochs < cfg.max_epochs; ++fit.epochs) {
    for (std::size_t k = perm.size(); k > 1; --k) std::swap(perm[k - 1], perm[rng.below(k)]);
    double pg_max = -std::numeric_limits<double>::infinity();
    double pg_min = std::numeric_limits<double>::infinity();
    for (std::size_t i : perm) {
      double wx = 0.0;
      for (int k = 0; k < D; ++k) wx += w[k] * x[i][k];
      const double g = y[i] * wx - 1.0;
      double pg = g;
      if (alpha[i] <= 0.0)
        pg = std::min(g, 0.0);
      else if (alpha[i] >= upper[i])
        pg = std::max(g, 0.0);
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (std::abs(pg) > 1e-14 && qii[i] > 0.0) {
        const double old = alpha[i];
        alpha[i] = std::clamp(old - g / qii[i], 0.0, upper[i]);
        const double d = (alpha[i] - old) * y[i];
        for (int k = 0; k < D; ++k) w[k] += d * x[i][k];
      }
    }
    if (pg_max - pg_min < cfg.tolerance) break;
  }
  for (int k = 0; k < kNumFeatures; ++k) fit.weights[k] = w[k];
  fit.bias = w[kNumFeatures];
  return fit;
}

// Trains the SVM on a stratified (1 - holdout) share of `data` and fits the
// Platt parameters on the scores of the held-out share.
inline LinearModel train_svm(const std::vector<TrainingExample>& data, const SvmConfig& cfg = {},
                             const NormalizationPolicy& policy = {}) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < data.size(); ++i) (data[i].label ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) throw TrainingError("training data must contain both classes");
  Rng rng(derive_seed(cfg.seed, 0x5EED));
  auto shuffle = [&](std::vector<std::size_t>& v) {
    for (std::size_t k = v.size(); k > 1; --k) std::swap(v[k - 1], v[rng.below(k)]);
  };
  shuffle(pos);
  shuffle(neg);
  const auto held = [&](std::size_t count) {
    return static_cast<std::size_t>(std::floor(cfg.holdout_fraction * static_cast<double>(count)));
  };
  const std::size_t hp = held(pos.size()), hn = held(neg.size());
  std::vector<TrainingExample> train, holdout;
  for (std::size_t k = 0; k < pos.size(); ++k) (k < hp ? holdout : train).push_back(data[pos[k]]);
  for (std::size_t k = 0; k < neg.size(); ++k) (k < hn ? holdout : train).push_back(data[neg[k]]);
  bool holdout_ok = hp > 0 && hn > 0;
  if (!holdout_ok) train = data;

  const SvmFit svm = train_linear_svm(train, cfg);
  LinearModel model;
  model.weights = svm.weights;
  model.bias = svm.bias;
  model.normalization = policy;

  const auto& calib = holdout_ok ? holdout : train;
  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& e : calib) {
    scores.push_back(model.score(e.features));
    labels.push_back(e.label);
  }
  const PlattFit platt = fit_platt(scores, labels);
  model.platt_a = platt.a;
  model.platt_b = platt.b;

  model.feature_min.fill(std::numeric_limits<double>::infinity());
  model.feature_max.fill(-std::numeric_limits<double>::infinity());
  for (const auto& e : data) {
    const auto f = e.features.as_array();
    for (int k = 0; k < kNumFeatures; ++k) {
      model.feature_min[k] = std::min(model.feature_min[k], f[k]);
      model.feature_max[k] = std::max(model.feature_max[k], f[k]);
    }
  }
  return model;
}

// Fraction of examples whose SVM score sign matches the label.
inline double training_accuracy(const LinearModel& m, const std::vector<TrainingExample>& data) {
  if (data.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto& e : data) ok += ((m.score(e.features) > 0.0) == (e.label == 1)) ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(data.size());
}

// ---- model file -----------------------------------------------------------
//
//   bppc-linear-model
//   format_version = 1
//   features = f1 f2 f3 f4 fc fr
//   weights = <6 reals>
//   bias = <real>
//   platt_a = <real>
//   platt_b = <real>
//   instance_minmax = <6 flags 0/1>
//   feature_min = <6 reals>
//   feature_max = <6 reals>
//
// Reals use the shortest decimal form that parses back to the same double.

inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("cannot format double");
  return std::string(buf, end);
}

inline double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) throw std::runtime_error("bad real '" + s + "'");
  return v;
}

inline void write_model(std::ostream& out, const LinearModel& m) {
  auto row = [&](const char* key, const std::array<double, kNumFeatures>& v) {
    out << key << " =";
    for (double x : v) out << ' ' << format_double(x);
    out << '\n';
  };
  out << "bppc-linear-model\n";
  out << "format_version = 1\n";
  out << "features =";
  for (const char* n : kFeatureNames) out << ' ' << n;
  out << '\n';
  row("weights", m.weights);
  out << "bias = " << format_double(m.bias) << '\n';
  out << "platt_a = " << format_double(m.platt_a) << '\n';
  out << "platt_b = " << format_double(m.platt_b) << '\n';
  out << "instance_minmax =";
  for (bool b : m.normalization.instance_minmax) out << ' ' << (b ? 1 : 0);
  out << '\n';
  row("feature_min", m.feature_min);
  row("feature_max", m.feature_max);
}

inline LinearModel read_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "bppc-linear-model") throw std::runtime_error("not a bppc model file");
  std::map<std::string, std::vector<std::string>> kv;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("model file: expected 'key = value'");
    std::istringstream k(line.substr(0, eq)), v(line.substr(eq + 1));
    std::string key;
    k >> key;
    std::vector<std::string> vals;
    for (std::string t; v >> t;) vals.push_back(t);
    kv[key] = std::move(vals);
  }
  auto get = [&](const std::string& key, std::size_t count) -> const std::vector<std::string>& {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error("model file: missing '" + key + "'");
    if (it->second.size() != count) throw std::runtime_error("model file: wrong arity for '" + key + "'");
    return it->second;
  };
  if (get("format_version", 1)[0] != "1") throw std::runtime_error("model file: unsupported format_version");
  auto arr = [&](const std::string& key) {
    std::array<double, kNumFeatures> a{};
    const auto& v = get(key, kNumFeatures);
    for (int k = 0; k < kNumFeatures; ++k) a[k] = parse_double(v[k]);
    return a;
  };
  LinearModel m;
  m.weights = arr("weights");
  m.bias = parse_double(get("bias", 1)[0]);
  m.platt_a = parse_double(get("platt_a", 1)[0]);
  m.platt_b = parse_double(get("platt_b", 1)[0]);
  const auto& flags = get("instance_minmax", kNumFeatures);
  for (int k = 0; k < kNumFeatures; ++k) m.normalization.instance_minmax[k] = flags[k] == "1";
  m.feature_min = arr("feature_min");
  m.feature_max = arr("feature_max");
  if (!std::isfinite(m.platt_a) || !std::isfinite(m.platt_b)) throw std::runtime_error("model file: non-finite Platt parameters");
  return m;
}

// CSV with header f1,f2,f3,f4,fc,fr,label,tag.
inline void write_training_csv(std::ostream& out, const std::vector<TrainingExample>& data) {
  out << "f1,f2,f3,f4,fc,fr,label,tag\n";
  for (const auto& e : data) {
    for (double v : e.features.as_array()) out << format_double(v) << ',';
    out << e.label << ',' << e.instance_tag << '\n';
  }
}

}  // namespace bppc
