#include "epida/infotheory.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "epida/errors.h"

namespace epida {
namespace {

void check_eps(double eps) {
  if (!(eps > 0.0)) {
    throw ConfigError("clamp epsilon must be positive, got " + std::to_string(eps));
  }
}

void check_same_length(const ProbVector& a, const ProbVector& b) {
  if (a.size() != b.size()) {
    throw DomainError("probability vectors differ in length: " +
                      std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
}

}  // namespace

ProbVector ProbVector::from(std::vector<double> probs) {
  if (probs.size() < 2) {
    throw DomainError("a probability vector needs at least two classes, got " +
                      std::to_string(probs.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!std::isfinite(probs[i]) || probs[i] < 0.0) {
      throw DomainError("probability entry " + std::to_string(i) +
                        " is negative or not finite");
    }
    sum += probs[i];
  }
  if (std::abs(sum - 1.0) > kProbSumTolerance) {
    throw DomainError("probabilities sum to " + std::to_string(sum) + ", expected 1");
  }
  return ProbVector(std::move(probs));
}

ProbVector ProbVector::uniform(std::size_t classes) {
  if (classes < 2) throw DomainError("a probability vector needs at least two classes");
  return ProbVector(std::vector<double>(classes, 1.0 / static_cast<double>(classes)));
}

std::size_t ProbVector::argmax() const {
  return static_cast<std::size_t>(std::max_element(probs_.begin(), probs_.end()) -
                                  probs_.begin());
}

OneHotLabel::OneHotLabel(std::size_t class_index, std::size_t classes)
    : index_(class_index), classes_(classes) {
  if (classes < 2) throw DomainError("a label space needs at least two classes");
  if (class_index >= classes) {
    throw DomainError("class index " + std::to_string(class_index) +
                      " outside [0, " + std::to_string(classes) + ")");
  }
}

ProbVector OneHotLabel::materialize() const {
  std::vector<double> probs(classes_, 0.0);
  probs[index_] = 1.0;
  return ProbVector::from(std::move(probs));
}

JointMatrix::JointMatrix(std::size_t classes, std::vector<double> cells)
    : classes_(classes), cells_(std::move(cells)) {
  if (cells_.size() != classes_ * classes_) {
    throw DomainError("joint matrix cell count does not match C*C");
  }
}

ProbVector clamp(const ProbVector& p, double eps) {
  check_eps(eps);
  std::vector<double> out(p.values().begin(), p.values().end());
  for (double& v : out) {
    if (v < eps) v = eps;
  }
  return ProbVector(std::move(out));
}

double entropy(const ProbVector& p, double eps) {
  check_eps(eps);
  double h = 0.0;
  for (double v : p.values()) {
    h -= v * std::log(std::max(v, eps));
  }
  return h;
}

double relative_entropy(const ProbVector& p, const ProbVector& q, double eps) {
  check_eps(eps);
  check_same_length(p, q);
  double d = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (p[c] > 0.0) d += p[c] * (std::log(p[c]) - std::log(std::max(q[c], eps)));
  }
  return d;
}

double rem_score(const ProbVector& z, const OneHotLabel& y, double eps) {
  check_eps(eps);
  if (z.size() != y.classes()) {
    throw DomainError("prediction has " + std::to_string(z.size()) +
                      " classes, label space has " + std::to_string(y.classes()));
  }
  return -std::log(std::max(z[y.index()], eps));
}

JointMatrix joint(const ProbVector& z, const ProbVector& zt) {
  check_same_length(z, zt);
  const std::size_t c = z.size();
  std::vector<double> cells(c * c);
  double total = 0.0;
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      // Same expression for (i,j) and (j,i) so the result is exactly symmetric.
      const double v = (z[i] * zt[j] + zt[i] * z[j]) / 2.0;
      cells[i * c + j] = v;
      total += v;
    }
  }
  for (double& v : cells) v /= total;
  return JointMatrix(c, std::move(cells));
}

double mutual_info_term(const ProbVector& z, const ProbVector& zt, double eps) {
  check_eps(eps);
  JointMatrix pm = joint(z, zt);
  const std::size_t c = pm.classes();
  std::vector<double> p(pm.cells().begin(), pm.cells().end());
  for (double& v : p) {
    if (v < eps) v = eps;
  }
  std::vector<double> row(c, 0.0);
  std::vector<double> col(c, 0.0);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      row[i] += p[i * c + j];
      col[j] += p[i * c + j];
    }
  }
  double s = 0.0;
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const double pij = p[i * c + j];
      s += pij * (std::log(row[i]) + std::log(col[j]) - std::log(pij));
    }
  }
  return 1.0 - s;
}

double cem_score(const ProbVector& z, const ProbVector& zt, double eps) {
  return mutual_info_term(z, zt, eps) - entropy(z, eps);
}

ScorePair score_pair(const ProbVector& z, const ProbVector& zt, const OneHotLabel& y,
                     double eps) {
  return ScorePair{rem_score(z, y, eps), cem_score(z, zt, eps)};
}

std::vector<double> min_max_norm(std::span<const double> values) {
  if (values.empty()) throw DomainError("min_max_norm of an empty sequence");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  std::vector<double> out(values.size(), 0.0);
  if (range <= 1e-12) return out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = std::clamp((values[i] - lo) / range, 0.0, 1.0);
  }
  return out;
}

CombineScheme CombineScheme::weighted(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("weighted combination needs alpha in [0,1], got " +
                      std::to_string(alpha));
  }
  return CombineScheme(Kind::kWeighted, alpha);
}

double combine(double s_div, double s_qua, const CombineScheme& scheme) {
  switch (scheme.kind()) {
    case CombineScheme::Kind::kAdd:
      return s_div + s_qua;
    case CombineScheme::Kind::kMultiply:
      return s_div * s_qua;
    case CombineScheme::Kind::kWeighted:
      return scheme.alpha() * s_div + (1.0 - scheme.alpha()) * s_qua;
  }
  return 0.0;
}

}  // namespace epida
