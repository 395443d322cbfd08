#pragma once

// Entropy-based scoring primitives for augmented-sample selection.
//
// All quantities are in nats. Probabilities below the clamp constant are
// raised to it before any logarithm is taken; clamped vectors are not
// renormalized.

#include <cstddef>
#include <span>
#include <vector>

namespace epida {

inline constexpr double kDefaultClampEps = 1e-10;
inline constexpr double kProbSumTolerance = 1e-6;

// A length-C (C >= 2) probability distribution.
class ProbVector {
 public:
  // Validates nonnegativity, C >= 2 and |sum - 1| <= kProbSumTolerance.
  // Throws DomainError otherwise.
  static ProbVector from(std::vector<double> probs);
  static ProbVector uniform(std::size_t classes);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> values() const noexcept { return probs_; }
  std::size_t argmax() const;

  friend bool operator==(const ProbVector&, const ProbVector&) = default;

 private:
  friend ProbVector clamp(const ProbVector& p, double eps);
  explicit ProbVector(std::vector<double> probs) : probs_(std::move(probs)) {}

  std::vector<double> probs_;
};

class OneHotLabel {
 public:
  OneHotLabel(std::size_t class_index, std::size_t classes);

  std::size_t index() const noexcept { return index_; }
  std::size_t classes() const noexcept { return classes_; }
  ProbVector materialize() const;

 private:
  std::size_t index_;
  std::size_t classes_;
};

// Symmetric C x C joint distribution, row-major.
class JointMatrix {
 public:
  JointMatrix(std::size_t classes, std::vector<double> cells);

  std::size_t classes() const noexcept { return classes_; }
  double at(std::size_t row, std::size_t col) const { return cells_[row * classes_ + col]; }
  std::span<const double> cells() const noexcept { return cells_; }

 private:
  std::size_t classes_;
  std::vector<double> cells_;
};

struct ScorePair {
  double s_div_raw = 0.0;
  double s_qua_raw = 0.0;
};

// Raises every entry below eps to eps. Throws ConfigError when eps <= 0.
ProbVector clamp(const ProbVector& p, double eps = kDefaultClampEps);

// -sum p_c ln(max(p_c, eps)).
double entropy(const ProbVector& p, double eps = kDefaultClampEps);

// D(p || q) = sum p_c (ln p_c - ln max(q_c, eps)), with 0 ln 0 = 0.
double relative_entropy(const ProbVector& p, const ProbVector& q,
                        double eps = kDefaultClampEps);

// Diversity score: relative entropy between the one-hot label and the
// candidate's predicted distribution, i.e. -ln max(z_y, eps).
double rem_score(const ProbVector& z, const OneHotLabel& y,
                 double eps = kDefaultClampEps);

// (outer(z, zt) + outer(zt, z)) / 2, normalized to unit mass.
JointMatrix joint(const ProbVector& z, const ProbVector& zt);

// 1 + I(X;Y) of the clamped joint(z, zt). The additive 1 matches the
// reference implementation and cancels under min-max normalization.
double mutual_info_term(const ProbVector& z, const ProbVector& zt,
                        double eps = kDefaultClampEps);

// Quality score: mutual_info_term(z, zt) - entropy(z), i.e. -H(z|zt) + 1.
// z is the candidate's prediction, zt the original sample's.
double cem_score(const ProbVector& z, const ProbVector& zt,
                 double eps = kDefaultClampEps);

ScorePair score_pair(const ProbVector& z, const ProbVector& zt,
                     const OneHotLabel& y, double eps = kDefaultClampEps);

// Affine map onto [0,1]. A degenerate range (max - min <= 1e-12) maps every
// value to 0. Throws DomainError on empty input.
std::vector<double> min_max_norm(std::span<const double> values);

class CombineScheme {
 public:
  enum class Kind { kAdd, kMultiply, kWeighted };

  static CombineScheme add() { return CombineScheme(Kind::kAdd, 0.5); }
  static CombineScheme multiply() { return CombineScheme(Kind::kMultiply, 0.5); }
  // Throws ConfigError unless 0 <= alpha <= 1.
  static CombineScheme weighted(double alpha);

  Kind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }

  friend bool operator==(const CombineScheme&, const CombineScheme&) = default;

 private:
  CombineScheme(Kind kind, double alpha) : kind_(kind), alpha_(alpha) {}

  Kind kind_;
  double alpha_;
};

// add: s_div + s_qua; multiply: s_div * s_qua;
// weighted(a): a * s_div + (1 - a) * s_qua.
double combine(double s_div, double s_qua, const CombineScheme& scheme);

}  // namespace epida
