#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "solenoid/error.hpp"

namespace solenoid {

/// One summand  c·cos(2π k·x) + s·sin(2π k·x).
struct TrigTerm {
  std::vector<int> frequency;
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;

  double amplitude() const { return std::hypot(cos_coeff, sin_coeff); }
  bool is_constant() const {
    for (int k : frequency)
      if (k != 0) return false;
    return true;
  }

  friend bool operator==(const TrigTerm&, const TrigTerm&) = default;
};

/// Real trigonometric polynomial on the torus R^l / Z^l. Integer frequencies
/// make every instance 1-periodic in each coordinate.
class TrigPolynomial {
 public:
  TrigPolynomial() = default;
  explicit TrigPolynomial(std::size_t dim) : dim_(dim) {}
  TrigPolynomial(std::size_t dim, std::vector<TrigTerm> terms) : dim_(dim) {
    for (auto& t : terms) add(std::move(t));
  }

  static TrigPolynomial constant(std::size_t dim, double value) {
    TrigPolynomial p(dim);
    p.add({std::vector<int>(dim, 0), value, 0.0});
    return p;
  }

  void add(TrigTerm term) {
    if (term.frequency.size() != dim_)
      fail(ErrorKind::InvalidInput, "trig term has " + std::to_string(term.frequency.size()) +
                                        " frequencies, expected " + std::to_string(dim_));
    if (!std::isfinite(term.cos_coeff) || !std::isfinite(term.sin_coeff))
      fail(ErrorKind::InvalidInput, "trig term coefficient is not finite");
    terms_.push_back(std::move(term));
  }

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<TrigTerm>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

  double operator()(std::span<const double> x) const {
    double v = 0.0;
    for (const auto& t : terms_) {
      const double a = phase(t, x);
      v += t.cos_coeff * std::cos(a) + t.sin_coeff * std::sin(a);
    }
    return v;
  }

  /// Partial derivatives in each base coordinate.
  std::vector<double> gradient(std::span<const double> x) const {
    std::vector<double> g(dim_, 0.0);
    for (const auto& t : terms_) {
      const double a = phase(t, x);
      const double dv = 2.0 * std::numbers::pi * (t.sin_coeff * std::cos(a) - t.cos_coeff * std::sin(a));
      for (std::size_t j = 0; j < dim_; ++j) g[j] += dv * t.frequency[j];
    }
    return g;
  }

  /// Mean value: sum of the frequency-zero cosine coefficients.
  double mean() const {
    double c = 0.0;
    for (const auto& t : terms_)
      if (t.is_constant()) c += t.cos_coeff;
    return c;
  }

  /// Rigorous bound on |p(x) - mean| from the term amplitudes.
  double oscillation_bound() const {
    double b = 0.0;
    for (const auto& t : terms_)
      if (!t.is_constant()) b += t.amplitude();
    return b;
  }

  /// Rigorous bound on sup |p|.
  double sup_abs_bound() const { return std::abs(mean()) + oscillation_bound(); }

  /// Rigorous bound on sup |∂p/∂x_j|.
  double gradient_bound(std::size_t j) const {
    double b = 0.0;
    for (const auto& t : terms_) b += 2.0 * std::numbers::pi * std::abs(t.frequency[j]) * t.amplitude();
    return b;
  }

  friend bool operator==(const TrigPolynomial&, const TrigPolynomial&) = default;

 private:
  static double phase(const TrigTerm& t, std::span<const double> x) {
    double a = 0.0;
    for (std::size_t j = 0; j < t.frequency.size(); ++j) a += t.frequency[j] * x[j];
    return 2.0 * std::numbers::pi * a;
  }

  std::size_t dim_ = 0;
  std::vector<TrigTerm> terms_;
};

}  // namespace solenoid
