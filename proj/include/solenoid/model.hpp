#pragma once

// The supported solenoid family on V = T^l x E x F:
//
//   T(x, y, z) = ( M x mod 1,  λ(x) R(θ(x)) y + f(x),  λ̃ z + g(x) )
//
// with M a diagonal integer matrix (entries >= 2), λ a scalar field in (0,1),
// R(θ) a planar rotation when p = 2, and constant inner rate λ̃ < inf λ.
// E and F are centered balls. D_y ν = λ(x) R(θ(x)) is conformal by
// construction.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "solenoid/error.hpp"
#include "solenoid/linalg.hpp"
#include "solenoid/trig.hpp"

namespace solenoid {

/// Raw parameters; validated by SolenoidSpec.
struct SolenoidConfig {
  std::vector<int> expansion;             // diagonal of M, one entry per base dim
  TrigPolynomial lambda;                  // conformal factor λ(x)
  std::optional<TrigPolynomial> theta;    // rotation angle, p = 2 only
  std::vector<TrigPolynomial> f;          // p components
  double lambda_tilde = 0.0;              // inner contraction rate
  std::vector<TrigPolynomial> g;          // d components
  double e_radius = 1.0;
  double f_radius = 1.0;
};

struct Point {
  std::vector<double> x, y, z;
};

namespace detail {
inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}
inline double vector_sup_bound(const std::vector<TrigPolynomial>& comps) {
  double s = 0.0;
  for (const auto& c : comps) s += c.sup_abs_bound() * c.sup_abs_bound();
  return std::sqrt(s);
}
}  // namespace detail

class SolenoidSpec {
 public:
  static constexpr double kDomainTolerance = 1e-12;

  explicit SolenoidSpec(SolenoidConfig cfg) : cfg_(std::move(cfg)) { validate(); }

  const SolenoidConfig& config() const noexcept { return cfg_; }
  std::size_t l() const noexcept { return cfg_.expansion.size(); }
  std::size_t p() const noexcept { return cfg_.f.size(); }
  std::size_t d() const noexcept { return cfg_.g.size(); }
  std::size_t ambient_dim() const noexcept { return l() + p() + d(); }
  std::span<const int> expansion() const noexcept { return cfg_.expansion; }
  std::uint64_t degree() const noexcept { return degree_; }
  double lambda_tilde() const noexcept { return cfg_.lambda_tilde; }
  double e_radius() const noexcept { return cfg_.e_radius; }
  double f_radius() const noexcept { return cfg_.f_radius; }
  double diam_e() const noexcept { return 2.0 * cfg_.e_radius; }
  double diam_f() const noexcept { return d() ? 2.0 * cfg_.f_radius : 0.0; }

  /// Coefficient-sum bounds on λ(x): mean ± sum of amplitudes.
  double lambda_upper_bound() const { return cfg_.lambda.mean() + cfg_.lambda.oscillation_bound(); }
  double lambda_lower_bound() const { return cfg_.lambda.mean() - cfg_.lambda.oscillation_bound(); }

  double lambda_at(std::span<const double> x) const { return cfg_.lambda(x); }
  double theta_at(std::span<const double> x) const { return cfg_.theta ? (*cfg_.theta)(x) : 0.0; }

  /// φ(x) = M x mod 1.
  void base_map(std::span<const double> x, std::span<double> out) const {
    for (std::size_t i = 0; i < l(); ++i) {
      const double v = cfg_.expansion[i] * x[i];
      out[i] = v - std::floor(v);
    }
  }
  std::vector<double> base_map(std::span<const double> x) const {
    std::vector<double> out(l());
    base_map(x, out);
    return out;
  }

  /// ν(x, y) written into `out` (size p). `out` may alias `y`.
  void nu(std::span<const double> x, std::span<const double> y, std::span<double> out) const {
    const double lam = lambda_at(x);
    if (p() == 1) {
      out[0] = lam * y[0] + cfg_.f[0](x);
      return;
    }
    const double th = theta_at(x);
    const double c = std::cos(th), s = std::sin(th);
    const double y0 = y[0], y1 = y[1];
    out[0] = lam * (c * y0 - s * y1) + cfg_.f[0](x);
    out[1] = lam * (s * y0 + c * y1) + cfg_.f[1](x);
  }

  /// ψ(x, z) = λ̃ z + g(x) written into `out` (size d). `out` may alias `z`.
  void psi(std::span<const double> x, std::span<const double> z, std::span<double> out) const {
    for (std::size_t i = 0; i < d(); ++i) out[i] = cfg_.lambda_tilde * z[i] + cfg_.g[i](x);
  }

  /// D_y ν(x) = λ(x) R(θ(x)), a p x p matrix.
  Matrix dy_nu(std::span<const double> x) const {
    const double lam = lambda_at(x);
    if (p() == 1) return Matrix(1, 1, lam);
    const double th = theta_at(x);
    const double c = std::cos(th), s = std::sin(th);
    return Matrix{{lam * c, -lam * s}, {lam * s, lam * c}};
  }

  /// D_x ν(x, y), a p x l matrix.
  Matrix dx_nu(std::span<const double> x, std::span<const double> y) const {
    Matrix out(p(), l());
    const auto dlam = cfg_.lambda.gradient(x);
    if (p() == 1) {
      const auto df = cfg_.f[0].gradient(x);
      for (std::size_t j = 0; j < l(); ++j) out(0, j) = dlam[j] * y[0] + df[j];
      return out;
    }
    const double lam = lambda_at(x);
    const double th = theta_at(x);
    const double c = std::cos(th), s = std::sin(th);
    const double ry0 = c * y[0] - s * y[1], ry1 = s * y[0] + c * y[1];
    const double dry0 = -s * y[0] - c * y[1], dry1 = c * y[0] - s * y[1];
    const auto dth = cfg_.theta ? cfg_.theta->gradient(x) : std::vector<double>(l(), 0.0);
    const auto df0 = cfg_.f[0].gradient(x);
    const auto df1 = cfg_.f[1].gradient(x);
    for (std::size_t j = 0; j < l(); ++j) {
      out(0, j) = dlam[j] * ry0 + lam * dth[j] * dry0 + df0[j];
      out(1, j) = dlam[j] * ry1 + lam * dth[j] * dry1 + df1[j];
    }
    return out;
  }

  /// T applied to a point of V. Throws a domain error outside E x F.
  Point apply(const Point& pt) const {
    if (pt.x.size() != l() || pt.y.size() != p() || pt.z.size() != d())
      fail(ErrorKind::Shape, "point dimensions do not match the map");
    if (detail::norm2(pt.y) > cfg_.e_radius + kDomainTolerance)
      fail(ErrorKind::Domain, "middle-fiber coordinate outside E");
    if (d() && detail::norm2(pt.z) > cfg_.f_radius + kDomainTolerance)
      fail(ErrorKind::Domain, "inner-fiber coordinate outside F");
    Point out{base_map(pt.x), std::vector<double>(p()), std::vector<double>(d())};
    nu(pt.x, pt.y, out.y);
    psi(pt.x, pt.z, out.z);
    return out;
  }

  /// Uniform bound on ‖D_x ν‖ over T^l x E (Frobenius of entrywise bounds).
  double dx_nu_bound() const {
    double acc = 0.0;
    const double theta_scale = cfg_.theta ? 1.0 : 0.0;
    for (std::size_t j = 0; j < l(); ++j) {
      double col = cfg_.lambda.gradient_bound(j) * cfg_.e_radius;
      if (theta_scale != 0.0) col += lambda_upper_bound() * cfg_.theta->gradient_bound(j) * cfg_.e_radius;
      for (std::size_t i = 0; i < p(); ++i) {
        const double e = col + cfg_.f[i].gradient_bound(j);
        acc += e * e;
      }
    }
    return std::sqrt(acc);
  }

  /// κ: bound on ‖ρ DS(x, a)‖ for every word, from the geometric series
  /// Σ λ̄^{i-1} ‖D_x ν‖ β̲^{-i}.
  double derivative_bound() const {
    const double beta_low = *std::min_element(cfg_.expansion.begin(), cfg_.expansion.end());
    return dx_nu_bound() / (beta_low - lambda_upper_bound());
  }

  /// Bound on the slope of every unstable graph x -> S(x, a) in both fibers.
  double graph_slope_bound() const {
    const double beta_low = *std::min_element(cfg_.expansion.begin(), cfg_.expansion.end());
    double dg = 0.0;
    for (std::size_t j = 0; j < l(); ++j)
      for (const auto& c : cfg_.g) dg += c.gradient_bound(j) * c.gradient_bound(j);
    const double kz = std::sqrt(dg) / (beta_low - cfg_.lambda_tilde);
    return std::hypot(derivative_bound(), kz);
  }

 private:
  void validate() {
    if (cfg_.expansion.empty()) fail(ErrorKind::InvalidSpec, "base dimension l must be >= 1");
    degree_ = 1;
    for (int m : cfg_.expansion) {
      if (m < 2) fail(ErrorKind::InvalidSpec, "expansion entries must be >= 2, got " + std::to_string(m));
      degree_ *= static_cast<std::uint64_t>(m);
    }
    const std::size_t dim = l();
    if (p() != 1 && p() != 2)
      fail(ErrorKind::InvalidSpec, "middle-fiber dimension p must be 1 or 2, got " + std::to_string(p()));
    if (cfg_.theta && p() != 2) fail(ErrorKind::InvalidSpec, "rotation field requires p = 2");
    auto check_dim = [&](const TrigPolynomial& t, const char* name) {
      if (t.dim() != dim)
        fail(ErrorKind::InvalidSpec, std::string(name) + " is defined on a torus of the wrong dimension");
    };
    check_dim(cfg_.lambda, "lambda");
    if (cfg_.theta) check_dim(*cfg_.theta, "theta");
    for (const auto& c : cfg_.f) check_dim(c, "f");
    for (const auto& c : cfg_.g) check_dim(c, "g");

    const double hi = lambda_upper_bound(), lo = lambda_lower_bound();
    if (!(lo > 0.0) || !(hi < 1.0))
      fail(ErrorKind::InvalidSpec, "lambda bound [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                       "] leaves (0,1)");
    if (!(cfg_.lambda_tilde > 0.0) || !(cfg_.lambda_tilde < lo))
      fail(ErrorKind::InvalidSpec, "lambda_tilde must lie in (0, inf lambda)");
    if (!(cfg_.e_radius > 0.0) || !(cfg_.f_radius > 0.0))
      fail(ErrorKind::InvalidSpec, "fiber radii must be positive");
    if (hi * cfg_.e_radius + detail::vector_sup_bound(cfg_.f) > cfg_.e_radius + kDomainTolerance)
      fail(ErrorKind::InvalidSpec, "nu does not map E into E");
    if (d() && cfg_.lambda_tilde * cfg_.f_radius + detail::vector_sup_bound(cfg_.g) >
                   cfg_.f_radius + kDomainTolerance)
      fail(ErrorKind::InvalidSpec, "psi does not map F into F");
  }

  SolenoidConfig cfg_;
  std::uint64_t degree_ = 1;
};

/// Contraction and expansion rates of a spec.
struct RateBounds {
  double lambda_bar = 0.0;   // sup λ (rigorous)
  double lambda_low = 0.0;   // inf λ (rigorous)
  double beta_bar = 0.0;     // max M_ii
  double beta_low = 0.0;     // min M_ii
  std::uint64_t degree = 0;  // N = det M
  double lambda_tilde = 0.0;
  double grid_lambda_max = 0.0;  // sampled extremes, reporting only
  double grid_lambda_min = 0.0;
};

inline RateBounds rate_bounds(const SolenoidSpec& spec) {
  RateBounds b;
  b.lambda_bar = spec.lambda_upper_bound();
  b.lambda_low = spec.lambda_lower_bound();
  if (!(b.lambda_low > 0.0) || !(b.lambda_bar < 1.0))
    fail(ErrorKind::InvalidSpec, "lambda coefficient bound leaves (0,1)");
  const auto m = spec.expansion();
  b.beta_bar = *std::max_element(m.begin(), m.end());
  b.beta_low = *std::min_element(m.begin(), m.end());
  b.degree = spec.degree();
  b.lambda_tilde = spec.lambda_tilde();

  const std::size_t l = spec.l();
  const std::size_t per_axis = l == 1 ? 4096 : l == 2 ? 256 : 32;
  std::size_t total = 1;
  for (std::size_t i = 0; i < l && total < (std::size_t{1} << 22); ++i) total *= per_axis;
  b.grid_lambda_max = -std::numeric_limits<double>::infinity();
  b.grid_lambda_min = std::numeric_limits<double>::infinity();
  std::vector<double> x(l);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    for (std::size_t i = 0; i < l; ++i) {
      x[i] = static_cast<double>(r % per_axis) / per_axis;
      r /= per_axis;
    }
    const double v = spec.lambda_at(x);
    b.grid_lambda_max = std::max(b.grid_lambda_max, v);
    b.grid_lambda_min = std::min(b.grid_lambda_min, v);
  }
  return b;
}

/// Evaluation of the decidable hypotheses of the dimension theorem.
struct HypothesisReport {
  bool cone_ok = false;       // 0 < λ̃ < λ̲ <= λ̄ < 1 <= β̲ <= β̄
  bool conformal_ok = false;  // D_y ν conformal (p in {1,2} family)
  bool tstar_first = false;   // λ̄ < N^{-max(l,2)}
  bool tstar_second = false;  // λ̄ < (β̄^l β̲^{2 log N / log(β̲/λ̄) - l})^{2 log λ̲ / log N}
  bool tstar_ok = false;
  bool estar_ok = false;      // β̄^l < N^{1/2} β̲^p
  double tstar_first_rhs = 0.0;
  double tstar_second_rhs = 0.0;
  double estar_lhs = 0.0;
  double estar_rhs = 0.0;
  double mu0 = 0.0;
  double mu_upper = 0.0;      // log λ̄ / (2 log λ̲)
  bool mu_interval_nonempty = false;
};

inline HypothesisReport check_hypotheses(const RateBounds& b, std::size_t l, std::size_t p) {
  using std::log;
  using std::pow;
  if (!(b.lambda_bar < 1.0) || !(b.lambda_low < 1.0) || !(b.lambda_low > 0.0))
    fail(ErrorKind::InvalidSpec, "degenerate contraction rate (log lambda = 0)");
  if (b.degree < 2) fail(ErrorKind::InvalidSpec, "degree must be >= 2");
  const double n = static_cast<double>(b.degree);
  const double ln = log(n);
  const double li = static_cast<double>(l), pi = static_cast<double>(p);
  const double log_ratio = log(b.beta_low / b.lambda_bar);
  if (log_ratio == 0.0) fail(ErrorKind::InvalidSpec, "degenerate log(beta_low / lambda_bar) = 0");
  const double q = log(pow(b.beta_low, -li) * pow(b.lambda_bar, pi) * n * n);
  if (q == 0.0) fail(ErrorKind::InvalidSpec, "degenerate log(N^2 beta_low^-l lambda_bar^p) = 0");

  HypothesisReport r;
  r.cone_ok = 0.0 < b.lambda_tilde && b.lambda_tilde < b.lambda_low && b.lambda_low <= b.lambda_bar &&
              b.lambda_bar < 1.0 && 1.0 <= b.beta_low && b.beta_low <= b.beta_bar;
  r.conformal_ok = p == 1 || p == 2;

  r.tstar_first_rhs = pow(n, -std::max(li, 2.0));
  r.tstar_first = b.lambda_bar < r.tstar_first_rhs;
  const double inner = pow(b.beta_bar, li) * pow(b.beta_low, 2.0 * ln / log_ratio - li);
  r.tstar_second_rhs = pow(inner, 2.0 * log(b.lambda_low) / ln);
  r.tstar_second = b.lambda_bar < r.tstar_second_rhs;
  r.tstar_ok = r.tstar_first && r.tstar_second;

  r.estar_lhs = pow(b.beta_bar, li);
  r.estar_rhs = std::sqrt(n) * pow(b.beta_low, pi);
  r.estar_ok = r.estar_lhs < r.estar_rhs;

  const double lb = log(b.beta_bar), lbl = log(b.beta_low);
  const double numer = (li * lb - pi * lbl) / (2.0 * ln) - li * lb / q;
  const double denom = 0.5 - 2.0 * ln / (2.0 * q);
  r.mu0 = numer / denom;
  r.mu_upper = log(b.lambda_bar) / (2.0 * log(b.lambda_low));
  r.mu_interval_nonempty = r.mu0 < r.mu_upper;
  return r;
}

/// ‖(D_y ν)ᵀ D_y ν − λ(x)² I‖_F at a base point; zero for a conformal fiber map.
inline double conformality_defect(const SolenoidSpec& spec, std::span<const double> x) {
  const Matrix a = spec.dy_nu(x);
  const double lam = spec.lambda_at(x);
  Matrix diff = a.transpose() * a - Matrix::identity(spec.p()) * (lam * lam);
  return diff.frobenius_norm();
}

}  // namespace solenoid
