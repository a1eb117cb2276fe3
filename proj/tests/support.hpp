#pragma once

// Shared fixtures and independent oracles for the test suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "solenoid/solenoid.hpp"

namespace testing_support {

using namespace solenoid;

inline std::string config_path(const std::string& name) { return std::string(SOLENOID_CONFIG_DIR) + "/" + name; }

inline SolenoidSpec fixture(const std::string& name) { return load_spec(config_path(name)); }

/// One-dimensional p = 1 spec with constant λ, f = amp·cos(2πx), d = 0.
inline SolenoidSpec constant_lambda_spec(double lambda, double amp = 0.5, int m = 2) {
  SolenoidConfig c;
  c.expansion = {m};
  c.lambda = TrigPolynomial::constant(1, lambda);
  TrigPolynomial f(1);
  if (amp != 0.0) f.add({{1}, amp, 0.0});
  c.f = {f};
  c.lambda_tilde = lambda / 2.0;
  c.e_radius = 1.0;
  return SolenoidSpec(std::move(c));
}

inline TrigPolynomial random_trig(std::mt19937_64& rng, std::size_t l, double amplitude, int terms) {
  std::uniform_int_distribution<int> freq(-2, 2);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  TrigPolynomial p(l);
  double budget = amplitude;
  for (int t = 0; t < terms; ++t) {
    std::vector<int> k(l);
    bool nonzero = false;
    for (auto& v : k) {
      v = freq(rng);
      nonzero |= v != 0;
    }
    if (!nonzero) k[0] = 1;
    const double share = budget / (terms - t) * std::abs(unit(rng));
    const double ang = std::numbers::pi * unit(rng);
    p.add({k, share * std::cos(ang), share * std::sin(ang)});
    budget -= share;
  }
  return p;
}

/// Random valid spec with l in {1,2}, p in {1,2}, d in {0,1}, variable λ and θ.
inline SolenoidSpec random_spec(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t l = 1 + coin(rng);
  const std::size_t p = 1 + coin(rng);
  const std::size_t d = coin(rng);
  SolenoidConfig c;
  for (std::size_t i = 0; i < l; ++i) c.expansion.push_back(2 + coin(rng));
  const double lam0 = 0.1 + 0.25 * u(rng);
  c.lambda = random_trig(rng, l, 0.5 * lam0 * u(rng), 2);
  c.lambda.add({std::vector<int>(l, 0), lam0, 0.0});
  if (p == 2) c.theta = random_trig(rng, l, 1.5, 2);
  for (std::size_t i = 0; i < p; ++i) c.f.push_back(random_trig(rng, l, 0.45 / std::sqrt(double(p)), 3));
  for (std::size_t i = 0; i < d; ++i) c.g.push_back(random_trig(rng, l, 0.4, 2));
  c.lambda_tilde = 0.5 * (lam0 - c.lambda.oscillation_bound());
  c.e_radius = 1.0;
  c.f_radius = 1.0;
  return SolenoidSpec(std::move(c));
}

inline Word random_word(std::mt19937_64& rng, std::uint64_t alphabet, std::size_t n) {
  std::uniform_int_distribution<std::uint64_t> sym(0, alphabet - 1);
  Word w;
  for (std::size_t i = 0; i < n; ++i) w.symbols.push_back(static_cast<Symbol>(sym(rng)));
  return w;
}

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix a(rows, cols);
  for (auto& e : a.entries()) e = g(rng);
  return a;
}

// ---- independent oracles -------------------------------------------------

/// m(A) = min over unit u of ‖Aᵀu‖, by sampling the sphere and refining with
/// projected gradient descent on uᵀ(AAᵀ)u. Touches no library solver.
inline double brute_force_min_singular(const Matrix& a, std::mt19937_64& rng, int samples = 10000) {
  const std::size_t n = a.rows(), m = a.cols();
  std::vector<double> b(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < m; ++k) b[i * n + j] += a(i, k) * a(j, k);
  auto quad = [&](const std::vector<double>& u) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) s += u[i] * b[i * n + j] * u[j];
    return s;
  };
  auto normalize = [](std::vector<double>& u) {
    double s = 0.0;
    for (double v : u) s += v * v;
    s = std::sqrt(s);
    for (double& v : u) v /= s;
  };
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> best(n), u(n);
  double best_val = INFINITY;
  for (int t = 0; t < samples; ++t) {
    for (double& v : u) v = g(rng);
    normalize(u);
    const double q = quad(u);
    if (q < best_val) {
      best_val = q;
      best = u;
    }
  }
  double trace_norm = 0.0;
  for (double v : b) trace_norm += v * v;
  const double step = 1.0 / std::max(std::sqrt(trace_norm), 1e-300);
  std::vector<double> grad(n);
  for (int it = 0; it < 200000; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      grad[i] = 0.0;
      for (std::size_t j = 0; j < n; ++j) grad[i] += b[i * n + j] * best[j];
    }
    for (std::size_t i = 0; i < n; ++i) best[i] -= step * grad[i];
    normalize(best);
    const double q = quad(best);
    if (std::abs(best_val - q) <= 1e-18 * std::max(1.0, best_val) && it > 100) {
      best_val = std::min(best_val, q);
      break;
    }
    best_val = std::min(best_val, q);
  }
  return std::sqrt(std::max(best_val, 0.0));
}

/// ρDS(x, a) from the explicit series
///   Σ_i (Π_{j<i} D_yν(x_j)) D_xν(x_i, y_i) M^{-i},
/// with its own orbit and fiber evaluation.
inline Matrix series_rho_derivative(const SolenoidSpec& spec, std::span<const double> x, const Word& w) {
  const std::size_t l = spec.l(), p = spec.p(), n = w.size();
  const auto m = spec.expansion();
  std::vector<std::vector<double>> orbit(n + 1, std::vector<double>(l));
  orbit[0].assign(x.begin(), x.end());
  for (std::size_t i = 1; i <= n; ++i) {
    std::uint64_t s = w[i - 1];
    for (std::size_t k = 0; k < l; ++k) {
      orbit[i][k] = (orbit[i - 1][k] + static_cast<double>(s % m[k])) / m[k];
      s /= m[k];
    }
  }
  // y[i]: fiber value fed into ν at x_i (zero at the deepest point).
  std::vector<std::vector<double>> y(n + 2, std::vector<double>(p, 0.0));
  for (std::size_t i = n; i >= 1; --i) {
    const auto& xi = orbit[i];
    const double lam = spec.config().lambda(xi);
    const double th = spec.config().theta ? (*spec.config().theta)(xi) : 0.0;
    if (p == 1) {
      y[i - 1][0] = lam * y[i][0] + spec.config().f[0](xi);
    } else {
      y[i - 1][0] = lam * (std::cos(th) * y[i][0] - std::sin(th) * y[i][1]) + spec.config().f[0](xi);
      y[i - 1][1] = lam * (std::sin(th) * y[i][0] + std::cos(th) * y[i][1]) + spec.config().f[1](xi);
    }
  }
  Matrix total(p, l);
  Matrix prod = Matrix::identity(p);
  for (std::size_t i = 1; i <= n; ++i) {
    Matrix term = prod * spec.dx_nu(orbit[i], y[i]);
    for (std::size_t r = 0; r < p; ++r)
      for (std::size_t k = 0; k < l; ++k) term(r, k) *= std::pow(static_cast<double>(m[k]), -static_cast<double>(i));
    total = total + term;
    prod = prod * spec.dy_nu(orbit[i]);
  }
  return total;
}

inline std::vector<double> random_point(std::mt19937_64& rng, std::size_t l, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> x(l);
  for (auto& v : x) v = u(rng);
  return x;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.entries().size(); ++k) d = std::max(d, std::abs(a.entries()[k] - b.entries()[k]));
  return d;
}

/// Central differences of the middle-fiber graph value in each base coordinate.
inline Matrix finite_difference(const SolenoidSpec& spec, std::vector<double> x, const Word& w, double h) {
  Matrix fd(spec.p(), spec.l());
  for (std::size_t j = 0; j < spec.l(); ++j) {
    auto xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const auto vp = graph_value(spec, xp, w), vm = graph_value(spec, xm, w);
    for (std::size_t i = 0; i < spec.p(); ++i) fd(i, j) = (vp.y[i] - vm.y[i]) / (2 * h);
  }
  return fd;
}

// Independent high-precision evaluations of the hypothesis formulas
// (mpmath, 40 digits), frozen here.
struct HypothesisOracle {
  double lambda_bar, lambda_low, beta_bar, beta_low;
  std::uint64_t n;
  std::size_t l, p;
  double tstar_first_rhs, tstar_second_rhs, estar_lhs, estar_rhs, mu0, mu_upper;
};

inline const HypothesisOracle kOracles[] = {
    {0.05, 0.05, 2, 2, 2, 1, 1, 0.25, 0.1052292219392419451822782, 2.0, 2.828427124746190097603377,
     0.375803649418215161140526, 0.5},
    {0.2, 0.2, 2, 2, 2, 1, 1, 0.25, 0.14399793047570019011396, 2.0, 2.828427124746190097603377,
     0.6020599913279624049420524, 0.5},
    {0.01, 0.01, 3, 2, 6, 2, 2, 0.027777777777777777778, 0.001390121468833682496051679, 9.0,
     9.797958971132712392789136, 0.7142368123574591854700199, 0.5},
    {0.12, 0.08, 2, 2, 2, 1, 1, 0.25, 0.0829862078213716838225329, 2.0, 2.828427124746190097603377,
     0.4927451057399706017418407, 0.419733042379298669653},
    {0.3, 0.3, 2, 2, 4, 2, 2, 0.0625, 0.1721183139978028132113117, 4.0, 8.0, 0.7307362592584154671959441, 0.5},
};

inline RateBounds bounds_of(const HypothesisOracle& o) {
  RateBounds b;
  b.lambda_bar = o.lambda_bar;
  b.lambda_low = o.lambda_low;
  b.beta_bar = o.beta_bar;
  b.beta_low = o.beta_low;
  b.degree = o.n;
  b.lambda_tilde = o.lambda_low / 2;
  return b;
}

/// Middle-thirds Cantor left endpoints at the given depth, as a 1-D cloud.
inline PointCloud cantor_cloud(std::size_t depth) {
  std::vector<double> pts{0.0};
  double len = 1.0;
  for (std::size_t k = 0; k < depth; ++k) {
    len /= 3.0;
    std::vector<double> next;
    for (double a : pts) {
      next.push_back(a);
      next.push_back(a + 2.0 * len);
    }
    pts = std::move(next);
  }
  PointCloud c;
  c.dim = 1;
  c.coords = pts;
  c.word_index.resize(pts.size());
  c.grid_index.resize(pts.size());
  c.resolution = len;
  return c;
}

inline PointCloud line_cloud(std::size_t n) {
  PointCloud c;
  c.dim = 1;
  for (std::size_t i = 0; i < n; ++i) c.coords.push_back(static_cast<double>(i) / static_cast<double>(n));
  c.word_index.resize(n);
  c.grid_index.resize(n);
  c.resolution = 1.0 / static_cast<double>(n);
  return c;
}

}  // namespace testing_support
