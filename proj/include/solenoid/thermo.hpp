#pragma once

// Thermodynamic formalism for the geometric potential log λ along branch
// orbits: Birkhoff sums, cylinder-sum pressure approximants
//
//   P_n(s) = (1/n) log Σ_{|a| = n} exp(s · S_n(a)),
//
// the Bowen root P_n(d0) = 0, and the finite-depth exponent d(x, m) solving
// Σ diam(D_{x,a})^t = 1 with the Birkhoff-product diameter proxy.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "solenoid/config.hpp"
#include "solenoid/error.hpp"
#include "solenoid/model.hpp"
#include "solenoid/parallel.hpp"
#include "solenoid/symbolic.hpp"

namespace solenoid {

/// Σ_{i=1..n} log λ(x_i) along the branch orbit of (word, x).
inline double birkhoff_sum(const SolenoidSpec& spec, const Word& word, std::span<const double> x) {
  if (word.empty()) fail(ErrorKind::InvalidInput, "birkhoff_sum needs a nonempty word");
  std::vector<double> orbit;
  branch_orbit(spec, word, x, orbit);
  const std::size_t l = spec.l();
  double acc = 0.0;
  for (std::size_t i = 0; i < word.size(); ++i) acc += std::log(spec.lambda_at({orbit.data() + i * l, l}));
  return acc;
}

namespace detail {

// Depth-first over the word tree below `x`, carrying the running sum so each
// leaf gets exactly the left-to-right sum birkhoff_sum() would produce.
inline void fill_birkhoff(const SolenoidSpec& spec, std::span<const double> x, double acc, std::size_t depth,
                          std::span<double> out) {
  if (depth == 0) {
    out[0] = acc;
    return;
  }
  const std::uint64_t n = spec.degree();
  const std::size_t block = out.size() / n;
  std::vector<double> xb(spec.l());
  for (Symbol c = 0; c < n; ++c) {
    inverse_branch_into(spec.expansion(), c, x, xb);
    fill_birkhoff(spec, xb, acc + std::log(spec.lambda_at(xb)), depth - 1, out.subspan(c * block, block));
  }
}

inline constexpr std::size_t kReductionBlock = 4096;

// log Σ exp(scale · v_i), summed in fixed blocks then a fixed pairwise tree,
// so the result is independent of the thread count.
inline double log_sum_exp(std::span<const double> values, double scale) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  double top = -std::numeric_limits<double>::infinity();
  for (double v : values) top = std::max(top, scale * v);
  const std::size_t blocks = (values.size() + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(blocks, 0.0);
  parallel_blocks(values.size(), kReductionBlock, [&](std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += std::exp(scale * values[i] - top);
    partial[begin / kReductionBlock] = s;
  });
  for (std::size_t width = 1; width < partial.size(); width *= 2)
    for (std::size_t i = 0; i + width < partial.size(); i += 2 * width) partial[i] += partial[i + width];
  return top + std::log(partial[0]);
}

}  // namespace detail

/// Birkhoff sums for all N^n words (lexicographic order) anchored at x.
inline std::vector<double> birkhoff_sums(const SolenoidSpec& spec, std::span<const double> x, std::size_t depth,
                                         std::uint64_t budget = kDefaultWordBudget) {
  if (depth == 0) fail(ErrorKind::InvalidInput, "depth must be >= 1");
  const std::uint64_t total = word_count(spec.degree(), depth);
  require_budget(total, budget, "pressure sum");
  std::vector<double> out(total);
  // Split the tree at a prefix depth with enough subtrees to share out.
  std::size_t split = 0;
  std::uint64_t prefixes = 1;
  while (split < depth && prefixes < 256) {
    prefixes *= spec.degree();
    ++split;
  }
  const std::size_t sub = total / prefixes;
  parallel_blocks(prefixes, 1, [&](std::size_t begin, std::size_t end) {
    std::vector<double> orbit;
    for (std::size_t pidx = begin; pidx < end; ++pidx) {
      const Word prefix = word_from_index(pidx, spec.degree(), split);
      branch_orbit(spec, prefix, x, orbit);
      const std::size_t l = spec.l();
      double acc = 0.0;
      for (std::size_t i = 0; i < split; ++i) acc += std::log(spec.lambda_at({orbit.data() + i * l, l}));
      std::span<const double> tip(orbit.data() + (split - 1) * l, l);
      detail::fill_birkhoff(spec, tip, acc, depth - split, std::span<double>(out).subspan(pidx * sub, sub));
    }
  });
  return out;
}

/// P_n(s) with the bracket from per-cylinder extreme anchors.
struct PressureCurve {
  double s = 0.0;
  std::size_t n = 0;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Birkhoff sums at depth n, cached so P_n can be evaluated at many s.
/// The reference anchor is x = 0; the bracket re-anchors every cylinder at the
/// 2^l corners of the reference partition cell [0, 1/M_11] x ... .
class PressureModel {
 public:
  PressureModel(const SolenoidSpec& spec, std::size_t depth, std::uint64_t budget = kDefaultWordBudget)
      : depth_(depth), degree_(spec.degree()) {
    const std::size_t l = spec.l();
    const std::vector<double> origin(l, 0.0);
    sums_ = birkhoff_sums(spec, origin, depth, budget);
    min_ = sums_;
    max_ = sums_;
    std::vector<double> corner(l);
    for (std::size_t mask = 1; mask < (std::size_t{1} << l); ++mask) {
      for (std::size_t i = 0; i < l; ++i) corner[i] = (mask >> i & 1) ? 1.0 / spec.expansion()[i] : 0.0;
      const auto alt = birkhoff_sums(spec, corner, depth, budget);
      for (std::size_t k = 0; k < alt.size(); ++k) {
        min_[k] = std::min(min_[k], alt[k]);
        max_[k] = std::max(max_[k], alt[k]);
      }
    }
  }

  std::size_t depth() const noexcept { return depth_; }
  std::uint64_t degree() const noexcept { return degree_; }
  std::span<const double> sums() const noexcept { return sums_; }

  double value(double s) const { return detail::log_sum_exp(sums_, s) / static_cast<double>(depth_); }

  PressureCurve curve(double s) const {
    PressureCurve c{s, depth_, value(s), 0.0, 0.0};
    const double a = detail::log_sum_exp(min_, s) / static_cast<double>(depth_);
    const double b = detail::log_sum_exp(max_, s) / static_cast<double>(depth_);
    c.lower = std::min(a, b);
    c.upper = std::max(a, b);
    return c;
  }

 private:
  std::size_t depth_;
  std::uint64_t degree_;
  std::vector<double> sums_, min_, max_;
};

inline PressureCurve pressure_approx(const SolenoidSpec& spec, double s, std::size_t n,
                                     std::uint64_t budget = kDefaultWordBudget) {
  return PressureModel(spec, n, budget).curve(s);
}

struct BowenResult {
  double d0 = 0.0;
  double bracket_width = 0.0;
  std::size_t depth = 0;
  std::size_t iterations = 0;
};

namespace detail {

// Root of a strictly decreasing function with f(0) > 0, by bracket expansion
// and bisection. Monotonicity is checked at every step.
template <typename F>
BowenResult decreasing_root(F&& f, double tol, const char* what) {
  if (!(tol > 0.0)) fail(ErrorKind::InvalidInput, "tolerance must be positive");
  double lo = 0.0, hi = 1.0;
  double flo = f(lo), fhi = f(hi);
  if (!(flo > 0.0)) fail(ErrorKind::InvalidSpec, std::string(what) + " is not positive at s = 0");
  BowenResult r;
  while (fhi >= 0.0) {
    if (!(fhi < flo)) fail(ErrorKind::InvalidSpec, std::string(what) + " is not strictly decreasing");
    lo = hi;
    flo = fhi;
    hi *= 2.0;
    fhi = f(hi);
    if (++r.iterations > 64) fail(ErrorKind::InvalidSpec, std::string(what) + " has no root");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    ++r.iterations;
    if (!(flo > fm && fm > fhi)) fail(ErrorKind::InvalidSpec, std::string(what) + " is not strictly decreasing");
    if (fm == 0.0) {
      r.d0 = mid;
      return r;
    }
    (fm > 0.0 ? lo : hi) = mid;
    (fm > 0.0 ? flo : fhi) = fm;
  }
  r.d0 = 0.5 * (lo + hi);
  r.bracket_width = hi - lo;
  return r;
}

}  // namespace detail

/// Root d0 of the depth-n pressure approximant.
inline BowenResult bowen_root(const PressureModel& model, double tol = 1e-10) {
  auto r = detail::decreasing_root([&](double s) { return model.value(s); }, tol, "pressure");
  r.depth = model.depth();
  return r;
}

inline BowenResult bowen_root(const SolenoidSpec& spec, double tol = 1e-10, std::size_t n = 14,
                              std::uint64_t budget = kDefaultWordBudget) {
  return bowen_root(PressureModel(spec, n, budget), tol);
}

/// exp(S_n) · diam E: Birkhoff-product stand-in for diam D_{x,a}.
inline double diam_proxy(const SolenoidSpec& spec, std::span<const double> x, const Word& word) {
  return std::exp(birkhoff_sum(spec, word, x)) * spec.diam_e();
}

/// d(x, m): the t solving Σ_{|a| = m} diam_proxy(x, a)^t = 1.
inline double finite_m_exponent(const SolenoidSpec& spec, std::span<const double> x, std::size_t m,
                                double tol = 1e-10, std::uint64_t budget = kDefaultWordBudget) {
  auto logs = birkhoff_sums(spec, x, m, budget);
  const double log_diam = std::log(spec.diam_e());
  for (double& v : logs) {
    v += log_diam;
    if (!(v < 0.0)) fail(ErrorKind::InvalidSpec, "a cylinder diameter proxy is >= 1; contraction violated");
  }
  return detail::decreasing_root([&](double t) { return detail::log_sum_exp(logs, t); }, tol, "diameter sum").d0;
}

inline void write_pressure_csv(std::ostream& out, std::span<const PressureCurve> rows) {
  out << "s,n,lower,value,upper\n";
  for (const auto& r : rows)
    out << detail::format_double(r.s) << ',' << r.n << ',' << detail::format_double(r.lower) << ','
        << detail::format_double(r.value) << ',' << detail::format_double(r.upper) << '\n';
}

struct ExponentRow {
  std::size_t m = 0;
  double t = 0.0;
};

inline void write_exponent_csv(std::ostream& out, std::span<const ExponentRow> rows) {
  out << "m,t\n";
  for (const auto& r : rows) out << r.m << ',' << detail::format_double(r.t) << '\n';
}

}  // namespace solenoid
