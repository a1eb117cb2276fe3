#pragma once

// Unstable graphs S(x, a) of the attractor and point clouds of its slices.
//
// For a word a = (a_1, ..., a_n) with branch orbit x_1, ..., x_n (see
// symbolic.hpp), S(x, a) is the fiber image of (x_n, 0, 0) after n forward
// steps: start at y = 0, z = 0 over x_n and apply ν, ψ over x_n, ..., x_1.
// Its base derivative ρDS follows the backward recursion
//
//   G_{n+1} = 0,   G_i = (D_x ν(x_i, y_i) + D_y ν(x_i) G_{i+1}) M^{-1},
//
// where y_i is the middle-fiber value over x_i, and ρDS(x, a) = G_1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "solenoid/config.hpp"
#include "solenoid/error.hpp"
#include "solenoid/linalg.hpp"
#include "solenoid/model.hpp"
#include "solenoid/parallel.hpp"
#include "solenoid/symbolic.hpp"

namespace solenoid {

struct FiberValue {
  std::vector<double> y, z;
};

/// Value and base derivative of one unstable graph over a base point.
struct GraphPatch {
  std::vector<double> x;
  Word word;
  FiberValue value;
  Matrix rho_derivative;  // p x l
  double resolution = 0.0;
};

/// λ̄^n (diam E + diam F): distance from the depth-n value to the infinite-word limit.
inline double truncation_bound(const SolenoidSpec& spec, std::size_t depth) {
  return std::pow(spec.lambda_upper_bound(), static_cast<double>(depth)) * (spec.diam_e() + spec.diam_f());
}

inline FiberValue graph_value(const SolenoidSpec& spec, std::span<const double> x, const Word& word) {
  if (word.empty()) fail(ErrorKind::InvalidInput, "graph_value needs a nonempty word");
  std::vector<double> orbit;
  branch_orbit(spec, word, x, orbit);
  const std::size_t l = spec.l();
  FiberValue v{std::vector<double>(spec.p(), 0.0), std::vector<double>(spec.d(), 0.0)};
  for (std::size_t i = word.size(); i-- > 0;) {
    std::span<const double> xi(orbit.data() + i * l, l);
    spec.nu(xi, v.y, v.y);
    spec.psi(xi, v.z, v.z);
  }
  return v;
}

namespace detail {
inline void scale_columns_by_inverse_expansion(Matrix& m, std::span<const int> expansion) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) /= expansion[j];
}
}  // namespace detail

inline GraphPatch graph_patch(const SolenoidSpec& spec, std::span<const double> x, const Word& word) {
  if (word.empty()) fail(ErrorKind::InvalidInput, "graph_patch needs a nonempty word");
  std::vector<double> orbit;
  branch_orbit(spec, word, x, orbit);
  const std::size_t l = spec.l();
  GraphPatch g;
  g.x.assign(x.begin(), x.end());
  g.word = word;
  g.value = {std::vector<double>(spec.p(), 0.0), std::vector<double>(spec.d(), 0.0)};
  g.rho_derivative = Matrix(spec.p(), l);
  for (std::size_t i = word.size(); i-- > 0;) {
    std::span<const double> xi(orbit.data() + i * l, l);
    Matrix next = spec.dx_nu(xi, g.value.y) + spec.dy_nu(xi) * g.rho_derivative;
    detail::scale_columns_by_inverse_expansion(next, spec.expansion());
    g.rho_derivative = std::move(next);
    spec.nu(xi, g.value.y, g.value.y);
    spec.psi(xi, g.value.z, g.value.z);
  }
  g.resolution = truncation_bound(spec, word.size());
  return g;
}

inline Matrix graph_rho_derivative(const SolenoidSpec& spec, std::span<const double> x, const Word& word) {
  return graph_patch(spec, x, word).rho_derivative;
}

namespace detail {

// Fills `out` (N^depth blocks of p + d doubles, lexicographic word order) with
// S(x, a) for every word of length `depth`. Each tree node evaluates the
// affine fiber map once and applies it to the whole subtree.
inline void fill_slice_values(const SolenoidSpec& spec, std::span<const double> x, std::size_t depth,
                              std::span<double> out) {
  const std::size_t p = spec.p(), d = spec.d(), q = p + d;
  if (depth == 0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const std::uint64_t n = spec.degree();
  const std::size_t block = out.size() / n;
  std::vector<double> xb(spec.l());
  std::vector<double> shift(q);
  for (Symbol c = 0; c < n; ++c) {
    inverse_branch_into(spec.expansion(), c, x, xb);
    auto sub = out.subspan(c * block, block);
    fill_slice_values(spec, xb, depth - 1, sub);
    const double lam = spec.lambda_at(xb);
    for (std::size_t i = 0; i < p; ++i) shift[i] = spec.config().f[i](xb);
    for (std::size_t i = 0; i < d; ++i) shift[p + i] = spec.config().g[i](xb);
    const double lt = spec.lambda_tilde();
    if (p == 1) {
      for (std::size_t k = 0; k < block; k += q) sub[k] = lam * sub[k] + shift[0];
    } else {
      const double th = spec.theta_at(xb);
      const double cs = std::cos(th), sn = std::sin(th);
      for (std::size_t k = 0; k < block; k += q) {
        const double y0 = sub[k], y1 = sub[k + 1];
        sub[k] = lam * (cs * y0 - sn * y1) + shift[0];
        sub[k + 1] = lam * (sn * y0 + cs * y1) + shift[1];
      }
    }
    for (std::size_t k = 0; k < block; k += q)
      for (std::size_t i = 0; i < d; ++i) sub[k + p + i] = lt * sub[k + p + i] + shift[p + i];
  }
}

// Indices (ascending) of points kept after merging points within `tol`
// (max norm). Candidates are swept in order of a fixed linear projection.
inline std::vector<std::size_t> dedup_indices(std::span<const double> coords, std::size_t dim, double tol) {
  const std::size_t n = dim ? coords.size() / dim : 0;
  std::vector<double> proj(n, 0.0);
  double wsum = 0.0;
  for (std::size_t k = 0; k < dim; ++k) wsum += 1.0 + 0.6180339887498949 * k;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < dim; ++k) proj[i] += (1.0 + 0.6180339887498949 * k) * coords[i * dim + k];
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return proj[a] != proj[b] ? proj[a] < proj[b] : a < b;
  });
  const double window = tol * wsum * (1.0 + 1e-9) + 1e-300;
  std::vector<std::size_t> kept;
  for (std::size_t i : order) {
    bool dup = false;
    for (auto it = kept.rbegin(); it != kept.rend() && proj[i] - proj[*it] <= window; ++it) {
      double dist = 0.0;
      for (std::size_t k = 0; k < dim; ++k) dist = std::max(dist, std::abs(coords[i * dim + k] - coords[*it * dim + k]));
      if (dist <= tol) {
        dup = true;
        break;
      }
    }
    if (!dup) kept.push_back(i);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

}  // namespace detail

/// Flat point set with provenance. The first `base_dims` coordinates are torus
/// coordinates in [0,1).
struct PointCloud {
  std::size_t dim = 0;
  std::size_t base_dims = 0;
  std::vector<double> coords;
  std::vector<std::uint64_t> word_index;
  std::vector<std::uint64_t> grid_index;
  double resolution = 0.0;
  std::string spec_hash;
  std::size_t depth = 0;
  std::string grid;

  std::size_t size() const noexcept { return dim ? coords.size() / dim : 0; }
  std::span<const double> point(std::size_t i) const { return {coords.data() + i * dim, dim}; }
};

inline constexpr double kDedupTolerance = 1e-12;

namespace detail {
inline void append_slice(const SolenoidSpec& spec, std::span<const double> x, std::size_t depth,
                         std::uint64_t grid_idx, PointCloud& cloud) {
  const std::size_t q = spec.p() + spec.d();
  const std::uint64_t count = word_count(spec.degree(), depth);
  std::vector<double> values(count * q);
  fill_slice_values(spec, x, depth, values);
  const auto kept = dedup_indices(values, q, kDedupTolerance);
  for (std::size_t i : kept) {
    cloud.coords.insert(cloud.coords.end(), x.begin(), x.end());
    cloud.coords.insert(cloud.coords.end(), values.begin() + static_cast<long>(i * q),
                        values.begin() + static_cast<long>((i + 1) * q));
    cloud.word_index.push_back(i);
    cloud.grid_index.push_back(grid_idx);
  }
}
}  // namespace detail

/// Δ_T(x) at depth n: one point (x, S(x, a)) per word, coincident points merged.
inline PointCloud slice_cloud(const SolenoidSpec& spec, std::span<const double> x, std::size_t depth,
                              std::uint64_t budget = kDefaultWordBudget) {
  if (x.size() != spec.l()) fail(ErrorKind::Shape, "base point dimension mismatch");
  require_budget(word_count(spec.degree(), depth), budget, "slice cloud");
  PointCloud cloud;
  cloud.dim = spec.ambient_dim();
  cloud.base_dims = spec.l();
  cloud.resolution = truncation_bound(spec, depth);
  cloud.spec_hash = spec_hash(spec);
  cloud.depth = depth;
  cloud.grid = "single";
  detail::append_slice(spec, x, depth, 0, cloud);
  return cloud;
}

/// Points per axis of the base grid of spacing h.
inline std::size_t grid_points_per_axis(double h) {
  if (!(h > 0.0) || !(h <= 1.0)) fail(ErrorKind::InvalidInput, "grid spacing must lie in (0, 1]");
  return static_cast<std::size_t>(std::max(1.0, std::round(1.0 / h)));
}

/// Union of depth-n slice clouds over the uniform base grid {j/G}^l, G = round(1/h).
/// Resolution is the sample spacing along components, max(h·sqrt(1 + κ²), λ̄^n C).
inline PointCloud attractor_cloud(const SolenoidSpec& spec, std::size_t depth, double h,
                                  std::uint64_t budget = kDefaultWordBudget) {
  const std::size_t per_axis = grid_points_per_axis(h);
  const std::size_t l = spec.l();
  const std::uint64_t grid_total = word_count(per_axis, l);
  const std::uint64_t words = word_count(spec.degree(), depth);
  const std::uint64_t needed =
      (grid_total != 0 && words > std::numeric_limits<std::uint64_t>::max() / grid_total)
          ? std::numeric_limits<std::uint64_t>::max()
          : words * grid_total;
  require_budget(needed, budget, "attractor cloud");

  std::vector<PointCloud> parts(grid_total);
  parallel_blocks(grid_total, 16, [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(l);
    for (std::size_t g = begin; g < end; ++g) {
      std::size_t r = g;
      for (std::size_t i = 0; i < l; ++i) {
        x[i] = static_cast<double>(r % per_axis) / static_cast<double>(per_axis);
        r /= per_axis;
      }
      parts[g].dim = spec.ambient_dim();
      detail::append_slice(spec, x, depth, g, parts[g]);
    }
  });

  PointCloud cloud;
  cloud.dim = spec.ambient_dim();
  cloud.base_dims = l;
  // Neighbouring samples of one component sit up to h·sqrt(1 + κ²) apart.
  const double spacing = std::hypot(1.0, spec.graph_slope_bound()) / static_cast<double>(per_axis);
  cloud.resolution = std::max(spacing, truncation_bound(spec, depth));
  cloud.spec_hash = spec_hash(spec);
  cloud.depth = depth;
  cloud.grid = "uniform " + std::to_string(per_axis) + "^" + std::to_string(l);
  for (auto& part : parts) {
    cloud.coords.insert(cloud.coords.end(), part.coords.begin(), part.coords.end());
    cloud.word_index.insert(cloud.word_index.end(), part.word_index.begin(), part.word_index.end());
    cloud.grid_index.insert(cloud.grid_index.end(), part.grid_index.begin(), part.grid_index.end());
  }
  return cloud;
}

/// CSV: coordinate columns, word index, base-grid index.
inline void write_cloud_csv(std::ostream& out, const SolenoidSpec& spec, const PointCloud& cloud) {
  for (std::size_t i = 0; i < spec.l(); ++i) out << 'x' << i + 1 << ',';
  for (std::size_t i = 0; i < spec.p(); ++i) out << 'y' << i + 1 << ',';
  for (std::size_t i = 0; i < spec.d(); ++i) out << 'z' << i + 1 << ',';
  out << "word_index,grid_index\n";
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    for (double c : cloud.point(k)) out << detail::format_double(c) << ',';
    out << cloud.word_index[k] << ',' << cloud.grid_index[k] << '\n';
  }
}

inline void write_cloud_metadata(std::ostream& out, const PointCloud& cloud) {
  out << "spec_hash = " << cloud.spec_hash << "\n"
      << "depth = " << cloud.depth << "\n"
      << "resolution = " << detail::format_double(cloud.resolution) << "\n"
      << "grid = " << cloud.grid << "\n"
      << "points = " << cloud.size() << "\n";
}

}  // namespace solenoid
