#pragma once

// Box-counting dimension of point clouds: occupied cells of an ε-grid (torus
// coordinates reduced mod 1), counted on a geometric ladder of scales and
// fitted by least squares of log N(ε) against -log ε. The fitted N(ε) is the
// geometric mean over a fixed set of translated grids.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "solenoid/config.hpp"
#include "solenoid/error.hpp"
#include "solenoid/manifolds.hpp"
#include "solenoid/parallel.hpp"

namespace solenoid {

inline constexpr std::size_t kMaxBoxDim = 8;

namespace detail {

struct BoxKey {
  std::array<std::int64_t, kMaxBoxDim> idx{};
  friend bool operator==(const BoxKey&, const BoxKey&) = default;
};

struct BoxKeyHash {
  std::size_t operator()(const BoxKey& k) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto v : k.idx) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

// floor(v / eps), with quotients within 1e-9 of an integer snapped onto it so
// points that sit on a cell boundary in exact arithmetic land in the upper cell.
inline std::int64_t cell_index(double v, double eps) {
  const double q = v / eps;
  const double r = std::nearbyint(q);
  if (std::abs(q - r) <= 1e-9 * std::max(1.0, std::abs(q))) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::floor(q));
}

// Occupied cells of the ε-grid translated by `offset` (one entry per coordinate).
inline std::uint64_t box_count_shifted(const PointCloud& cloud, double eps, std::span<const double> offset) {
  if (!(eps > 0.0)) fail(ErrorKind::InvalidInput, "box size must be positive");
  if (cloud.dim > kMaxBoxDim)
    fail(ErrorKind::Shape, "box counting supports at most " + std::to_string(kMaxBoxDim) + " coordinates");
  using Set = std::unordered_set<BoxKey, BoxKeyHash>;
  constexpr std::size_t kChunk = 1 << 16;
  const std::size_t n = cloud.size();
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<Set> parts(chunks);
  parallel_blocks(n, kChunk, [&](std::size_t begin, std::size_t end) {
    Set& set = parts[begin / kChunk];
    set.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      BoxKey key;
      const auto pt = cloud.point(i);
      for (std::size_t k = 0; k < cloud.dim; ++k) {
        double c = pt[k];
        if (k < cloud.base_dims) c -= std::floor(c);
        key.idx[k] = cell_index(c + offset[k], eps);
      }
      set.insert(key);
    }
  });
  if (parts.empty()) return 0;
  for (std::size_t c = 1; c < parts.size(); ++c) parts[0].merge(parts[c]);
  return parts[0].size();
}

// Kronecker-sequence grid offsets in [0, eps) per coordinate; offset 0 is the
// origin-anchored grid.
inline std::vector<double> grid_offset(std::size_t index, std::size_t dim, double eps) {
  static constexpr double kIrrational[kMaxBoxDim] = {0.4142135623730951, 0.7320508075688772, 0.2360679774997898,
                                                     0.6457513110645907, 0.3166247903554000, 0.6055512754639891,
                                                     0.1231056256176606, 0.3588989435406736};
  std::vector<double> off(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    const double u = static_cast<double>(index) * kIrrational[k];
    off[k] = (u - std::floor(u)) * eps;
  }
  return off;
}

}  // namespace detail

/// Number of cells of the origin-anchored ε-grid containing at least one point.
inline std::uint64_t box_count(const PointCloud& cloud, double eps) {
  const std::vector<double> zero(cloud.dim, 0.0);
  return detail::box_count_shifted(cloud, eps, zero);
}

/// Geometric mean of the counts over `offsets` translated grids (the first is
/// the origin-anchored one). Smooths the grid-placement noise of sparse sets.
inline double mean_box_count(const PointCloud& cloud, double eps, std::size_t offsets) {
  if (offsets == 0) fail(ErrorKind::InvalidInput, "need at least one grid offset");
  double acc = 0.0;
  for (std::size_t t = 0; t < offsets; ++t)
    acc += std::log(static_cast<double>(detail::box_count_shifted(cloud, eps, detail::grid_offset(t, cloud.dim, eps))));
  return std::exp(acc / static_cast<double>(offsets));
}

/// ε_k = eps0 · 2^{-k}, k = 0 .. rungs-1.
inline std::vector<double> scale_ladder(double eps0, std::size_t rungs) {
  std::vector<double> s(rungs);
  for (std::size_t k = 0; k < rungs; ++k) s[k] = std::ldexp(eps0, -static_cast<int>(k));
  return s;
}

inline constexpr std::size_t kDefaultGridOffsets = 16;

struct ScaleSeries {
  std::vector<double> scales;  // decreasing
  std::vector<std::uint64_t> counts;       // origin-anchored grid
  std::vector<double> mean_counts;         // geometric mean over shifted grids; fitted when present
  double resolution = 0.0;     // of the source cloud
  double extent = 0.0;         // largest bounding-box side of the cloud
  std::size_t points = 0;
  std::string provenance;
};

/// Half-open index range into ScaleSeries::scales.
struct FitWindow {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
};

struct DimFit {
  double slope = 0.0;
  double stderr_ = 0.0;
  FitWindow window;
  std::vector<double> residuals;
};

/// Largest side of the axis-aligned bounding box (torus coordinates mod 1).
inline double cloud_extent(const PointCloud& cloud) {
  double ext = 0.0;
  for (std::size_t k = 0; k < cloud.dim; ++k) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      double c = cloud.point(i)[k];
      if (k < cloud.base_dims) c -= std::floor(c);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    if (cloud.size()) ext = std::max(ext, hi - lo);
  }
  return ext;
}

inline ScaleSeries count_scales(const PointCloud& cloud, std::span<const double> scales,
                                std::size_t offsets = kDefaultGridOffsets) {
  for (std::size_t k = 1; k < scales.size(); ++k)
    if (!(scales[k] < scales[k - 1])) fail(ErrorKind::InvalidInput, "scales must be strictly decreasing");
  ScaleSeries s;
  s.scales.assign(scales.begin(), scales.end());
  for (double eps : scales) {
    s.counts.push_back(box_count(cloud, eps));
    s.mean_counts.push_back(mean_box_count(cloud, eps, offsets));
  }
  s.resolution = cloud.resolution;
  s.extent = cloud_extent(cloud);
  s.points = cloud.size();
  s.provenance = "spec " + cloud.spec_hash + ", depth " + std::to_string(cloud.depth) + ", grid " + cloud.grid;
  return s;
}

/// Scales inside [2 · resolution, extent / 8]; the upper cap is dropped for a
/// single-point cloud.
inline FitWindow auto_window(const ScaleSeries& s) {
  const double hi = s.extent > 0.0 ? s.extent / 8.0 : std::numeric_limits<double>::infinity();
  FitWindow w{s.scales.size(), s.scales.size()};
  for (std::size_t k = 0; k < s.scales.size(); ++k) {
    const bool ok = s.scales[k] >= 2.0 * s.resolution && s.scales[k] <= hi;
    if (ok && w.begin == s.scales.size()) w.begin = k;
    if (ok) w.end = k + 1;
  }
  if (w.begin == s.scales.size()) w = {0, 0};
  return w;
}

/// Least-squares slope of log N(ε) on -log ε over the window.
inline DimFit dim_fit(const ScaleSeries& s, FitWindow w) {
  if (w.end > s.scales.size() || w.begin >= w.end || w.size() < 3)
    fail(ErrorKind::InvalidWindow, "fit window needs at least 3 scales, got " + std::to_string(w.end > w.begin ? w.size() : 0));
  for (std::size_t k = w.begin; k < w.end; ++k)
    if (s.scales[k] < 2.0 * s.resolution)
      fail(ErrorKind::InvalidWindow, "scale " + detail::format_double(s.scales[k]) +
                                         " is below twice the cloud resolution " + detail::format_double(s.resolution));
  const std::size_t m = w.size();
  double mx = 0.0, my = 0.0;
  std::vector<double> xs(m), ys(m);
  for (std::size_t k = 0; k < m; ++k) {
    xs[k] = -std::log(s.scales[w.begin + k]);
    ys[k] = std::log(s.mean_counts.empty() ? static_cast<double>(s.counts[w.begin + k]) : s.mean_counts[w.begin + k]);
    mx += xs[k];
    my += ys[k];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  if (sxx == 0.0) fail(ErrorKind::InvalidWindow, "fit window has coincident scales");
  DimFit f;
  f.slope = sxy / sxx;
  f.window = w;
  const double intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double r = ys[k] - (intercept + f.slope * xs[k]);
    f.residuals.push_back(r);
    ssr += r * r;
  }
  f.stderr_ = std::sqrt(ssr / static_cast<double>(m - 2) / sxx);
  return f;
}

struct DimensionEstimate {
  ScaleSeries series;
  DimFit fit;
};

inline DimensionEstimate estimate_dimension(const PointCloud& cloud, std::span<const double> scales,
                                            std::size_t offsets = kDefaultGridOffsets) {
  DimensionEstimate e{count_scales(cloud, scales, offsets), {}};
  e.fit = dim_fit(e.series, auto_window(e.series));
  return e;
}

/// Box dimension of the depth-n slice Δ_T(x).
inline DimensionEstimate slice_dimension(const SolenoidSpec& spec, std::span<const double> x, std::size_t depth,
                                         std::span<const double> scales, std::uint64_t budget = kDefaultWordBudget,
                                         std::size_t offsets = kDefaultGridOffsets) {
  return estimate_dimension(slice_cloud(spec, x, depth, budget), scales, offsets);
}

/// Box dimension of the attractor sampled on a base grid of spacing h.
inline DimensionEstimate attractor_dimension(const SolenoidSpec& spec, std::size_t depth, double h,
                                             std::span<const double> scales,
                                             std::uint64_t budget = kDefaultWordBudget,
                                             std::size_t offsets = kDefaultGridOffsets) {
  return estimate_dimension(attractor_cloud(spec, depth, h, budget), scales, offsets);
}

inline void write_scale_csv(std::ostream& out, const DimensionEstimate& e) {
  out << "epsilon,count,mean_count\n";
  for (std::size_t k = 0; k < e.series.scales.size(); ++k)
    out << detail::format_double(e.series.scales[k]) << ',' << e.series.counts[k] << ','
        << detail::format_double(e.series.mean_counts.empty() ? static_cast<double>(e.series.counts[k])
                                                              : e.series.mean_counts[k])
        << '\n';
  out << "# slope = " << detail::format_double(e.fit.slope) << "\n"
      << "# stderr = " << detail::format_double(e.fit.stderr_) << "\n"
      << "# window = [" << e.fit.window.begin << ", " << e.fit.window.end << ")\n"
      << "# points = " << e.series.points << "\n"
      << "# resolution = " << detail::format_double(e.series.resolution) << "\n";
}

}  // namespace solenoid
