#pragma once

// Numerical probe of intrinsic transversality. Over a base grid, every pair of
// depth-k components with distinct first letters whose ρ-projections come
// within δ1 of each other is recorded together with its margin
// m(ρDS(x,a) − ρDS(x,b)). A positive minimum margin is evidence, not proof.
//
// Components are evaluated on words extended by a tail of zeros so the graphs
// sit within λ̄^{k+tail} of the attractor's own components.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "solenoid/config.hpp"
#include "solenoid/error.hpp"
#include "solenoid/linalg.hpp"
#include "solenoid/manifolds.hpp"
#include "solenoid/model.hpp"
#include "solenoid/parallel.hpp"
#include "solenoid/symbolic.hpp"

namespace solenoid {

inline constexpr double kDefaultMarginFloor = 1e-9;

struct MarginSample {
  double gap = 0.0;
  double margin = 0.0;
};

namespace detail {
inline void require_wide_difference(const SolenoidSpec& spec) {
  if (spec.p() > spec.l())
    fail(ErrorKind::Shape, "transversality margins need p <= l (got p = " + std::to_string(spec.p()) +
                               ", l = " + std::to_string(spec.l()) + ")");
}

inline double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}
}  // namespace detail

/// Gap ‖ρS(x,a) − ρS(x,b)‖ and margin m(ρDS(x,a) − ρDS(x,b)).
inline MarginSample margin_at(const SolenoidSpec& spec, std::span<const double> x, const Word& a, const Word& b) {
  detail::require_wide_difference(spec);
  if (a.empty() || a.size() != b.size()) fail(ErrorKind::InvalidInput, "margin_at needs nonempty words of equal length");
  if (a[0] == b[0]) fail(ErrorKind::InvalidInput, "margin_at needs distinct first letters");
  const auto pa = graph_patch(spec, x, a);
  const auto pb = graph_patch(spec, x, b);
  return {detail::distance(pa.value.y, pb.value.y), smallest_singular_value(pa.rho_derivative - pb.rho_derivative)};
}

struct OverlapCandidate {
  std::uint64_t grid_index = 0;
  std::vector<double> x;
  std::uint64_t word_a = 0;  // lexicographic index among depth-k words
  std::uint64_t word_b = 0;
  double gap = 0.0;
  double margin = 0.0;
};

enum class Verdict { NoOverlapsFound, TransversalMarginPositive, DegenerateMargin };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::NoOverlapsFound: return "no-overlaps-found";
    case Verdict::TransversalMarginPositive: return "transversal-margin-positive";
    case Verdict::DegenerateMargin: return "degenerate-margin";
  }
  return "unknown";
}

struct ScanOptions {
  std::size_t depth = 8;
  std::optional<double> delta;     // default 4 λ̄^k diam E
  double grid = 1.0 / 256.0;
  std::optional<std::size_t> tail; // default: λ̄^{k+tail} <= 1e-13, at most 64
  double margin_floor = kDefaultMarginFloor;
  std::uint64_t budget = kDefaultWordBudget;
};

struct TransversalityReport {
  std::size_t depth = 0;
  double delta = 0.0;
  std::string grid;
  std::size_t tail = 0;
  double margin_floor = kDefaultMarginFloor;
  std::uint64_t pairs_examined = 0;  // distinct-first-letter pairs, all grid points
  std::vector<OverlapCandidate> candidates;
  std::optional<double> c1_estimate;  // min margin / 2
  Verdict verdict = Verdict::NoOverlapsFound;
};

inline std::size_t default_tail(const SolenoidSpec& spec, std::size_t depth) {
  const double lam = spec.lambda_upper_bound();
  std::size_t t = 0;
  while (t < 64 && std::pow(lam, static_cast<double>(depth + t)) > 1e-13) ++t;
  return t;
}

inline TransversalityReport overlap_scan(const SolenoidSpec& spec, const ScanOptions& opt) {
  detail::require_wide_difference(spec);
  if (opt.depth == 0) fail(ErrorKind::InvalidInput, "scan depth must be >= 1");
  const std::size_t l = spec.l(), p = spec.p();
  const std::size_t per_axis = grid_points_per_axis(opt.grid);
  const std::uint64_t grid_total = word_count(per_axis, l);
  const std::uint64_t words = word_count(spec.degree(), opt.depth);
  const double pairs_per_point = static_cast<double>(words) * (static_cast<double>(words) - 1.0) / 2.0;
  const double needed = pairs_per_point * static_cast<double>(grid_total);
  require_budget(needed > 1.8e19 ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(needed),
                 opt.budget, "overlap scan");

  TransversalityReport rep;
  rep.depth = opt.depth;
  rep.delta = opt.delta.value_or(4.0 * std::pow(spec.lambda_upper_bound(), static_cast<double>(opt.depth)) * spec.diam_e());
  rep.grid = "uniform " + std::to_string(per_axis) + "^" + std::to_string(l);
  rep.tail = opt.tail.value_or(default_tail(spec, opt.depth));
  rep.margin_floor = opt.margin_floor;
  const std::uint64_t block = words / spec.degree();  // words sharing a first letter
  rep.pairs_examined = grid_total * ((words * words - spec.degree() * block * block) / 2);

  std::vector<std::vector<OverlapCandidate>> per_point(grid_total);
  parallel_blocks(grid_total, 1, [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(l);
    std::vector<double> ys(words * p);
    std::vector<Matrix> ds(words);
    for (std::size_t g = begin; g < end; ++g) {
      std::size_t r = g;
      for (std::size_t i = 0; i < l; ++i) {
        x[i] = static_cast<double>(r % per_axis) / static_cast<double>(per_axis);
        r /= per_axis;
      }
      for (std::uint64_t w = 0; w < words; ++w) {
        Word word = word_from_index(w, spec.degree(), opt.depth);
        word.symbols.resize(opt.depth + rep.tail, 0);
        auto patch = graph_patch(spec, x, word);
        std::copy(patch.value.y.begin(), patch.value.y.end(), ys.begin() + static_cast<long>(w * p));
        ds[w] = std::move(patch.rho_derivative);
      }
      for (std::uint64_t a = 0; a < words; ++a) {
        for (std::uint64_t b = (a / block + 1) * block; b < words; ++b) {
          const double gap = detail::distance({ys.data() + a * p, p}, {ys.data() + b * p, p});
          if (gap > rep.delta) continue;
          per_point[g].push_back({g, x, a, b, gap, smallest_singular_value(ds[a] - ds[b])});
        }
      }
    }
  });

  for (auto& part : per_point)
    for (auto& c : part) rep.candidates.push_back(std::move(c));
  if (!rep.candidates.empty()) {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& c : rep.candidates) lo = std::min(lo, c.margin);
    rep.c1_estimate = lo / 2.0;
    rep.verdict = lo < rep.margin_floor ? Verdict::DegenerateMargin : Verdict::TransversalMarginPositive;
  }
  return rep;
}

inline void write_transversality_csv(std::ostream& out, const SolenoidSpec& spec, const TransversalityReport& rep) {
  out << "grid_index,";
  for (std::size_t i = 0; i < spec.l(); ++i) out << 'x' << i + 1 << ',';
  out << "word_a,word_b,gap,margin\n";
  for (const auto& c : rep.candidates) {
    out << c.grid_index << ',';
    for (double v : c.x) out << detail::format_double(v) << ',';
    out << c.word_a << ',' << c.word_b << ',' << detail::format_double(c.gap) << ','
        << detail::format_double(c.margin) << '\n';
  }
  out << "# depth = " << rep.depth << "\n"
      << "# delta1 = " << detail::format_double(rep.delta) << "\n"
      << "# grid = " << rep.grid << "\n"
      << "# tail = " << rep.tail << "\n"
      << "# pairs_examined = " << rep.pairs_examined << "\n"
      << "# candidates = " << rep.candidates.size() << "\n"
      << "# c1_estimate = " << (rep.c1_estimate ? detail::format_double(*rep.c1_estimate) : std::string("none")) << "\n"
      << "# verdict = " << to_string(rep.verdict) << "\n";
}

}  // namespace solenoid
