#pragma once

// Symbolic coding of the base map x -> M x mod 1 on T^l.
//
// The Markov partition is the product grid: cell c = (c_1, ..., c_l) with
// 0 <= c_i < M_ii. Cell indices are packed into one symbol by mixed radix,
// first coordinate least significant:  s = c_1 + M_11 (c_2 + M_22 (c_3 + ...)).
// The grid map is a full shift on N = det M symbols.
//
// Word convention: symbol a_1 selects the first inverse branch taken from x,
// a_2 the next one, and a_n the deepest. So for M = (2) and x = 0,
//
//   word (1, 0):  0 --branch 1--> 0.5 --branch 0--> 0.25
//
// and cylinder_point((1,0), 0) = 0.25 with φ²(0.25) = 0. Dropping a_1 (the
// shift σ) moves the anchor one preimage deeper, which is what makes
// T(x', S(x', σa)) = (x, S(x, a)) hold.

#include <cmath>
#include <cstdint>
#include <iterator>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "solenoid/error.hpp"
#include "solenoid/linalg.hpp"
#include "solenoid/model.hpp"

namespace solenoid {

using Symbol = std::uint32_t;

/// Finite itinerary over the alphabet {0, ..., N-1}.
struct Word {
  std::vector<Symbol> symbols;

  std::size_t size() const noexcept { return symbols.size(); }
  bool empty() const noexcept { return symbols.empty(); }
  Symbol operator[](std::size_t i) const { return symbols[i]; }

  /// σ: drops the first symbol.
  Word shifted() const { return Word{{symbols.begin() + (symbols.empty() ? 0 : 1), symbols.end()}}; }
  Word prefix(std::size_t n) const { return Word{{symbols.begin(), symbols.begin() + static_cast<long>(n)}}; }

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;
};

inline constexpr std::uint64_t kDefaultWordBudget = std::uint64_t{1} << 24;

/// N^n, or UINT64_MAX on overflow.
inline std::uint64_t word_count(std::uint64_t alphabet, std::size_t length) {
  std::uint64_t c = 1;
  for (std::size_t i = 0; i < length; ++i) {
    if (c > std::numeric_limits<std::uint64_t>::max() / alphabet) return std::numeric_limits<std::uint64_t>::max();
    c *= alphabet;
  }
  return c;
}

inline void require_budget(std::uint64_t needed, std::uint64_t budget, const std::string& what) {
  if (needed > budget)
    fail(ErrorKind::Resource, what + " needs " +
                                  (needed == std::numeric_limits<std::uint64_t>::max() ? std::string("> 2^64")
                                                                                      : std::to_string(needed)) +
                                  " evaluations, exceeding budget " + std::to_string(budget));
}

/// Lexicographic rank of a word (a_1 most significant).
inline std::uint64_t word_index(const Word& w, std::uint64_t alphabet) {
  std::uint64_t idx = 0;
  for (Symbol s : w.symbols) idx = idx * alphabet + s;
  return idx;
}

inline Word word_from_index(std::uint64_t index, std::uint64_t alphabet, std::size_t length) {
  Word w{std::vector<Symbol>(length)};
  for (std::size_t i = length; i-- > 0;) {
    w.symbols[i] = static_cast<Symbol>(index % alphabet);
    index /= alphabet;
  }
  return w;
}

/// Streaming lexicographic enumeration of all words of a fixed length.
class WordRange {
 public:
  class iterator {
   public:
    using value_type = Word;
    using difference_type = std::ptrdiff_t;
    using iterator_category = std::input_iterator_tag;

    iterator() = default;
    iterator(std::uint64_t alphabet, std::size_t length, std::uint64_t index)
        : alphabet_(alphabet), index_(index), word_{std::vector<Symbol>(length, 0)} {
      if (index_ != 0) word_ = word_from_index(index_, alphabet_, length);
    }

    const Word& operator*() const { return word_; }
    const Word* operator->() const { return &word_; }
    std::uint64_t index() const noexcept { return index_; }

    iterator& operator++() {
      ++index_;
      for (std::size_t i = word_.size(); i-- > 0;) {
        if (++word_.symbols[i] < alphabet_) break;
        word_.symbols[i] = 0;
      }
      return *this;
    }
    void operator++(int) { ++*this; }

    friend bool operator==(const iterator& a, const iterator& b) { return a.index_ == b.index_; }

   private:
    std::uint64_t alphabet_ = 1;
    std::uint64_t index_ = 0;
    Word word_;
  };

  WordRange(std::uint64_t alphabet, std::size_t length, std::uint64_t count)
      : alphabet_(alphabet), length_(length), count_(count) {}

  iterator begin() const { return {alphabet_, length_, 0}; }
  iterator end() const { return {alphabet_, 0, count_}; }
  std::uint64_t size() const noexcept { return count_; }
  std::size_t length() const noexcept { return length_; }

 private:
  std::uint64_t alphabet_;
  std::size_t length_;
  std::uint64_t count_;
};

/// All N^n words of length n in lexicographic order. Throws a resource error
/// when N^n exceeds `budget`.
inline WordRange enumerate_words(std::uint64_t alphabet, std::size_t length,
                                 std::uint64_t budget = kDefaultWordBudget) {
  const auto count = word_count(alphabet, length);
  require_budget(count, budget, "enumerating words of length " + std::to_string(length));
  return {alphabet, length, count};
}

inline WordRange enumerate_words(const SolenoidSpec& spec, std::size_t length,
                                 std::uint64_t budget = kDefaultWordBudget) {
  return enumerate_words(spec.degree(), length, budget);
}

/// Grid cell multi-index of a symbol.
inline std::vector<int> decode_symbol(const SolenoidSpec& spec, Symbol s) {
  if (s >= spec.degree())
    fail(ErrorKind::InvalidInput, "symbol " + std::to_string(s) + " outside alphabet of size " +
                                      std::to_string(spec.degree()));
  const auto m = spec.expansion();
  std::vector<int> cell(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    cell[i] = static_cast<int>(s % static_cast<Symbol>(m[i]));
    s /= static_cast<Symbol>(m[i]);
  }
  return cell;
}

inline Symbol encode_cell(const SolenoidSpec& spec, std::span<const int> cell) {
  const auto m = spec.expansion();
  Symbol s = 0;
  for (std::size_t i = m.size(); i-- > 0;) {
    if (cell[i] < 0 || cell[i] >= m[i]) fail(ErrorKind::InvalidInput, "cell index out of range");
    s = s * static_cast<Symbol>(m[i]) + static_cast<Symbol>(cell[i]);
  }
  return s;
}

/// Grid cell containing a point of [0,1)^l.
inline Symbol symbol_of(const SolenoidSpec& spec, std::span<const double> x) {
  const auto m = spec.expansion();
  std::vector<int> cell(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double u = x[i] - std::floor(x[i]);
    cell[i] = std::min(m[i] - 1, static_cast<int>(std::floor(u * m[i])));
  }
  return encode_cell(spec, cell);
}

namespace detail {
// Branch step without allocation: out_i = (x_i + c_i) / M_ii.
inline void inverse_branch_into(std::span<const int> m, Symbol s, std::span<const double> x, std::span<double> out) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto mi = static_cast<Symbol>(m[i]);
    out[i] = (x[i] + static_cast<double>(s % mi)) / m[i];
    s /= mi;
  }
}
}  // namespace detail

/// The preimage of x under φ lying in the grid cell `symbol` (for x in [0,1)^l).
inline std::vector<double> inverse_branch(const SolenoidSpec& spec, Symbol symbol, std::span<const double> x) {
  if (symbol >= spec.degree())
    fail(ErrorKind::InvalidInput, "symbol " + std::to_string(symbol) + " outside alphabet");
  std::vector<double> out(spec.l());
  detail::inverse_branch_into(spec.expansion(), symbol, x, out);
  return out;
}

/// Branch orbit x_1, ..., x_n (flattened, n * l doubles): x_i is the i-step
/// preimage of x selected by a_1, ..., a_i.
inline void branch_orbit(const SolenoidSpec& spec, const Word& w, std::span<const double> x, std::vector<double>& out) {
  const std::size_t l = spec.l();
  out.resize(w.size() * l);
  std::span<const double> prev = x;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] >= spec.degree()) fail(ErrorKind::InvalidInput, "word symbol outside alphabet");
    std::span<double> cur(out.data() + i * l, l);
    detail::inverse_branch_into(spec.expansion(), w[i], prev, cur);
    prev = cur;
  }
}

/// a(x): the n-step preimage of x with itinerary `w`, so φ^n(a(x)) = x.
inline std::vector<double> cylinder_point(const SolenoidSpec& spec, const Word& w, std::span<const double> x) {
  if (w.empty()) fail(ErrorKind::InvalidInput, "cylinder_point needs a nonempty word");
  std::vector<double> orbit;
  branch_orbit(spec, w, x, orbit);
  return {orbit.end() - static_cast<long>(spec.l()), orbit.end()};
}

/// Depth-n cylinder: anchor point and the exact (Euclidean) diameter of the
/// grid box of side M_ii^{-n} that carries it.
struct CylinderSet {
  Word word;
  std::vector<double> anchor;
  double diameter = 0.0;
};

inline CylinderSet cylinder_set(const SolenoidSpec& spec, const Word& w, std::span<const double> x) {
  CylinderSet c{w, cylinder_point(spec, w, x), 0.0};
  double acc = 0.0;
  for (int m : spec.expansion()) {
    const double side = std::pow(static_cast<double>(m), -static_cast<double>(w.size()));
    acc += side * side;
  }
  c.diameter = std::sqrt(acc);
  return c;
}

/// Diameter γ of a partition cell.
inline double partition_diameter(const SolenoidSpec& spec) {
  double acc = 0.0;
  for (int m : spec.expansion()) acc += 1.0 / (static_cast<double>(m) * m);
  return std::sqrt(acc);
}

/// Transition matrix A_ij = 1 iff φ(R_i) meets R_j. All ones for grid maps.
inline Matrix admissibility_matrix(const SolenoidSpec& spec) {
  return Matrix(spec.degree(), spec.degree(), 1.0);
}

/// Number of admissible words of length n, 1ᵀ A^{n-1} 1.
inline double count_admissible_words(const Matrix& a, std::size_t n) {
  if (n == 0) return 1.0;
  Matrix v(a.rows(), 1, 1.0);
  for (std::size_t i = 1; i < n; ++i) v = a * v;
  double total = 0.0;
  for (double e : v.entries()) total += e;
  return total;
}

}  // namespace solenoid
