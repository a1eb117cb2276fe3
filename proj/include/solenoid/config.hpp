#pragma once

// Plain-text spec files. Grammar (one statement per line, '#' starts a
// comment, blank lines ignored):
//
//   [base]
//   expansion = 2 3            # diagonal of M (spaces or commas)
//   [nu]
//   p = 2
//   lambda = 0,0 : 0.1, 0      # repeatable trig term  k1,...,kl : cos, sin
//   theta  = 1,0 : 0, 0.3      # optional, p = 2 only
//   f1 = 1,0 : 0.5, 0          # component i of f, 1-based
//   [psi]
//   d = 1
//   lambda_tilde = 0.05
//   g1 = 0,1 : 0.01, 0
//   [domain]
//   E_radius = 1
//   F_radius = 0.5
//
// Unknown sections, unknown or repeated scalar keys and out-of-range component
// indices are rejected with the offending line number.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "solenoid/error.hpp"
#include "solenoid/model.hpp"
#include "solenoid/trig.hpp"

namespace solenoid {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_any(std::string_view s, std::string_view seps) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto j = s.find_first_of(seps, i);
    const auto tok = trim(s.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i));
    if (!tok.empty()) out.push_back(tok);
    if (j == std::string_view::npos) break;
    i = j + 1;
  }
  return out;
}

inline double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  const auto t = trim(s);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    fail(ErrorKind::Parse, where + ": expected a number, got '" + std::string(t) + "'");
  return v;
}

inline long parse_int(std::string_view s, const std::string& where) {
  long v = 0;
  const auto t = trim(s);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    fail(ErrorKind::Parse, where + ": expected an integer, got '" + std::string(t) + "'");
  return v;
}

struct RawTerm {
  std::vector<int> frequency;
  double c = 0.0, s = 0.0;
};

inline RawTerm parse_term(std::string_view value, const std::string& where) {
  const auto colon = value.find(':');
  if (colon == std::string_view::npos)
    fail(ErrorKind::Parse, where + ": trig term needs 'k1,...,kl : cos, sin'");
  RawTerm t;
  for (auto k : split_any(value.substr(0, colon), ", \t"))
    t.frequency.push_back(static_cast<int>(parse_int(k, where)));
  const auto coeffs = split_any(value.substr(colon + 1), ", \t");
  if (coeffs.size() != 2) fail(ErrorKind::Parse, where + ": trig term needs exactly two coefficients");
  t.c = parse_double(coeffs[0], where);
  t.s = parse_double(coeffs[1], where);
  return t;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Parses a spec file body. `source` labels error messages.
inline SolenoidSpec parse_spec(std::string_view text, const std::string& source = "<spec>") {
  using detail::RawTerm;
  std::optional<std::vector<int>> expansion;
  std::optional<long> p, d;
  std::optional<double> lambda_tilde, e_radius, f_radius;
  std::vector<std::pair<RawTerm, std::string>> lambda_terms, theta_terms;
  std::map<long, std::vector<std::pair<RawTerm, std::string>>> f_terms, g_terms;
  bool have_theta = false;

  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = line;
    if (const auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
    sv = detail::trim(sv);
    if (sv.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    if (sv.front() == '[') {
      if (sv.back() != ']') fail(ErrorKind::Parse, where + ": malformed section header");
      section = std::string(detail::trim(sv.substr(1, sv.size() - 2)));
      if (section != "base" && section != "nu" && section != "psi" && section != "domain")
        fail(ErrorKind::Parse, where + ": unknown section '" + section + "'");
      continue;
    }
    const auto eq = sv.find('=');
    if (eq == std::string_view::npos) fail(ErrorKind::Parse, where + ": expected key = value");
    const std::string key(detail::trim(sv.substr(0, eq)));
    const std::string_view value = detail::trim(sv.substr(eq + 1));
    if (section.empty()) fail(ErrorKind::Parse, where + ": key '" + key + "' outside any section");

    auto once = [&](bool already) {
      if (already) fail(ErrorKind::Parse, where + ": duplicate key '" + key + "'");
    };

    auto component = [&](char prefix) -> std::optional<long> {
      if (key.size() < 2 || key[0] != prefix) return std::nullopt;
      long idx = 0;
      const auto [ptr, ec] = std::from_chars(key.data() + 1, key.data() + key.size(), idx);
      if (ec != std::errc() || ptr != key.data() + key.size() || idx < 1) return std::nullopt;
      return idx;
    };

    if (section == "base" && key == "expansion") {
      once(expansion.has_value());
      std::vector<int> m;
      for (auto tok : detail::split_any(value, ", \t")) m.push_back(static_cast<int>(detail::parse_int(tok, where)));
      expansion = std::move(m);
    } else if (section == "nu" && key == "p") {
      once(p.has_value());
      p = detail::parse_int(value, where);
    } else if (section == "nu" && key == "lambda") {
      lambda_terms.emplace_back(detail::parse_term(value, where), where);
    } else if (section == "nu" && key == "theta") {
      have_theta = true;
      theta_terms.emplace_back(detail::parse_term(value, where), where);
    } else if (section == "nu" && component('f')) {
      f_terms[*component('f')].emplace_back(detail::parse_term(value, where), where);
    } else if (section == "psi" && key == "d") {
      once(d.has_value());
      d = detail::parse_int(value, where);
    } else if (section == "psi" && key == "lambda_tilde") {
      once(lambda_tilde.has_value());
      lambda_tilde = detail::parse_double(value, where);
    } else if (section == "psi" && component('g')) {
      g_terms[*component('g')].emplace_back(detail::parse_term(value, where), where);
    } else if (section == "domain" && key == "E_radius") {
      once(e_radius.has_value());
      e_radius = detail::parse_double(value, where);
    } else if (section == "domain" && key == "F_radius") {
      once(f_radius.has_value());
      f_radius = detail::parse_double(value, where);
    } else {
      fail(ErrorKind::Parse, where + ": unknown key '" + key + "' in section [" + section + "]");
    }
  }

  auto require = [&](bool ok, const char* what) {
    if (!ok) fail(ErrorKind::Parse, source + ": missing required key " + what);
  };
  require(expansion.has_value(), "[base] expansion");
  require(p.has_value(), "[nu] p");
  require(!lambda_terms.empty(), "[nu] lambda");
  require(lambda_tilde.has_value(), "[psi] lambda_tilde");
  require(e_radius.has_value(), "[domain] E_radius");
  const long dd = d.value_or(0);
  if (*p < 1 || dd < 0) fail(ErrorKind::Parse, source + ": fiber dimensions must be p >= 1, d >= 0");
  require(dd == 0 || f_radius.has_value(), "[domain] F_radius");

  const std::size_t l = expansion->size();
  auto build = [&](const std::vector<std::pair<RawTerm, std::string>>& raw) {
    TrigPolynomial poly(l);
    for (const auto& [t, where] : raw) {
      if (t.frequency.size() != l)
        fail(ErrorKind::Parse, where + ": term has " + std::to_string(t.frequency.size()) +
                                   " frequencies but the base has dimension " + std::to_string(l));
      poly.add({t.frequency, t.c, t.s});
    }
    return poly;
  };
  auto build_components = [&](const auto& by_index, long count, char prefix) {
    for (const auto& [idx, raw] : by_index)
      if (idx > count)
        fail(ErrorKind::Parse, raw.front().second + ": component " + std::string(1, prefix) +
                                   std::to_string(idx) + " exceeds dimension " + std::to_string(count));
    std::vector<TrigPolynomial> comps;
    for (long i = 1; i <= count; ++i) {
      const auto it = by_index.find(i);
      comps.push_back(it == by_index.end() ? TrigPolynomial(l) : build(it->second));
    }
    return comps;
  };

  SolenoidConfig cfg;
  cfg.expansion = *expansion;
  cfg.lambda = build(lambda_terms);
  if (have_theta) cfg.theta = build(theta_terms);
  cfg.f = build_components(f_terms, *p, 'f');
  cfg.lambda_tilde = *lambda_tilde;
  cfg.g = build_components(g_terms, dd, 'g');
  cfg.e_radius = *e_radius;
  cfg.f_radius = f_radius.value_or(1.0);
  return SolenoidSpec(std::move(cfg));
}

inline SolenoidSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read spec file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str(), path);
}

/// Canonical text form; parse_spec(serialize_spec(s)) reproduces s.
inline std::string serialize_spec(const SolenoidSpec& spec) {
  const auto& c = spec.config();
  std::ostringstream out;
  auto terms = [&](const std::string& key, const TrigPolynomial& poly) {
    for (const auto& t : poly.terms()) {
      out << key << " = ";
      for (std::size_t j = 0; j < t.frequency.size(); ++j) out << (j ? "," : "") << t.frequency[j];
      out << " : " << detail::format_double(t.cos_coeff) << ", " << detail::format_double(t.sin_coeff) << "\n";
    }
  };
  out << "[base]\nexpansion =";
  for (int m : c.expansion) out << ' ' << m;
  out << "\n[nu]\np = " << spec.p() << "\n";
  terms("lambda", c.lambda);
  if (c.theta) terms("theta", *c.theta);
  for (std::size_t i = 0; i < c.f.size(); ++i) terms("f" + std::to_string(i + 1), c.f[i]);
  out << "[psi]\nd = " << spec.d() << "\nlambda_tilde = " << detail::format_double(c.lambda_tilde) << "\n";
  for (std::size_t i = 0; i < c.g.size(); ++i) terms("g" + std::to_string(i + 1), c.g[i]);
  out << "[domain]\nE_radius = " << detail::format_double(c.e_radius)
      << "\nF_radius = " << detail::format_double(c.f_radius) << "\n";
  return out.str();
}

/// 64-bit FNV-1a of the canonical serialization, as 16 hex digits.
inline std::string spec_hash(const SolenoidSpec& spec) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_spec(spec)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace solenoid
