// solenoid-dim: command line front end for the solenoid dimension library.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "solenoid/solenoid.hpp"

namespace {

using namespace solenoid;
using detail::format_double;

struct Options {
  std::string spec_path;
  std::optional<std::size_t> depth;
  std::size_t scales = 8;
  double tol = 1e-10;
  std::uint64_t budget = kDefaultWordBudget;
  std::optional<double> grid;
  std::string out;
  unsigned threads = 0;
  bool no_timestamp = false;

  std::vector<double> x;
  double eps0 = 0.125;
  std::size_t offsets = kDefaultGridOffsets;
  double s_min = 0.0;
  double s_max = 1.0;
  std::size_t s_steps = 50;
  std::vector<std::size_t> m_values{4, 6, 8, 10};
  std::optional<double> delta;
  std::optional<std::size_t> tail;
  double margin_floor = kDefaultMarginFloor;
};

// Ordered "# key = value" lines written ahead of every CSV.
class Metadata {
 public:
  void add(const std::string& key, const std::string& value) { rows_.emplace_back(key, value); }
  void add(const std::string& key, double value) { add(key, format_double(value)); }
  void add(const std::string& key, std::size_t value) { add(key, std::to_string(value)); }

  void write(std::ostream& out) const {
    for (const auto& [k, v] : rows_) out << "# " << k << " = " << v << '\n';
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void emit(const Options& opt, const Metadata& meta, const std::string& body) {
  std::ostringstream full;
  meta.write(full);
  if (!opt.no_timestamp) full << "# timestamp = " << utc_timestamp() << '\n';
  full << body;
  if (opt.out.empty()) {
    std::cout << full.str();
    return;
  }
  std::ofstream f(opt.out, std::ios::binary);
  if (!f) fail(ErrorKind::Io, "cannot open output file '" + opt.out + "'");
  f << full.str();
  f.close();
  if (!f) fail(ErrorKind::Io, "failed writing '" + opt.out + "'");
}

std::vector<double> base_point(const Options& opt, const SolenoidSpec& spec) {
  std::vector<double> x = opt.x;
  if (x.empty()) x.assign(spec.l(), 0.0);
  if (x.size() != spec.l())
    fail(ErrorKind::Parse, "--x has " + std::to_string(x.size()) + " coordinates but the base has dimension " +
                               std::to_string(spec.l()));
  for (double v : x)
    if (!(v >= 0.0 && v < 1.0)) fail(ErrorKind::Parse, "--x coordinates must lie in [0, 1)");
  return x;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

Metadata base_metadata(const std::string& command, const SolenoidSpec& spec) {
  Metadata m;
  m.add("tool", std::string("solenoid-dim ") + kVersion);
  m.add("command", command);
  m.add("spec_hash", spec_hash(spec));
  return m;
}

int run_check(const Options& opt, const SolenoidSpec& spec) {
  const auto b = rate_bounds(spec);
  const auto r = check_hypotheses(b, spec.l(), spec.p());
  auto meta = base_metadata("check", spec);
  std::ostringstream body;
  auto row = [&](const char* k, const std::string& v) { body << k << ',' << v << '\n'; };
  auto flag = [](bool v) { return std::string(v ? "true" : "false"); };
  body << "quantity,value\n";
  row("l", std::to_string(spec.l()));
  row("p", std::to_string(spec.p()));
  row("d", std::to_string(spec.d()));
  row("N", std::to_string(b.degree));
  row("lambda_bar", format_double(b.lambda_bar));
  row("lambda_low", format_double(b.lambda_low));
  row("grid_lambda_max", format_double(b.grid_lambda_max));
  row("grid_lambda_min", format_double(b.grid_lambda_min));
  row("beta_bar", format_double(b.beta_bar));
  row("beta_low", format_double(b.beta_low));
  row("lambda_tilde", format_double(b.lambda_tilde));
  row("cone_ok", flag(r.cone_ok));
  row("conformal_ok", flag(r.conformal_ok));
  row("tstar_first", flag(r.tstar_first));
  row("tstar_first_rhs", format_double(r.tstar_first_rhs));
  row("tstar_second", flag(r.tstar_second));
  row("tstar_second_rhs", format_double(r.tstar_second_rhs));
  row("tstar_ok", flag(r.tstar_ok));
  row("estar_lhs", format_double(r.estar_lhs));
  row("estar_rhs", format_double(r.estar_rhs));
  row("estar_ok", flag(r.estar_ok));
  row("mu0", format_double(r.mu0));
  row("mu_upper", format_double(r.mu_upper));
  row("mu_interval_nonempty", flag(r.mu_interval_nonempty));
  emit(opt, meta, body.str());
  if (!opt.out.empty())
    std::cout << "T* " << (r.tstar_ok ? "ok" : "fails") << ", E* " << (r.estar_ok ? "ok" : "fails")
              << ", mu0 = " << format_double(r.mu0) << ", mu_upper = " << format_double(r.mu_upper) << '\n';
  return 0;
}

int run_pressure(const Options& opt, const SolenoidSpec& spec) {
  const std::size_t n = opt.depth.value_or(14);
  if (opt.s_steps < 2) fail(ErrorKind::Parse, "--s-steps must be >= 2");
  if (!(opt.s_max > opt.s_min)) fail(ErrorKind::Parse, "--s-max must exceed --s-min");
  const PressureModel model(spec, n, opt.budget);
  std::vector<PressureCurve> rows;
  for (std::size_t i = 0; i < opt.s_steps; ++i) {
    const double s = opt.s_min + (opt.s_max - opt.s_min) * static_cast<double>(i) / static_cast<double>(opt.s_steps - 1);
    rows.push_back(model.curve(s));
  }
  auto meta = base_metadata("pressure", spec);
  meta.add("depth", n);
  meta.add("s_min", opt.s_min);
  meta.add("s_max", opt.s_max);
  meta.add("s_steps", opt.s_steps);
  meta.add("budget", std::to_string(opt.budget));
  std::ostringstream body;
  write_pressure_csv(body, rows);
  emit(opt, meta, body.str());
  return 0;
}

int run_bowen(const Options& opt, const SolenoidSpec& spec) {
  const std::size_t n = opt.depth.value_or(14);
  const auto r = bowen_root(spec, opt.tol, n, opt.budget);
  auto meta = base_metadata("bowen", spec);
  meta.add("depth", n);
  meta.add("tol", opt.tol);
  meta.add("budget", std::to_string(opt.budget));
  std::ostringstream body;
  body << "n,d0,bracket_width,iterations\n"
       << r.depth << ',' << format_double(r.d0) << ',' << format_double(r.bracket_width) << ',' << r.iterations
       << '\n';
  emit(opt, meta, body.str());
  if (!opt.out.empty()) std::cout << "d0 = " << format_double(r.d0) << '\n';
  return 0;
}

int run_dxm(const Options& opt, const SolenoidSpec& spec) {
  const auto x = base_point(opt, spec);
  std::vector<ExponentRow> rows;
  for (std::size_t m : opt.m_values) {
    if (m == 0) fail(ErrorKind::Parse, "--m values must be >= 1");
    rows.push_back({m, finite_m_exponent(spec, x, m, opt.tol, opt.budget)});
  }
  auto meta = base_metadata("dxm", spec);
  meta.add("x", join(x));
  meta.add("tol", opt.tol);
  meta.add("budget", std::to_string(opt.budget));
  std::ostringstream body;
  write_exponent_csv(body, rows);
  emit(opt, meta, body.str());
  return 0;
}

void add_dimension_metadata(Metadata& meta, const Options& opt, const DimensionEstimate& e) {
  meta.add("eps0", opt.eps0);
  meta.add("scales", opt.scales);
  meta.add("grid_offsets", opt.offsets);
  meta.add("provenance", e.series.provenance);
  meta.add("budget", std::to_string(opt.budget));
}

int run_slicedim(const Options& opt, const SolenoidSpec& spec) {
  const auto x = base_point(opt, spec);
  const std::size_t n = opt.depth.value_or(12);
  const auto ladder = scale_ladder(opt.eps0, opt.scales);
  const auto e = slice_dimension(spec, x, n, ladder, opt.budget, opt.offsets);
  auto meta = base_metadata("slicedim", spec);
  meta.add("depth", n);
  meta.add("x", join(x));
  add_dimension_metadata(meta, opt, e);
  std::ostringstream body;
  write_scale_csv(body, e);
  emit(opt, meta, body.str());
  if (!opt.out.empty()) std::cout << "slope = " << format_double(e.fit.slope) << '\n';
  return 0;
}

int run_attrdim(const Options& opt, const SolenoidSpec& spec) {
  const std::size_t n = opt.depth.value_or(10);
  const double h = opt.grid.value_or(1.0 / 1024.0);
  const auto ladder = scale_ladder(opt.eps0, opt.scales);
  const auto e = attractor_dimension(spec, n, h, ladder, opt.budget, opt.offsets);
  auto meta = base_metadata("attrdim", spec);
  meta.add("depth", n);
  meta.add("grid", h);
  add_dimension_metadata(meta, opt, e);
  std::ostringstream body;
  write_scale_csv(body, e);
  emit(opt, meta, body.str());
  if (!opt.out.empty()) std::cout << "slope = " << format_double(e.fit.slope) << '\n';
  return 0;
}

int run_transversality(const Options& opt, const SolenoidSpec& spec) {
  ScanOptions so;
  so.depth = opt.depth.value_or(8);
  so.delta = opt.delta;
  so.grid = opt.grid.value_or(1.0 / 256.0);
  so.tail = opt.tail;
  so.margin_floor = opt.margin_floor;
  so.budget = opt.budget;
  const auto rep = overlap_scan(spec, so);
  auto meta = base_metadata("transversality", spec);
  meta.add("depth", so.depth);
  meta.add("grid", so.grid);
  meta.add("margin_floor", so.margin_floor);
  meta.add("budget", std::to_string(opt.budget));
  std::ostringstream body;
  write_transversality_csv(body, spec, rep);
  emit(opt, meta, body.str());
  if (!opt.out.empty())
    std::cout << "verdict = " << to_string(rep.verdict) << ", candidates = " << rep.candidates.size() << '\n';
  return 0;
}

int run_export_cloud(const Options& opt, const SolenoidSpec& spec) {
  const std::size_t n = opt.depth.value_or(10);
  PointCloud cloud;
  auto meta = base_metadata("export-cloud", spec);
  meta.add("depth", n);
  if (opt.grid) {
    cloud = attractor_cloud(spec, n, *opt.grid, opt.budget);
    meta.add("grid", *opt.grid);
  } else {
    const auto x = base_point(opt, spec);
    cloud = slice_cloud(spec, x, n, opt.budget);
    meta.add("x", join(x));
  }
  meta.add("budget", std::to_string(opt.budget));
  std::ostringstream body;
  write_cloud_csv(body, spec, cloud);
  emit(opt, meta, body.str());
  if (!opt.out.empty()) {
    const std::string side = opt.out + ".meta";
    std::ofstream f(side, std::ios::binary);
    if (!f) fail(ErrorKind::Io, "cannot open metadata file '" + side + "'");
    write_cloud_metadata(f, cloud);
    if (!f) fail(ErrorKind::Io, "failed writing '" + side + "'");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dimension numerics for solenoidal attractors", "solenoid-dim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("solenoid-dim ") + kVersion);
  Options opt;

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Options&, const SolenoidSpec&);
    CLI::App* app = nullptr;
  };
  std::vector<Command> commands = {
      {"check", "rate bounds and hypothesis report", run_check},
      {"pressure", "pressure approximant sweep P_n(s)", run_pressure},
      {"bowen", "root of the pressure approximant", run_bowen},
      {"dxm", "finite-depth exponents d(x, m)", run_dxm},
      {"slicedim", "box dimension of a stable slice", run_slicedim},
      {"attrdim", "box dimension of the attractor", run_attrdim},
      {"transversality", "overlap scan with transversality margins", run_transversality},
      {"export-cloud", "write a slice or attractor point cloud", run_export_cloud},
  };

  const auto positive = CLI::PositiveNumber;
  for (auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    c.app = sub;
    sub->add_option("--spec", opt.spec_path, "spec file")->required();
    sub->add_option("--out", opt.out, "output file (default: stdout)");
    sub->add_option("--threads", opt.threads, "worker threads (0 = all cores)");
    sub->add_flag("--no-timestamp", opt.no_timestamp, "omit the timestamp metadata line");
    const std::string name = c.name;
    if (name == "check") continue;
    sub->add_option("--budget", opt.budget, "word enumeration budget")->check(positive);
    if (name != "dxm") sub->add_option("--depth", opt.depth, "word depth")->check(positive);
    if (name == "bowen" || name == "dxm") sub->add_option("--tol", opt.tol, "root tolerance")->check(positive);
    if (name == "pressure") {
      sub->add_option("--s-min", opt.s_min, "first s of the sweep");
      sub->add_option("--s-max", opt.s_max, "last s of the sweep");
      sub->add_option("--s-steps", opt.s_steps, "number of s values");
    }
    if (name == "dxm") sub->add_option("--m", opt.m_values, "depths m")->delimiter(',');
    if (name == "dxm" || name == "slicedim" || name == "export-cloud")
      sub->add_option("--x", opt.x, "base point, comma separated")->delimiter(',');
    if (name == "slicedim" || name == "attrdim") {
      sub->add_option("--scales", opt.scales, "rungs of the scale ladder")->check(CLI::Range(3, 64));
      sub->add_option("--eps0", opt.eps0, "coarsest scale")->check(positive);
      sub->add_option("--offsets", opt.offsets, "translated grids averaged per scale")->check(CLI::Range(1, 1024));
    }
    if (name == "attrdim" || name == "transversality" || name == "export-cloud")
      sub->add_option("--grid", opt.grid, "base grid spacing h")->check(CLI::Range(0.0, 1.0));
    if (name == "transversality") {
      sub->add_option("--delta", opt.delta, "gap threshold delta1")->check(positive);
      sub->add_option("--tail", opt.tail, "zero letters appended to each word");
      sub->add_option("--margin-floor", opt.margin_floor, "degenerate margin threshold")->check(positive);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_code(ErrorKind::Parse);
  }

  try {
    set_thread_count(opt.threads);
    const SolenoidSpec spec = load_spec(opt.spec_path);
    for (const auto& c : commands)
      if (c.app->parsed()) return c.run(opt, spec);
  } catch (const Error& e) {
    std::cerr << "solenoid-dim: " << to_string(e.kind()) << " error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::bad_alloc&) {
    std::cerr << "solenoid-dim: budget error: out of memory\n";
    return exit_code(ErrorKind::Resource);
  }
  return 1;
}
