#include <fbqo/fbqo.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

using nlohmann::json;

namespace {

struct CliError {
  fbqo_status status;
  std::string message;
};

void check(fbqo_status s) {
  if (s != FBQO_OK) throw CliError{s, fbqo_last_error()};
}

[[noreturn]] void config_error(const std::string& msg) { throw CliError{FBQO_ERR_CONFIG, msg}; }

int exit_code(fbqo_status s) {
  switch (s) {
    case FBQO_OK: return 0;
    case FBQO_ERR_INVALID_ARGUMENT:
    case FBQO_ERR_CONFIG:
    case FBQO_ERR_UNSUPPORTED: return 2;
    default: return 3;
  }
}

struct LatticeDeleter {
  void operator()(fbqo_lattice* p) const { fbqo_lattice_free(p); }
};
struct EmittersDeleter {
  void operator()(fbqo_emitters* p) const { fbqo_emitters_free(p); }
};
struct BoundStateDeleter {
  void operator()(fbqo_bound_state* p) const { fbqo_bound_state_free(p); }
};
using Lattice = std::unique_ptr<fbqo_lattice, LatticeDeleter>;
using Emitters = std::unique_ptr<fbqo_emitters, EmittersDeleter>;
using BoundState = std::unique_ptr<fbqo_bound_state, BoundStateDeleter>;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Output tables

using Value = std::variant<double, long long, std::string>;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Value>> rows;

  void write(std::ostream& os, const std::string& format) const {
    if (format == "json") {
      json out = json::array();
      for (const auto& row : rows) {
        json rec = json::object();
        for (std::size_t i = 0; i < header.size(); ++i) {
          std::visit([&](const auto& v) { rec[header[i]] = v; }, row[i]);
        }
        out.push_back(rec);
      }
      os << out.dump(2) << "\n";
      return;
    }
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) os << ",";
        if (const double* d = std::get_if<double>(&row[i])) {
          os << format_double(*d);
        } else if (const long long* n = std::get_if<long long>(&row[i])) {
          os << *n;
        } else {
          os << std::get<std::string>(row[i]);
        }
      }
      os << "\n";
    }
  }
};

struct Output {
  std::string path;
  std::string format = "csv";

  void add(CLI::App* app) {
    app->add_option("--out,-o", path, "Output file (default: stdout)");
    app->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  }

  void emit(const Table& t) const {
    if (path.empty() || path == "-") {
      t.write(std::cout, format);
      return;
    }
    std::ofstream out(path);
    if (!out) config_error("cannot write " + path);
    t.write(out, format);
  }
};

// Scans: start:stop:lin|log:count

struct Scan {
  std::vector<double> values;
};

Scan parse_scan(const std::string& text, bool positive) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 4) config_error("scan must look like start:stop:lin|log:count, got '" + text + "'");
  double a = 0, b = 0;
  long count = 0;
  try {
    a = std::stod(parts[0]);
    b = std::stod(parts[1]);
    count = std::stol(parts[3]);
  } catch (const std::exception&) {
    config_error("cannot parse scan '" + text + "'");
  }
  if (count < 1) config_error("scan count must be at least 1");
  if (parts[2] != "lin" && parts[2] != "log") config_error("scan spacing must be lin or log");
  if (positive && (a <= 0 || b <= 0)) config_error("scan range must be positive");
  if (parts[2] == "log" && (a <= 0 || b <= 0)) config_error("log scans need positive bounds");
  Scan s;
  for (long i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    s.values.push_back(parts[2] == "lin" ? a + f * (b - a) : a * std::pow(b / a, f));
  }
  s.values.front() = a;
  if (count > 1) s.values.back() = b;
  return s;
}

unsigned worker_count() {
  if (const char* env = std::getenv("FBQO_WORKERS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1) config_error("FBQO_WORKERS must be a positive integer");
    return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs f(i) for every scan index; rows stay in scan order.
template <class F>
std::vector<std::vector<Value>> parallel_rows(std::size_t n, F f) {
  std::vector<std::vector<Value>> rows(n);
  std::vector<CliError> errors(n, CliError{FBQO_OK, ""});
  const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(std::max<std::size_t>(n, 1)));
  auto work = [&](unsigned w) {
    for (std::size_t i = w; i < n; i += workers) {
      try {
        rows[i] = f(i);
      } catch (const CliError& e) {
        errors[i] = e;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work, w);
  work(0);
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e.status != FBQO_OK) throw e;
  return rows;
}

// Lattice options

struct LatticeOpts {
  std::string file;
  std::string model;
  std::string n = "100";
  double J = 1.0;
  double Delta = 0.0;
  double t = 0.0;
  double omega_c = 0.0;

  void add(CLI::App* app) {
    app->add_option("--lattice", file, "Lattice JSON file (overrides the flags below)");
    app->add_option("--model", model, "sawtooth, stub, double-comb, kagome1d, checkerboard, chain");
    app->add_option("--N", n, "Cells: N, or Nx,Ny for 2D")->capture_default_str();
    app->add_option("--J", J, "Hopping scale")->capture_default_str();
    app->add_option("--Delta", Delta, "Stub ratio (stub)")->capture_default_str();
    app->add_option("--t", t, "Comb coupling (double-comb; 0 means J)")->capture_default_str();
    app->add_option("--omega-c", omega_c, "Comb cavity frequency (double-comb)")->capture_default_str();
  }

  json to_json(double delta_override = std::numeric_limits<double>::quiet_NaN()) const {
    if (!file.empty()) return json::parse(read_file(file), nullptr, false);
    if (model.empty()) config_error("--model or --lattice is required");
    json j;
    j["model"] = model;
    const auto comma = n.find_first_of(",x");
    try {
      if (comma == std::string::npos) {
        j["N"] = std::stoi(n);
      } else {
        j["N"] = json::array({std::stoi(n.substr(0, comma)), std::stoi(n.substr(comma + 1))});
      }
    } catch (const std::exception&) {
      config_error("cannot parse --N '" + n + "'");
    }
    j["J"] = J;
    j["params"] = {{"Delta", std::isnan(delta_override) ? Delta : delta_override}, {"t", t}, {"omega_c", omega_c}};
    return j;
  }

  Lattice build(double delta_override = std::numeric_limits<double>::quiet_NaN()) const {
    const json j = to_json(delta_override);
    if (j.is_discarded()) config_error("invalid lattice JSON in " + file);
    fbqo_lattice* lat = nullptr;
    check(fbqo_lattice_from_json(j.dump().c_str(), &lat));
    return Lattice(lat);
  }
};

// Detuning reference: omega0 = reference + side * delta.

struct Detuning {
  std::string ref = "auto";
  std::string side;
  double delta = std::numeric_limits<double>::quiet_NaN();
  double omega0 = std::numeric_limits<double>::quiet_NaN();

  void add(CLI::App* app, bool with_delta = true) {
    app->add_option("--ref", ref,
                    "Detuning reference: auto, fb (flat band), min/max (spectrum edges) or an energy")
        ->capture_default_str();
    app->add_option("--side", side, "Detune above (+) or below (-) the reference; auto picks the gap side")
        ->check(CLI::IsMember({"+", "-"}));
    if (with_delta) app->add_option("--delta", delta, "Detuning from the reference (J units)");
    app->add_option("--omega0", omega0, "Bare emitter frequency (instead of a detuning)");
  }

  // Returns (reference energy, side sign).
  std::pair<double, double> resolve(const fbqo_lattice* lat) const {
    std::vector<double> spectrum(fbqo_lattice_sites(lat));
    auto edges = [&] {
      check(fbqo_lattice_eigenvalues(lat, spectrum.data()));
      return std::make_pair(spectrum.front(), spectrum.back());
    };
    auto explicit_side = [&]() -> double {
      if (side.empty()) return 0.0;
      return side == "+" ? 1.0 : -1.0;
    };
    if (ref == "min") return {edges().first, side.empty() ? -1.0 : explicit_side()};
    if (ref == "max") return {edges().second, side.empty() ? 1.0 : explicit_side()};
    if (ref == "auto" || ref == "fb") {
      fbqo_flat_band fb{};
      std::size_t count = 0;
      const fbqo_status s = fbqo_flat_bands(lat, 1e-8, &fb, 1, &count);
      if (s != FBQO_OK || count == 0) {
        if (ref == "fb") {
          if (s != FBQO_OK) check(s);
          throw CliError{FBQO_ERR_NO_FLAT_BAND, "lattice has no flat band"};
        }
        return {edges().first, side.empty() ? -1.0 : explicit_side()};
      }
      if (!side.empty()) return {fb.energy, explicit_side()};
      double sgn;
      if (fb.gap_below == 0.0) {
        sgn = 1.0;
      } else if (fb.gap_above == 0.0) {
        sgn = -1.0;
      } else if (std::isinf(fb.gap_below) != std::isinf(fb.gap_above)) {
        sgn = std::isinf(fb.gap_below) ? 1.0 : -1.0;
      } else {
        sgn = fb.gap_above >= fb.gap_below ? 1.0 : -1.0;
      }
      return {fb.energy, sgn};
    }
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(ref, &used);
      if (used != ref.size()) throw std::invalid_argument(ref);
    } catch (const std::exception&) {
      config_error("--ref must be auto, fb, min, max or a number");
    }
    if (side.empty()) config_error("a numeric --ref needs --side");
    return {value, explicit_side()};
  }

  double omega_for(const fbqo_lattice* lat, double d) const {
    const auto [e, sgn] = resolve(lat);
    return e + sgn * d;
  }
};

std::vector<std::size_t> parse_sites(const fbqo_lattice* lat, const std::vector<std::string>& specs) {
  std::vector<std::size_t> out;
  for (const auto& s : specs) {
    std::size_t site = 0;
    check(fbqo_lattice_site(lat, s.c_str(), &site));
    out.push_back(site);
  }
  return out;
}

Emitters single_site_emitters(const std::vector<std::size_t>& sites, double g, double omega0) {
  fbqo_emitters* raw = nullptr;
  check(fbqo_emitters_create(&raw));
  Emitters e(raw);
  for (std::size_t s : sites) check(fbqo_emitters_add(e.get(), omega0, 1, &s, &g, nullptr));
  return e;
}

std::array<int, 3> site_info(const fbqo_lattice* lat, std::size_t site) {
  int cx = 0, cy = 0, sub = 0;
  check(fbqo_lattice_site_info(lat, site, &cx, &cy, &sub));
  return {cx, cy, sub};
}

int sublattice_index(const fbqo_lattice* lat, const std::string& name) {
  std::size_t site = 0;
  check(fbqo_lattice_site(lat, (name + ":0").c_str(), &site));
  return site_info(lat, site)[2];
}

// Subcommands

void run_bands(const LatticeOpts& lo, const Output& out) {
  Lattice lat = lo.build();
  std::size_t nk = 0, nb = 0;
  check(fbqo_bands(lat.get(), &nk, &nb, nullptr, nullptr));
  std::vector<double> k(2 * nk), e(nk * nb);
  check(fbqo_bands(lat.get(), &nk, &nb, k.data(), e.data()));
  const bool two_d = fbqo_lattice_dim(lat.get()) == 2;
  Table t;
  t.header = {"k_1"};
  if (two_d) t.header.push_back("k_2");
  t.header.push_back("band_index");
  t.header.push_back("energy");
  for (std::size_t i = 0; i < nk; ++i)
    for (std::size_t b = 0; b < nb; ++b) {
      std::vector<Value> row = {k[2 * i]};
      if (two_d) row.push_back(k[2 * i + 1]);
      row.push_back(static_cast<long long>(b));
      row.push_back(e[i * nb + b]);
      t.rows.push_back(std::move(row));
    }
  out.emit(t);
}

struct FitOpts {
  std::string sublattice;
  int axis = 0;
  int d_min = 2;
  int d_max = -1;

  void add(CLI::App* app) {
    app->add_option("--fit-sublattice", sublattice, "Sublattice sampled by the fit (default: the emitter's)");
    app->add_option("--axis", axis, "Lattice axis of the fit")->check(CLI::Range(0, 1))->capture_default_str();
    app->add_option("--dmin", d_min, "First cell distance in the fit")->capture_default_str();
    app->add_option("--dmax", d_max, "Last cell distance (negative: automatic)")->capture_default_str();
  }
};

struct BoundStateOpts {
  std::string site = "a:0";
  std::string emitters_file;
  double g = 1e-3;
  bool bare = false;

  void add(CLI::App* app) {
    app->add_option("--site", site, "Emitter site, e.g. a:50 or b:3,7")->capture_default_str();
    app->add_option("--emitters", emitters_file, "Emitter JSON file; the first emitter is used");
    app->add_option("--g", g, "Coupling strength")->capture_default_str();
    app->add_flag("--bare", bare, "Evaluate at the bare frequency instead of the exact pole");
  }
};

Emitters make_emitter(const fbqo_lattice* lat, const BoundStateOpts& bo, double g, double omega0) {
  if (!bo.emitters_file.empty()) {
    fbqo_emitters* raw = nullptr;
    check(fbqo_emitters_from_json(lat, read_file(bo.emitters_file).c_str(), &raw));
    Emitters e(raw);
    if (!std::isnan(omega0)) check(fbqo_emitters_set_omega0(e.get(), omega0));
    return e;
  }
  return single_site_emitters(parse_sites(lat, {bo.site}), g, omega0);
}

std::vector<Value> bound_state_row(const fbqo_lattice* lat, const fbqo_emitters* em, double omega0,
                                   const FitOpts& fo, const std::string& default_site, bool bare) {
  double omega = 0.0, residual = 0.0;
  if (!bare) check(fbqo_solve_pole(lat, em, 0, &omega, &residual));
  fbqo_bound_state* raw = nullptr;
  check(fbqo_bound_state_compute(lat, em, 0, bare ? 0 : 1, &raw));
  BoundState bs(raw);
  double are = 0, aim = 0, nres = 0, eres = 0;
  check(fbqo_bound_state_atomic(bs.get(), &are, &aim));
  check(fbqo_bound_state_residuals(bs.get(), &nres, &eres));
  std::size_t site = 0;
  check(fbqo_lattice_site(lat, default_site.c_str(), &site));
  const auto info = site_info(lat, site);
  const int sub = fo.sublattice.empty() ? info[2] : sublattice_index(lat, fo.sublattice);
  fbqo_fit fit{};
  check(fbqo_bound_state_fit(lat, bs.get(), sub, info[0], info[1], fo.axis, fo.d_min, fo.d_max, &fit));
  return {omega0,
          fbqo_bound_state_energy(bs.get()),
          residual,
          are * are + aim * aim,
          nres,
          eres,
          fit.lambda,
          fit.r2,
          static_cast<long long>(fit.points),
          static_cast<long long>(fit.d_first),
          static_cast<long long>(fit.d_last)};
}

const std::vector<std::string> kBoundStateHeader = {"omega0",        "omega_bs", "pole_residual", "atomic_weight",
                                                    "norm_residual", "eigen_residual", "lambda", "r2",
                                                    "fit_points",    "fit_d_first",    "fit_d_last"};

void validate_detuning(const Detuning& dt, bool allow_zero = false) {
  if (std::isnan(dt.delta) == std::isnan(dt.omega0)) config_error("give exactly one of --delta, --omega0");
  if (!std::isnan(dt.delta) && (dt.delta < 0 || (!allow_zero && dt.delta == 0)))
    config_error(allow_zero ? "--delta must be non-negative" : "--delta must be positive");
}

void run_boundstate(const LatticeOpts& lo, const Detuning& dt, const BoundStateOpts& bo, const FitOpts& fo,
                    bool amplitudes, const Output& out) {
  validate_detuning(dt);
  Lattice lat = lo.build();
  const double w0 = std::isnan(dt.omega0) ? dt.omega_for(lat.get(), dt.delta) : dt.omega0;
  Emitters em = make_emitter(lat.get(), bo, bo.g, w0);
  if (!amplitudes) {
    Table t;
    t.header = kBoundStateHeader;
    t.rows.push_back(bound_state_row(lat.get(), em.get(), w0, fo, bo.site, bo.bare));
    out.emit(t);
    return;
  }
  fbqo_bound_state* raw = nullptr;
  check(fbqo_bound_state_compute(lat.get(), em.get(), 0, bo.bare ? 0 : 1, &raw));
  BoundState bs(raw);
  const std::size_t n = fbqo_lattice_sites(lat.get());
  std::vector<double> re(n), im(n);
  check(fbqo_bound_state_amplitudes(bs.get(), re.data(), im.data()));
  const bool two_d = fbqo_lattice_dim(lat.get()) == 2;
  Table t;
  t.header = {"cell_index"};
  if (two_d) t.header.push_back("cell_index_2");
  for (const char* h : {"sublattice", "re", "im", "abs"}) t.header.push_back(h);
  for (std::size_t i = 0; i < n; ++i) {
    const auto info = site_info(lat.get(), i);
    std::vector<Value> row = {static_cast<long long>(info[0])};
    if (two_d) row.push_back(static_cast<long long>(info[1]));
    row.push_back(std::string(1, static_cast<char>('a' + info[2])));
    row.push_back(re[i]);
    row.push_back(im[i]);
    row.push_back(std::hypot(re[i], im[i]));
    t.rows.push_back(std::move(row));
  }
  out.emit(t);
}

void run_loclen(const LatticeOpts& lo, const Detuning& dt, const BoundStateOpts& bo, const FitOpts& fo,
                const std::string& scan_delta, const std::string& scan_g, const std::string& scan_Delta,
                const Output& out) {
  const int scans = int(!scan_delta.empty()) + int(!scan_g.empty()) + int(!scan_Delta.empty());
  if (scans != 1) config_error("give exactly one of --scan-delta, --scan-g, --scan-Delta");
  if (!scan_Delta.empty() && !lo.file.empty()) config_error("--scan-Delta needs flag-built lattices");
  const std::string which = !scan_delta.empty() ? "delta" : (!scan_g.empty() ? "g" : "Delta");
  const Scan scan = parse_scan(!scan_delta.empty() ? scan_delta : (!scan_g.empty() ? scan_g : scan_Delta),
                               which != "Delta");
  if (which != "delta") {
    validate_detuning(dt);
  } else if (!std::isnan(dt.omega0)) {
    config_error("--omega0 conflicts with --scan-delta");
  }
  Lattice shared = which == "Delta" ? nullptr : lo.build();
  {
    // Fail fast on the emitter and reference before the scan starts.
    Lattice probe = which == "Delta" ? lo.build(scan.values.front()) : nullptr;
    const fbqo_lattice* lat = shared ? shared.get() : probe.get();
    const double w0 = std::isnan(dt.omega0) ? dt.omega_for(lat, which == "delta" ? scan.values.front() : dt.delta)
                                            : dt.omega0;
    make_emitter(lat, bo, bo.g, w0);
  }
  Table t;
  t.header = {which};
  t.header.insert(t.header.end(), kBoundStateHeader.begin(), kBoundStateHeader.end());
  t.rows = parallel_rows(scan.values.size(), [&](std::size_t i) {
    const double v = scan.values[i];
    Lattice own = which == "Delta" ? lo.build(v) : nullptr;
    const fbqo_lattice* lat = own ? own.get() : shared.get();
    const double d = which == "delta" ? v : dt.delta;
    const double w0 = std::isnan(dt.omega0) || which == "delta" ? dt.omega_for(lat, d) : dt.omega0;
    const double g = which == "g" ? v : bo.g;
    Emitters em = make_emitter(lat, bo, g, w0);
    std::vector<Value> row = {v};
    auto rest = bound_state_row(lat, em.get(), w0, fo, bo.site, bo.bare);
    row.insert(row.end(), rest.begin(), rest.end());
    return row;
  });
  out.emit(t);
}

void run_xi(double alpha, int dim, int max_dist, bool compare, int nk, const std::string& scan_alpha,
            const Output& out) {
  if (!scan_alpha.empty()) {
    const Scan scan = parse_scan(scan_alpha, true);
    auto maybe = [](fbqo_status st, double v) { return st == FBQO_OK ? v : std::numeric_limits<double>::quiet_NaN(); };
    Table t;
    t.header = {"alpha", "lambda1d", "lambda2d", "lambda2d_prime"};
    for (double a : scan.values) {
      double l1 = 0, l2 = 0, lp = 0;
      const fbqo_status s1 = fbqo_lambda_1d(a, &l1);
      const fbqo_status s2 = fbqo_lambda_2d(a, &l2, &lp);
      t.rows.push_back({a, maybe(s1, l1), maybe(s2, l2), maybe(s2, lp)});
    }
    out.emit(t);
    return;
  }
  if (std::isnan(alpha)) config_error("--alpha or --scan-alpha is required");
  if (max_dist < 0) config_error("--max-dist must be non-negative");
  if (nk <= 0) nk = dim == 1 ? (1 << 14) : 512;
  Table t;
  t.header = {"alpha", "dist", "xi_numeric"};
  if (compare) {
    t.header.push_back("xi_analytic");
    t.header.push_back("abs_diff");
  }
  t.rows = parallel_rows(static_cast<std::size_t>(max_dist) + 1, [&](std::size_t i) {
    const int d = static_cast<int>(i);
    double num = 0;
    check(fbqo_xi_numeric(dim, alpha, dim == 2 ? alpha : 0.0, d, 0, nk, &num));
    std::vector<Value> row = {alpha, static_cast<long long>(d), num};
    if (compare) {
      double ana = 0;
      check(dim == 1 ? fbqo_xi_analytic_1d(alpha, d, &ana) : fbqo_xi_2d_axis(alpha, d, &ana));
      row.push_back(ana);
      row.push_back(std::abs(num - ana));
    }
    return row;
  });
  out.emit(t);
}

Table matrix_table(std::size_t n, const std::vector<double>& re, const std::vector<double>& im) {
  Table t;
  t.header = {"i", "j", "re", "im", "abs"};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      t.rows.push_back({static_cast<long long>(i), static_cast<long long>(j), re[i * n + j], im[i * n + j],
                        std::hypot(re[i * n + j], im[i * n + j])});
  return t;
}

Emitters emitters_from(const fbqo_lattice* lat, const std::string& file, const std::vector<std::string>& sites,
                       double g, double omega0) {
  if (!file.empty()) {
    fbqo_emitters* raw = nullptr;
    check(fbqo_emitters_from_json(lat, read_file(file).c_str(), &raw));
    Emitters e(raw);
    if (!std::isnan(omega0)) check(fbqo_emitters_set_omega0(e.get(), omega0));
    return e;
  }
  if (sites.empty()) config_error("give --site (repeatable) or --emitters");
  return single_site_emitters(parse_sites(lat, sites), g, omega0);
}

double resolve_omega0(const fbqo_lattice* lat, const Detuning& dt) {
  return std::isnan(dt.omega0) ? dt.omega_for(lat, dt.delta) : dt.omega0;
}

struct SpinOpts {
  bool enabled = false;
  double tmax = 10.0;
  int nt = 101;
  int initial = 0;
};

void run_interactions(const LatticeOpts& lo, const Detuning& dt, const std::string& file,
                      const std::vector<std::string>& sites, double g, bool exact, const SpinOpts& so,
                      const Output& out) {
  validate_detuning(dt);
  if (so.enabled && (!(so.tmax > 0) || so.nt < 2)) config_error("need --tmax > 0 and --nt >= 2");
  if (so.enabled && so.initial < 0) config_error("--initial out of range");
  Lattice lat = lo.build();
  const double w0 = resolve_omega0(lat.get(), dt);
  Emitters em = emitters_from(lat.get(), file, sites, g, w0);
  const std::size_t n = fbqo_emitters_count(em.get());
  if (so.enabled && (so.initial < 0 || static_cast<std::size_t>(so.initial) >= n))
    config_error("--initial out of range");
  std::vector<double> re(n * n), im(n * n);
  check(fbqo_interaction_matrix(lat.get(), em.get(), exact ? 1 : 0, re.data(), im.data()));
  if (!so.enabled) {
    out.emit(matrix_table(n, re, im));
    return;
  }
  std::vector<double> t(static_cast<std::size_t>(so.nt));
  for (int i = 0; i < so.nt; ++i) t[i] = so.tmax * i / (so.nt - 1);
  std::vector<double> cre(t.size() * n), cim(t.size() * n);
  check(fbqo_spin_dynamics(n, re.data(), im.data(), static_cast<std::size_t>(so.initial), t.size(), t.data(),
                           cre.data(), cim.data()));
  Table tab;
  tab.header = {"t", "emitter", "re", "im", "population"};
  for (std::size_t it = 0; it < t.size(); ++it)
    for (std::size_t i = 0; i < n; ++i) {
      const double a = cre[it * n + i], b = cim[it * n + i];
      tab.rows.push_back({t[it], static_cast<long long>(i), a, b, a * a + b * b});
    }
  out.emit(tab);
}

void run_giants(const LatticeOpts& lo, const Detuning& dt, const std::vector<std::string>& cells, double g,
                const Output& out) {
  validate_detuning(dt);
  if (cells.empty()) config_error("give --cell (repeatable)");
  Lattice lat = lo.build();
  const double w0 = resolve_omega0(lat.get(), dt);
  fbqo_emitters* raw = nullptr;
  check(fbqo_emitters_create(&raw));
  Emitters em(raw);
  for (const auto& c : cells) {
    int cx = 0, cy = 0;
    const auto comma = c.find(',');
    try {
      cx = std::stoi(c.substr(0, comma));
      if (comma != std::string::npos) cy = std::stoi(c.substr(comma + 1));
    } catch (const std::exception&) {
      config_error("cannot parse cell '" + c + "'");
    }
    check(fbqo_emitters_add_cls(em.get(), lat.get(), cx, cy, g, w0));
  }
  const std::size_t n = fbqo_emitters_count(em.get());
  std::vector<double> re(n * n), im(n * n);
  std::size_t warnings = 0;
  check(fbqo_giant_interaction(lat.get(), em.get(), w0, re.data(), im.data(), &warnings));
  std::vector<double> fidelity(n);
  for (std::size_t i = 0; i < n; ++i) check(fbqo_giant_fidelity(lat.get(), em.get(), i, w0, &fidelity[i]));
  Table t = matrix_table(n, re, im);
  t.header.push_back("fidelity_i");
  for (auto& row : t.rows) row.push_back(fidelity[static_cast<std::size_t>(std::get<long long>(row[0]))]);
  out.emit(t);
  if (warnings) std::cerr << "warning: " << warnings << " giant site state(s) leave the flat band\n";
}

void run_dynamics(const LatticeOpts& lo, const Detuning& dt, const std::string& file,
                  const std::vector<std::string>& sites, double g, double tmax, int nt, int initial, bool rabi,
                  const Output& out) {
  Detuning d = dt;
  if (std::isnan(d.delta) && std::isnan(d.omega0)) d.delta = 0.0;
  validate_detuning(d, true);
  if (tmax < 0 || nt < 2) config_error("need --tmax >= 0 and --nt >= 2");
  if (initial < 0) config_error("--initial out of range");
  Lattice lat = lo.build();
  const double w0 = resolve_omega0(lat.get(), d);
  Emitters em = emitters_from(lat.get(), file, sites, g, w0);
  const std::size_t ne = fbqo_emitters_count(em.get());
  if (initial < 0 || static_cast<std::size_t>(initial) >= ne) config_error("--initial out of range");
  double predicted = 0;
  if (rabi) check(fbqo_rabi_frequency(lat.get(), em.get(), static_cast<std::size_t>(initial), &predicted));
  if (rabi && tmax == 0 && !(predicted > 0))
    throw CliError{FBQO_ERR_INSUFFICIENT_DATA, "emitter has no flat-band weight; give --tmax explicitly"};
  if (tmax == 0) tmax = rabi ? std::acos(-1.0) / predicted : 100.0;
  std::vector<double> t(static_cast<std::size_t>(nt));
  for (int i = 0; i < nt; ++i) t[i] = tmax * i / (nt - 1);
  std::vector<double> pop(t.size() * ne);
  double norm_err = 0;
  check(fbqo_evolve(lat.get(), em.get(), static_cast<std::size_t>(initial), t.size(), t.data(), pop.data(),
                    &norm_err));
  Table tab;
  if (rabi) {
    std::vector<double> p(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) p[i] = pop[i * ne + initial];
    double fit = 0;
    check(fbqo_rabi_from_population(t.size(), t.data(), p.data(), &fit));
    tab.header = {"omega_fit", "omega_predicted", "rel_error", "max_norm_error"};
    tab.rows.push_back({fit, predicted, std::abs(fit - predicted) / predicted, norm_err});
  } else {
    tab.header = {"t", "atom_index", "population"};
    for (std::size_t it = 0; it < t.size(); ++it)
      for (std::size_t i = 0; i < ne; ++i) tab.rows.push_back({t[it], static_cast<long long>(i), pop[it * ne + i]});
  }
  out.emit(tab);
}

void run_disorder(const LatticeOpts& lo, const std::string& kind, double strength, int seeds, long long seed0,
                  double zero_tol, const Output& out) {
  if (strength < 0) config_error("--strength must be non-negative");
  if (seeds < 1) config_error("--seeds must be at least 1");
  Lattice clean = lo.build();
  fbqo_flat_band fb{};
  std::size_t count = 0;
  check(fbqo_flat_bands(clean.get(), 1e-8, &fb, 1, &count));
  if (count == 0) throw CliError{FBQO_ERR_NO_FLAT_BAND, "clean lattice has no flat band"};
  const std::size_t n = fbqo_lattice_sites(clean.get());
  const std::size_t cells = static_cast<std::size_t>(fbqo_lattice_cells(clean.get(), 0)) *
                            static_cast<std::size_t>(fbqo_lattice_cells(clean.get(), 1));
  Table t;
  t.header = {"seed", "zero_modes", "fb_center", "fb_bandwidth"};
  t.rows = parallel_rows(static_cast<std::size_t>(seeds), [&](std::size_t i) {
    const auto seed = static_cast<std::uint64_t>(seed0) + i;
    fbqo_lattice* raw = nullptr;
    check(fbqo_lattice_disorder(clean.get(), kind == "off-diagonal" ? 1 : 0, strength, seed, &raw));
    Lattice lat(raw);
    std::vector<double> e(n);
    check(fbqo_lattice_eigenvalues(lat.get(), e.data()));
    long long zeros = 0;
    for (double x : e)
      if (std::abs(x) < zero_tol) ++zeros;
    std::sort(e.begin(), e.end(),
              [&](double a, double b) { return std::abs(a - fb.energy) < std::abs(b - fb.energy); });
    const auto [lo_it, hi_it] = std::minmax_element(e.begin(), e.begin() + static_cast<long>(cells));
    return std::vector<Value>{static_cast<long long>(seed), zeros, 0.5 * (*lo_it + *hi_it), *hi_it - *lo_it};
  });
  out.emit(t);
}

// Flags from a JSON config are appended unless already present on the command line.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  auto it = std::find(args.begin(), args.end(), "--config");
  if (it == args.end()) return args;
  if (it + 1 == args.end()) config_error("--config needs a file");
  const std::string path = *(it + 1);
  args.erase(it, it + 2);
  const json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) config_error("config must be a JSON object: " + path);
  auto given = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
  };
  auto scalar = [](const json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return format_double(v.get<double>());
    config_error("config values must be scalars, lists or booleans");
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "command") {
      if (args.size() < 2 || args[1].rfind("-", 0) == 0) args.insert(args.begin() + 1, v.get<std::string>());
      continue;
    }
    const std::string flag = "--" + key;
    if (given(flag)) continue;
    if (v.is_boolean()) {
      if (v.get<bool>()) args.push_back(flag);
    } else if (v.is_array()) {
      for (const auto& x : v) {
        args.push_back(flag);
        args.push_back(scalar(x));
      }
    } else {
      args.push_back(flag);
      args.push_back(scalar(v));
    }
  }
  return args;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(std::move(args));
  } catch (const CliError& e) {
    std::cerr << "error: " << fbqo_status_name(e.status) << ": " << e.message << "\n";
    return exit_code(e.status);
  }

  CLI::App app{"Flat-band quantum optics toolkit"};
  app.require_subcommand(1);
  app.footer("Pass --config file.json to read flags from a JSON object; FBQO_WORKERS sets the worker count.");

  LatticeOpts lo;
  Detuning dt;
  Output out;
  BoundStateOpts bo;
  FitOpts fo;

  auto* bands = app.add_subcommand("bands", "Band structure on the commensurate k grid");
  lo.add(bands);
  out.add(bands);

  bool amplitudes = false;
  auto* bs = app.add_subcommand("boundstate", "Solve one atom-photon bound state");
  lo.add(bs);
  dt.add(bs);
  bo.add(bs);
  fo.add(bs);
  bs->add_flag("--amplitudes", amplitudes, "Write the photonic wavefunction instead of the summary");
  out.add(bs);

  std::string scan_delta, scan_g, scan_Delta;
  auto* ll = app.add_subcommand("loclen", "Localization-length scans");
  lo.add(ll);
  dt.add(ll);
  bo.add(ll);
  fo.add(ll);
  ll->add_option("--scan-delta", scan_delta, "Detuning scan start:stop:lin|log:count");
  ll->add_option("--scan-g", scan_g, "Coupling scan start:stop:lin|log:count");
  ll->add_option("--scan-Delta", scan_Delta, "Stub-ratio scan start:stop:lin|log:count");
  out.add(ll);

  double alpha = std::numeric_limits<double>::quiet_NaN();
  int dim = 1, max_dist = 10, nk = 0;
  bool compare = false;
  std::string scan_alpha;
  auto* xi = app.add_subcommand("xi", "CLS weight function and localization lengths");
  xi->add_option("--alpha", alpha, "CLS overlap");
  xi->add_option("--dim", dim, "1 or 2 (isotropic)")->check(CLI::Range(1, 2))->capture_default_str();
  xi->add_option("--max-dist", max_dist, "Largest cell distance")->capture_default_str();
  xi->add_option("--nk", nk, "k points per axis (default 16384 in 1D, 512 in 2D)");
  xi->add_flag("--compare", compare, "Add the closed form and the difference");
  xi->add_option("--scan-alpha", scan_alpha, "Tabulate 1D and 2D lambdas over start:stop:lin|log:count");
  out.add(xi);

  std::string emitters_file;
  std::vector<std::string> sites;
  double g = 1e-3;
  bool exact = false;
  auto* ia = app.add_subcommand("interactions", "Emitter-emitter couplings K_ij");
  lo.add(ia);
  dt.add(ia);
  ia->add_option("--site", sites, "Emitter site (repeatable)");
  ia->add_option("--emitters", emitters_file, "Emitter JSON file");
  ia->add_option("--g", g, "Coupling strength")->capture_default_str();
  ia->add_flag("--exact-pole", exact, "Evaluate each emitter at its own pole");
  SpinOpts so;
  ia->add_flag("--spin-dynamics", so.enabled, "Evolve one excitation under H_eff instead of writing K");
  ia->add_option("--tmax", so.tmax, "Final time for --spin-dynamics")->capture_default_str();
  ia->add_option("--nt", so.nt, "Time points for --spin-dynamics")->capture_default_str();
  ia->add_option("--initial", so.initial, "Initially excited emitter for --spin-dynamics")->capture_default_str();
  out.add(ia);

  std::vector<std::string> cells;
  auto* gi = app.add_subcommand("giants", "Giant atoms coupled through CLS patterns");
  lo.add(gi);
  dt.add(gi);
  gi->add_option("--cell", cells, "CLS cell, n or nx,ny (repeatable)");
  gi->add_option("--g", g, "Coupling strength")->capture_default_str();
  out.add(gi);

  double tmax = 0.0;
  int nt = 1001, initial = 0;
  bool rabi = false;
  auto* dy = app.add_subcommand("dynamics", "Single-excitation time evolution");
  lo.add(dy);
  dt.add(dy);
  dy->add_option("--site", sites, "Emitter site (repeatable)");
  dy->add_option("--emitters", emitters_file, "Emitter JSON file");
  dy->add_option("--g", g, "Coupling strength")->capture_default_str();
  dy->add_option("--tmax", tmax, "Final time (1/J units); 0 means 100, or one Rabi period with --rabi")
      ->capture_default_str();
  dy->add_option("--nt", nt, "Number of time points")->capture_default_str();
  dy->add_option("--initial", initial, "Initially excited emitter")->capture_default_str();
  dy->add_flag("--rabi", rabi, "Fit the vacuum Rabi frequency instead of writing populations");
  out.add(dy);

  std::string kind = "diagonal";
  double strength = 0.1, zero_tol = 1e-10;
  int seeds = 20;
  long long seed0 = 0;
  auto* di = app.add_subcommand("disorder", "Flat-band statistics under disorder");
  lo.add(di);
  di->add_option("--kind", kind, "diagonal or off-diagonal")
      ->check(CLI::IsMember({"diagonal", "off-diagonal"}))
      ->capture_default_str();
  di->add_option("--strength", strength, "Uniform disorder half-width")->capture_default_str();
  di->add_option("--seeds", seeds, "Number of realizations")->capture_default_str();
  di->add_option("--seed", seed0, "First seed")->capture_default_str();
  di->add_option("--zero-tol", zero_tol, "Zero-mode threshold")->capture_default_str();
  out.add(di);

  std::vector<std::string> rest(args.begin() + 1, args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: ConfigError: " << e.what() << "\n";
    return 2;
  }

  try {
    worker_count();
    if (bands->parsed()) run_bands(lo, out);
    if (bs->parsed()) run_boundstate(lo, dt, bo, fo, amplitudes, out);
    if (ll->parsed()) run_loclen(lo, dt, bo, fo, scan_delta, scan_g, scan_Delta, out);
    if (xi->parsed()) run_xi(alpha, dim, max_dist, compare, nk, scan_alpha, out);
    if (ia->parsed()) run_interactions(lo, dt, emitters_file, sites, g, exact, so, out);
    if (gi->parsed()) run_giants(lo, dt, cells, g, out);
    if (dy->parsed()) run_dynamics(lo, dt, emitters_file, sites, g, tmax, nt, initial, rabi, out);
    if (di->parsed()) run_disorder(lo, kind, strength, seeds, seed0, zero_tol, out);
  } catch (const CliError& e) {
    std::cerr << "error: " << fbqo_status_name(e.status) << ": " << e.message << "\n";
    return exit_code(e.status);
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
