// ptomo-cli: command-line front end over the ptomo C API.
//
//   design     rank all input families of a device by optimized ||C||
//   fisher     C-matrix, CFIM/QFIM blocks and the Gill-Massar trace
//   simulate   infidelity-vs-N sweep -> CSV table (+ metadata, optional SVG)
//   bootstrap  bootstrap spreads for given counts or for a simulated sweep
//   fit        power-law fit of a sweep table
//   report     per-N summary of a sweep table (optional SVG)
//
// Exit codes: 0 success, 2 configuration error, 1 runtime error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "ptomo/ptomo.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RuntimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Library failures during setup are configuration errors; afterwards they
// are runtime errors.
[[noreturn]] void fail(ptomo_status st, const std::string& what, bool config) {
  std::string msg = what + ": " + ptomo_status_string(st);
  const std::string detail = ptomo_last_error();
  if (!detail.empty()) msg += " (" + detail + ")";
  if (config) throw ConfigError(msg);
  throw RuntimeError(msg);
}

void check(ptomo_status st, const std::string& what, bool config = false) {
  if (st != PTOMO_OK) fail(st, what, config);
}

struct DeviceDeleter {
  void operator()(ptomo_device* d) const { ptomo_device_free(d); }
};
struct PovmDeleter {
  void operator()(ptomo_povm* p) const { ptomo_povm_free(p); }
};
struct SweepDeleter {
  void operator()(ptomo_sweep* s) const { ptomo_sweep_free(s); }
};
using DevicePtr = std::unique_ptr<ptomo_device, DeviceDeleter>;
using PovmPtr = std::unique_ptr<ptomo_povm, PovmDeleter>;
using SweepPtr = std::unique_ptr<ptomo_sweep, SweepDeleter>;

// ---- option parsing helpers -------------------------------------------------

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, sep);) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

// "4,5,6,7" or "4567" (single-digit ports only).
std::vector<int> parse_subset(const std::string& text) {
  std::vector<int> out;
  try {
    if (text.find(',') != std::string::npos || text.find('-') != std::string::npos) {
      for (const auto& tok : split(text, text.find(',') != std::string::npos ? ',' : '-')) out.push_back(std::stoi(tok));
    } else {
      for (char c : text) {
        if (c < '0' || c > '9') throw std::invalid_argument(text);
        out.push_back(c - '0');
      }
    }
  } catch (const std::exception&) {
    throw ConfigError("cannot parse subset '" + text + "'");
  }
  if (out.empty()) throw ConfigError("empty subset");
  return out;
}

std::string subset_label(const std::vector<int>& subset) {
  const bool wide = std::any_of(subset.begin(), subset.end(), [](int k) { return k >= 10; });
  std::string out;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (wide && i) out += '-';
    out += std::to_string(subset[i]);
  }
  return out;
}

// Accepts "100,1000" and "1e2,1e3".
std::vector<int64_t> parse_grid(const std::string& text) {
  std::vector<int64_t> out;
  for (const auto& tok : split(text, ',')) {
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse ensemble size '" + tok + "'");
    }
    if (!(v >= 1.0) || v != std::floor(v) || v > 9e15) throw ConfigError("ensemble sizes must be positive integers");
    out.push_back(static_cast<int64_t>(v));
  }
  if (out.empty()) throw ConfigError("--n-grid is empty");
  return out;
}

ptomo_norm_kind parse_norm(const std::string& s) {
  if (s == "spectral") return PTOMO_NORM_SPECTRAL;
  if (s == "frobenius") return PTOMO_NORM_FROBENIUS;
  throw ConfigError("unknown norm '" + s + "' (spectral|frobenius)");
}

std::string fmtg(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string config_hash(const std::string& canonical) {
  char out[17];
  check(ptomo_config_hash(canonical.c_str(), out), "hashing configuration");
  return out;
}

// ---- atomic file output -----------------------------------------------------

// Collects files to write and commits them only after everything succeeded,
// each via write-to-temporary + rename. Nothing partial is left behind.
class OutputSet {
 public:
  void add(const std::string& path, std::string content) { files_.push_back({path, std::move(content)}); }

  void commit() {
    std::vector<std::string> temps;
    try {
      for (const auto& f : files_) {
        const std::string tmp = f.path + ".tmp." + std::to_string(::getpid());
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw RuntimeError("cannot write " + f.path);
        temps.push_back(tmp);
        out << f.content;
        out.close();
        if (!out) throw RuntimeError("short write on " + f.path);
      }
      for (std::size_t i = 0; i < files_.size(); ++i) fs::rename(temps[i], files_[i].path);
    } catch (...) {
      std::error_code ec;
      for (const auto& t : temps) fs::remove(t, ec);
      throw;
    }
  }

 private:
  struct File {
    std::string path;
    std::string content;
  };
  std::vector<File> files_;
};

// Output paths must be creatable before any work starts.
void check_writable(const std::string& path) {
  if (path.empty()) return;
  const fs::path parent = fs::absolute(fs::path(path)).parent_path();
  if (!fs::is_directory(parent)) throw ConfigError("output directory does not exist: " + parent.string());
  if (::access(parent.c_str(), W_OK) != 0) throw ConfigError("output directory is not writable: " + parent.string());
}

std::string sidecar_path(const std::string& out) { return out + ".meta.json"; }

json base_metadata(const std::string& command, const std::string& hash, uint64_t seed) {
  json m;
  m["tool"] = "ptomo-cli";
  m["command"] = command;
  m["library_version"] = ptomo_version();
  m["config_hash"] = hash;
  m["seed"] = seed;
  return m;
}

// ---- POVM source ------------------------------------------------------------

struct DeviceOptions {
  std::string device = "u7";
  bool raw_device = false;
};

DevicePtr load_device(const DeviceOptions& o) {
  ptomo_device* d = nullptr;
  const int reunitarize = o.raw_device ? 0 : 1;
  if (o.device == "u7") {
    check(ptomo_device_load_builtin("u7", reunitarize, &d), "loading builtin device u7", true);
  } else {
    if (!fs::is_regular_file(o.device)) throw ConfigError("device matrix not readable: " + o.device);
    check(ptomo_device_load_file(o.device.c_str(), reunitarize, &d), "loading device " + o.device, true);
  }
  return DevicePtr(d);
}

json device_metadata(const DeviceOptions& o, const ptomo_device* d) {
  json m;
  m["source"] = o.device;
  m["ports"] = ptomo_device_ports(d);
  m["reunitarized"] = !o.raw_device;
  m["raw_unitarity_deviation"] = ptomo_device_raw_unitarity_deviation(d);
  m["replacement_distance"] = ptomo_device_replacement_distance(d);
  return m;
}

struct PovmOptions {
  DeviceOptions device;
  std::string subset = "4,5,6,7";
  std::string norm = "spectral";
  bool zero_phase = false;
  bool basis = false;
  int dim = 4;
};

struct PovmSource {
  PovmPtr povm;
  std::string label;
  std::vector<double> phases;
  double norm = 0.0;
  json meta;
};

PovmSource build_povm(const PovmOptions& o) {
  PovmSource src;
  ptomo_povm* p = nullptr;
  if (o.basis) {
    check(ptomo_povm_basis(static_cast<size_t>(o.dim), &p), "building basis POVM", true);
    src.povm.reset(p);
    src.label = "basis:" + std::to_string(o.dim);
    src.meta["kind"] = "computational-basis";
    src.meta["dim"] = o.dim;
    return src;
  }
  DevicePtr dev = load_device(o.device);
  const std::vector<int> subset = parse_subset(o.subset);
  const ptomo_norm_kind norm = parse_norm(o.norm);
  src.phases.assign(subset.size(), 0.0);
  if (!o.zero_phase) {
    ptomo_phase_options opt;
    ptomo_phase_options_default(&opt);
    opt.norm = norm;
    check(ptomo_optimize_phases(dev.get(), subset.data(), subset.size(), &opt, src.phases.data(), &src.norm,
                                nullptr),
          "optimizing phases", true);
  }
  int warning = 0;
  check(ptomo_povm_from_family(dev.get(), subset.data(), subset.size(), src.phases.data(), &p, &warning),
        "building family POVM", true);
  src.povm.reset(p);
  if (o.zero_phase) check(ptomo_c_norm(p, norm, &src.norm), "computing ||C||");
  if (warning) std::cerr << "warning: device is not unitary enough for POVM completeness within 1e-6\n";
  src.label = o.device.device + ":" + subset_label(subset);
  src.meta["kind"] = "device-family";
  src.meta["device"] = device_metadata(o.device, dev.get());
  src.meta["subset"] = subset;
  src.meta["phases"] = src.phases;
  src.meta["phase_mode"] = o.zero_phase ? "zero" : "optimized";
  src.meta["norm_kind"] = o.norm;
  src.meta["c_norm"] = src.norm;
  src.meta["completeness_deviation"] = ptomo_povm_completeness_deviation(p);
  return src;
}

void add_povm_options(CLI::App* app, PovmOptions& o) {
  app->add_option("--device", o.device.device, "Device matrix file or builtin 'u7'");
  app->add_flag("--raw-device", o.device.raw_device, "Use the device matrix as given (no polar re-unitarization)");
  app->add_option("--subset", o.subset, "Connected inputs, e.g. 4,5,6,7 or 4567");
  app->add_option("--norm", o.norm, "Norm of C: spectral|frobenius");
  app->add_flag("--zero-phase", o.zero_phase, "Skip phase optimization");
  app->add_flag("--basis", o.basis, "Use the computational-basis POVM instead of a device family");
  app->add_option("--dim", o.dim, "Dimension for --basis")->check(CLI::Range(2, 64));
}

std::string povm_canonical(const PovmOptions& o) {
  std::ostringstream os;
  os << "device=" << o.device.device << "\nraw=" << o.device.raw_device << "\nsubset=" << o.subset
     << "\nnorm=" << o.norm << "\nzero_phase=" << o.zero_phase << "\nbasis=" << o.basis << "\ndim=" << o.dim << '\n';
  return os.str();
}

// ---- sweep tables -----------------------------------------------------------

const char* kTableHeader = "N,trial,infidelity,boot_low,boot_q25,boot_median,boot_q75,boot_high";

struct TableRow {
  int64_t n = 0;
  int trial = 0;
  double infidelity = 0, low = 0, q25 = 0, median = 0, q75 = 0, high = 0;
};

struct Table {
  std::string config_hash;
  uint64_t seed = 0;
  std::vector<TableRow> rows;
};

std::string render_table(const Table& t) {
  std::ostringstream os;
  os << "# ptomo config_hash=" << t.config_hash << " seed=" << t.seed << '\n' << kTableHeader << '\n';
  for (const auto& r : t.rows) {
    os << r.n << ',' << r.trial << ',' << fmtg(r.infidelity) << ',' << fmtg(r.low) << ',' << fmtg(r.q25) << ','
       << fmtg(r.median) << ',' << fmtg(r.q75) << ',' << fmtg(r.high) << '\n';
  }
  return os.str();
}

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read table " + path);
  Table t;
  std::string line;
  bool header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      for (std::string tok; ss >> tok;) {
        if (tok.rfind("config_hash=", 0) == 0) t.config_hash = tok.substr(12);
        if (tok.rfind("seed=", 0) == 0) t.seed = std::stoull(tok.substr(5));
      }
      continue;
    }
    if (!header) {
      if (line != kTableHeader) throw ConfigError(path + ": unexpected header '" + line + "'");
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 8) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 8 fields");
    try {
      TableRow r;
      r.n = std::stoll(f[0]);
      r.trial = std::stoi(f[1]);
      r.infidelity = std::stod(f[2]);
      r.low = std::stod(f[3]);
      r.q25 = std::stod(f[4]);
      r.median = std::stod(f[5]);
      r.q75 = std::stod(f[6]);
      r.high = std::stod(f[7]);
      t.rows.push_back(r);
    } catch (const std::exception&) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  if (!header) throw ConfigError(path + ": missing header");
  if (t.rows.empty()) throw ConfigError(path + ": table has no rows");
  return t;
}

struct NSummary {
  int64_t n = 0;
  int trials = 0;
  double mean = 0, stderr_mean = 0, q25 = 0, q75 = 0, boot_low = 0, boot_high = 0;
};

double sample_quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<NSummary> summarize(const Table& t) {
  std::map<int64_t, std::vector<const TableRow*>> by_n;
  for (const auto& r : t.rows) by_n[r.n].push_back(&r);
  std::vector<NSummary> out;
  for (const auto& [n, rows] : by_n) {
    NSummary s;
    s.n = n;
    s.trials = static_cast<int>(rows.size());
    std::vector<double> v;
    double lo = 0, hi = 0;
    for (const auto* r : rows) {
      v.push_back(r->infidelity);
      lo += r->low;
      hi += r->high;
    }
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
    double ss = 0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.stderr_mean = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size())) : 0;
    s.q25 = sample_quantile(v, 0.25);
    s.q75 = sample_quantile(v, 0.75);
    s.boot_low = lo / static_cast<double>(rows.size());
    s.boot_high = hi / static_cast<double>(rows.size());
    out.push_back(s);
  }
  return out;
}

ptomo_fit fit_means(const std::vector<NSummary>& s) {
  std::vector<double> n, y;
  for (const auto& x : s) {
    n.push_back(static_cast<double>(x.n));
    y.push_back(x.mean);
  }
  ptomo_fit fit{};
  check(ptomo_fit_power_law(n.data(), y.data(), n.size(), &fit), "fitting power law");
  return fit;
}

// ---- SVG plot ---------------------------------------------------------------

std::string render_svg(const std::vector<NSummary>& s, const std::optional<ptomo_fit>& fit, const std::string& title,
                       const std::string& hash, uint64_t seed) {
  const double W = 640, H = 480, L = 80, R = 20, T = 40, B = 60;
  double xmin = 1e300, xmax = 0, ymin = 1e300, ymax = 0;
  for (const auto& x : s) {
    const double n = static_cast<double>(x.n);
    xmin = std::min(xmin, n);
    xmax = std::max(xmax, n);
    for (double y : {x.mean, x.q25, x.q75, x.boot_low, x.boot_high, 3.0 / n}) {
      if (y > 0) {
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  }
  const double lx0 = std::floor(std::log10(xmin) - 0.2), lx1 = std::ceil(std::log10(xmax) + 0.2);
  const double ly0 = std::floor(std::log10(ymin)), ly1 = std::ceil(std::log10(ymax));
  auto px = [&](double n) { return L + (std::log10(n) - lx0) / (lx1 - lx0) * (W - L - R); };
  auto py = [&](double y) {
    y = std::max(y, std::pow(10.0, ly0));
    return T + (ly1 - std::log10(y)) / (ly1 - ly0) * (H - T - B);
  };
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\">\n";
  os << "<!-- ptomo config_hash=" << hash << " seed=" << seed << " -->\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
     << title << "</text>\n";
  // Axes and decade ticks.
  os << "<g stroke=\"black\" fill=\"none\"><rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R
     << "\" height=\"" << H - T - B << "\"/></g>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int e = static_cast<int>(lx0); e <= static_cast<int>(lx1); ++e) {
    const double x = px(std::pow(10.0, e));
    os << "<line x1=\"" << x << "\" y1=\"" << H - B << "\" x2=\"" << x << "\" y2=\"" << H - B + 5
       << "\" stroke=\"black\"/><text x=\"" << x << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">1e" << e
       << "</text>\n";
  }
  for (int e = static_cast<int>(ly0); e <= static_cast<int>(ly1); ++e) {
    const double y = py(std::pow(10.0, e));
    os << "<line x1=\"" << L - 5 << "\" y1=\"" << y << "\" x2=\"" << L << "\" y2=\"" << y
       << "\" stroke=\"black\"/><text x=\"" << L - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << e
       << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">ensemble size N</text>\n";
  os << "<text x=\"18\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << (T + H - B) / 2 << ")\">infidelity</text>\n</g>\n";
  // Interquartile band of the simulated trials.
  os << "<polygon fill=\"#bbbbbb\" fill-opacity=\"0.5\" stroke=\"none\" points=\"";
  for (const auto& x : s) os << px(static_cast<double>(x.n)) << ',' << py(x.q75) << ' ';
  for (auto it = s.rbegin(); it != s.rend(); ++it) os << px(static_cast<double>(it->n)) << ',' << py(it->q25) << ' ';
  os << "\"/>\n";
  // 3/N reference.
  const double n0 = std::pow(10.0, lx0), n1 = std::pow(10.0, lx1);
  os << "<line x1=\"" << px(n0) << "\" y1=\"" << py(3.0 / n0) << "\" x2=\"" << px(n1) << "\" y2=\"" << py(3.0 / n1)
     << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  if (fit) {
    os << "<line x1=\"" << px(n0) << "\" y1=\"" << py(fit->coefficient * std::pow(n0, fit->exponent)) << "\" x2=\""
       << px(n1) << "\" y2=\"" << py(fit->coefficient * std::pow(n1, fit->exponent))
       << "\" stroke=\"#c00000\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";
  }
  // Points with bootstrap bars.
  for (const auto& x : s) {
    const double cx = px(static_cast<double>(x.n));
    os << "<line x1=\"" << cx << "\" y1=\"" << py(x.boot_low) << "\" x2=\"" << cx << "\" y2=\"" << py(x.boot_high)
       << "\" stroke=\"#1f4e9a\"/>\n";
    os << "<circle cx=\"" << cx << "\" cy=\"" << py(x.mean) << "\" r=\"4\" fill=\"#1f4e9a\"/>\n";
  }
  // Legend.
  const double lx = W - R - 170, ly = T + 15;
  os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<circle cx=\"" << lx << "\" cy=\"" << ly << "\" r=\"4\" fill=\"#1f4e9a\"/><text x=\"" << lx + 10 << "\" y=\""
     << ly + 4 << "\">mean infidelity</text>\n";
  os << "<line x1=\"" << lx - 6 << "\" y1=\"" << ly + 18 << "\" x2=\"" << lx + 6 << "\" y2=\"" << ly + 18
     << "\" stroke=\"black\" stroke-width=\"1.5\"/><text x=\"" << lx + 10 << "\" y=\"" << ly + 22
     << "\">3/N</text>\n";
  if (fit) {
    os << "<line x1=\"" << lx - 6 << "\" y1=\"" << ly + 36 << "\" x2=\"" << lx + 6 << "\" y2=\"" << ly + 36
       << "\" stroke=\"#c00000\" stroke-dasharray=\"6 4\"/><text x=\"" << lx + 10 << "\" y=\"" << ly + 40
       << "\">fit " << std::setprecision(2) << fit->coefficient << " N^" << fit->exponent << "</text>\n";
  }
  os << "<rect x=\"" << lx - 6 << "\" y=\"" << ly + 48 << "\" width=\"12\" height=\"8\" fill=\"#bbbbbb\"/><text x=\""
     << lx + 10 << "\" y=\"" << ly + 56 << "\">trial interquartile range</text>\n</g>\n";
  os << "</svg>\n";
  return os.str();
}

// ---- subcommands ------------------------------------------------------------

struct SweepOptions {
  PovmOptions povm;
  std::optional<double> theta;
  double lambda = 1.0;
  std::string n_grid = "100,1000,10000";
  int reps = 10;
  std::optional<uint64_t> seed;
  int boot = 0;
  int workers = 0;
  double epsilon = 0.0;
  uint64_t noise_seed = 0;
  std::string out;
  std::string plot;
  std::string counts;
};

Table run_sweep_table(const SweepOptions& o, const PovmSource& src, json& meta) {
  const std::vector<int64_t> grid = parse_grid(o.n_grid);
  ptomo_sweep_config cfg;
  ptomo_sweep_config_default(&cfg);
  cfg.theta = *o.theta;
  cfg.n_grid = grid.data();
  cfg.n_grid_len = grid.size();
  cfg.repetitions = o.reps;
  cfg.lambda = o.lambda;
  cfg.systematic_epsilon = o.epsilon;
  cfg.noise_seed = o.noise_seed;
  cfg.bootstrap_replicas = o.boot;
  cfg.seed = *o.seed;
  cfg.workers = o.workers;
  cfg.povm_label = src.label.c_str();
  ptomo_sweep* raw = nullptr;
  const ptomo_status st = ptomo_run_sweep(src.povm.get(), &cfg, &raw);
  SweepPtr sweep(raw);
  // Invalid sweep parameters are rejected before any trial runs.
  if (st != PTOMO_OK) fail(st, "running sweep", st == PTOMO_ERR_INVALID_INPUT && !sweep);
  Table t;
  t.config_hash = ptomo_sweep_config_hash(sweep.get());
  t.seed = *o.seed;
  const size_t rows = ptomo_sweep_row_count(sweep.get());
  for (size_t i = 0; i < rows; ++i) {
    ptomo_sweep_row r;
    check(ptomo_sweep_get_row(sweep.get(), i, &r), "reading sweep row");
    t.rows.push_back({r.n, r.trial, r.infidelity, r.boot_low, r.boot_q25, r.boot_median, r.boot_q75, r.boot_high});
  }
  meta["sweep"] = {{"theta", *o.theta},       {"lambda", o.lambda},          {"n_grid", grid},
                   {"repetitions", o.reps},    {"bootstrap_replicas", o.boot}, {"systematic_epsilon", o.epsilon},
                   {"noise_seed", o.noise_seed}};
  if (o.epsilon > 0) meta["sweep"]["systematic_model"] = "unitary misalignment exp(i eps H), H GUE with unit norm";
  return t;
}

void write_sweep_outputs(const std::string& command, const SweepOptions& o, const Table& t, json meta) {
  const auto summary = summarize(t);
  std::optional<ptomo_fit> fit;
  if (summary.size() >= 2 && std::all_of(summary.begin(), summary.end(), [](const NSummary& s) { return s.mean > 0; })) {
    fit = fit_means(summary);
  }
  std::cout << "config_hash=" << t.config_hash << " seed=" << t.seed << " rows=" << t.rows.size() << '\n';
  std::cout << "N,trials,mean_infidelity,stderr,N*mean\n";
  for (const auto& s : summary) {
    std::cout << s.n << ',' << s.trials << ',' << fmtg(s.mean) << ',' << fmtg(s.stderr_mean) << ','
              << fmt6(s.mean * static_cast<double>(s.n)) << '\n';
  }
  if (fit) std::cout << "fit: infidelity ~= " << fmt6(fit->coefficient) << " * N^" << fmt6(fit->exponent) << '\n';
  if (o.out.empty()) {
    std::cout << render_table(t);
    return;
  }
  OutputSet outputs;
  outputs.add(o.out, render_table(t));
  meta["table"] = fs::path(o.out).filename().string();
  meta["columns"] = split(kTableHeader, ',');
  if (!o.plot.empty()) {
    outputs.add(o.plot, render_svg(summary, fit, "ptomo " + command, t.config_hash, t.seed));
    meta["plot"] = fs::path(o.plot).filename().string();
  }
  meta["created_at"] = utc_timestamp();
  outputs.add(sidecar_path(o.out), meta.dump(2) + "\n");
  outputs.commit();
}

void add_sweep_options(CLI::App* app, SweepOptions& o, int default_boot) {
  o.boot = default_boot;
  add_povm_options(app, o.povm);
  app->add_option("--theta", o.theta, "Shift of the true state: theta_j = sqrt(theta)")->required();
  app->add_option("--lambda", o.lambda, "Depolarizing weight in (0, 1]");
  app->add_option("--n-grid", o.n_grid, "Comma-separated ensemble sizes");
  app->add_option("--reps", o.reps, "Trials per ensemble size")->check(CLI::PositiveNumber);
  app->add_option("--seed", o.seed, "Master seed (required)")->required();
  app->add_option("--boot", o.boot, "Bootstrap replicas per trial (0 disables, else >= 10)");
  app->add_option("--workers", o.workers, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  app->add_option("--epsilon", o.epsilon, "Systematic effect misalignment strength (stand-in model)");
  app->add_option("--noise-seed", o.noise_seed, "Seed of the misalignment generator");
  app->add_option("--out", o.out, "Output CSV table (metadata goes to <out>.meta.json)");
  app->add_option("--plot", o.plot, "Optional SVG plot (requires --out)");
}

void validate_sweep(const SweepOptions& o) {
  if (!o.plot.empty() && o.out.empty()) throw ConfigError("--plot requires --out");
  if (o.boot != 0 && o.boot < 10) throw ConfigError("--boot must be 0 or at least 10");
  if (!(o.lambda > 0.0 && o.lambda <= 1.0)) throw ConfigError("--lambda must lie in (0, 1]");
  check_writable(o.out);
  check_writable(o.plot);
}

json sweep_metadata(const std::string& command, const Table& t, const PovmSource& src) {
  json m = base_metadata(command, t.config_hash, t.seed);
  m["povm"] = src.meta;
  m["povm_label"] = src.label;
  m["estimator"] = "local pure-state MLE (BFGS, multi-start)";
  m["bootstrap_resampling"] = "empirical-frequencies";
  return m;
}

int cmd_simulate(const SweepOptions& o) {
  validate_sweep(o);
  PovmSource src = build_povm(o.povm);
  json meta;
  Table t = run_sweep_table(o, src, meta);
  json m = sweep_metadata("simulate", t, src);
  m.update(meta);
  write_sweep_outputs("simulate", o, t, m);
  return 0;
}

int cmd_bootstrap(const SweepOptions& o) {
  validate_sweep(o);
  if (o.boot < 10) throw ConfigError("bootstrap needs --boot >= 10");
  PovmSource src = build_povm(o.povm);
  if (o.counts.empty()) {
    json meta;
    Table t = run_sweep_table(o, src, meta);
    json m = sweep_metadata("bootstrap", t, src);
    m.update(meta);
    write_sweep_outputs("bootstrap", o, t, m);
    return 0;
  }
  // Bootstrap of externally supplied counts.
  std::vector<int64_t> counts;
  try {
    for (const auto& tok : split(o.counts, ',')) counts.push_back(std::stoll(tok));
  } catch (const std::exception&) {
    throw ConfigError("cannot parse --counts");
  }
  if (counts.size() != ptomo_povm_outcomes(src.povm.get())) {
    throw ConfigError("--counts needs " + std::to_string(ptomo_povm_outcomes(src.povm.get())) + " entries");
  }
  ptomo_mle_options mle;
  ptomo_mle_options_default(&mle);
  ptomo_bootstrap_summary b{};
  const ptomo_status st =
      ptomo_bootstrap(src.povm.get(), counts.data(), counts.size(), *o.theta, o.lambda, o.boot, *o.seed, &mle, &b);
  if (st != PTOMO_OK) fail(st, "bootstrapping counts", st == PTOMO_ERR_INVALID_INPUT);
  std::ostringstream canon;
  canon << "bootstrap-counts\n" << povm_canonical(o.povm) << "counts=" << o.counts << "\ntheta=" << fmtg(*o.theta)
        << "\nlambda=" << fmtg(o.lambda) << "\nboot=" << o.boot << '\n';
  Table t;
  t.config_hash = config_hash(canon.str());
  t.seed = *o.seed;
  int64_t n = 0;
  for (auto c : counts) n += c;
  t.rows.push_back({n, 0, b.point_infidelity, b.low, b.q25, b.median, b.q75, b.high});
  if (b.degenerate) std::cerr << "warning: degenerate counts (single populated outcome); zero spread\n";
  json m = sweep_metadata("bootstrap", t, src);
  m["counts"] = counts;
  m["reference"] = {{"theta", *o.theta}, {"lambda", o.lambda}};
  m["bootstrap_replicas"] = o.boot;
  m["degenerate"] = b.degenerate != 0;
  if (o.out.empty()) {
    std::cout << render_table(t);
    return 0;
  }
  OutputSet outputs;
  outputs.add(o.out, render_table(t));
  m["table"] = fs::path(o.out).filename().string();
  m["created_at"] = utc_timestamp();
  outputs.add(sidecar_path(o.out), m.dump(2) + "\n");
  outputs.commit();
  return 0;
}

struct DesignOptions {
  DeviceOptions device;
  std::string norm = "spectral";
  int dim = 4;
  int starts = 32;
  uint64_t seed = 0;
  bool seed_given = false;
  std::string out;
};

int cmd_design(DesignOptions& o) {
  check_writable(o.out);
  const ptomo_norm_kind norm = parse_norm(o.norm);
  DevicePtr dev = load_device(o.device);
  const size_t ports = ptomo_device_ports(dev.get());
  if (o.dim < 2 || static_cast<size_t>(o.dim) > ports) throw ConfigError("--dim must lie in [2, ports]");
  size_t count = 0;
  check(ptomo_enumerate_families(ports, static_cast<size_t>(o.dim), nullptr, 0, &count), "enumerating families", true);
  std::vector<int> flat(count * static_cast<size_t>(o.dim));
  check(ptomo_enumerate_families(ports, static_cast<size_t>(o.dim), flat.data(), count, &count), "enumerating families");

  ptomo_phase_options opt;
  ptomo_phase_options_default(&opt);
  opt.norm = norm;
  opt.starts = o.starts;
  if (o.seed_given) opt.seed = o.seed;
  struct Row {
    std::vector<int> subset;
    double zero = 0, best = 0;
    std::vector<double> phases;
  };
  std::vector<Row> rows;
  for (size_t i = 0; i < count; ++i) {
    Row r;
    r.subset.assign(flat.begin() + static_cast<long>(i) * o.dim, flat.begin() + static_cast<long>(i + 1) * o.dim);
    r.phases.assign(static_cast<size_t>(o.dim), 0.0);
    check(ptomo_optimize_phases(dev.get(), r.subset.data(), r.subset.size(), &opt, r.phases.data(), &r.best, &r.zero),
          "optimizing phases for " + subset_label(r.subset));
    rows.push_back(std::move(r));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.best < b.best; });

  std::ostringstream canon;
  canon << "design\ndevice=" << o.device.device << "\nraw=" << o.device.raw_device << "\nnorm=" << o.norm
        << "\ndim=" << o.dim << "\nstarts=" << o.starts << '\n';
  const std::string hash = config_hash(canon.str());
  std::ostringstream table;
  table << "# ptomo config_hash=" << hash << " seed=" << opt.seed << '\n';
  table << "subset,zero_phase_norm,optimized_norm,phases,winner\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    std::string ph;
    for (size_t j = 0; j < rows[i].phases.size(); ++j) ph += (j ? ";" : "") + fmtg(rows[i].phases[j]);
    table << subset_label(rows[i].subset) << ',' << fmtg(rows[i].zero) << ',' << fmtg(rows[i].best) << ',' << ph
          << ',' << (i == 0 ? 1 : 0) << '\n';
  }
  std::cout << "device=" << o.device.device << " ports=" << ports << " norm=" << o.norm
            << " raw_unitarity_deviation=" << ptomo_device_raw_unitarity_deviation(dev.get()) << '\n';
  std::cout << std::left << std::setw(10) << "subset" << std::setw(16) << "zero-phase" << std::setw(16)
            << "optimized" << '\n';
  for (size_t i = 0; i < rows.size(); ++i) {
    std::cout << std::setw(10) << subset_label(rows[i].subset) << std::setw(16) << fmt6(rows[i].zero) << std::setw(16)
              << fmt6(rows[i].best) << (i == 0 ? "<- winner" : "") << '\n';
  }
  if (!o.out.empty()) {
    json m = base_metadata("design", hash, opt.seed);
    m["device"] = device_metadata(o.device, dev.get());
    m["norm_kind"] = o.norm;
    m["dim"] = o.dim;
    m["starts"] = o.starts;
    m["winner"] = subset_label(rows.front().subset);
    m["winner_norm"] = rows.front().best;
    m["table"] = fs::path(o.out).filename().string();
    m["created_at"] = utc_timestamp();
    OutputSet outputs;
    outputs.add(o.out, table.str());
    outputs.add(sidecar_path(o.out), m.dump(2) + "\n");
    outputs.commit();
  }
  return 0;
}

json complex_matrix_json(const std::vector<double>& re_im, size_t rows, size_t cols) {
  json m = json::array();
  for (size_t r = 0; r < rows; ++r) {
    json row = json::array();
    for (size_t c = 0; c < cols; ++c) row.push_back({re_im[2 * (r * cols + c)], re_im[2 * (r * cols + c) + 1]});
    m.push_back(row);
  }
  return m;
}

void print_complex_matrix(const std::string& name, const std::vector<double>& re_im, size_t n) {
  std::cout << name << ":\n";
  for (size_t r = 0; r < n; ++r) {
    std::cout << "  ";
    for (size_t c = 0; c < n; ++c) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%+.5f%+.5fi  ", re_im[2 * (r * n + c)], re_im[2 * (r * n + c) + 1]);
      std::cout << buf;
    }
    std::cout << '\n';
  }
}

struct FisherOptions {
  PovmOptions povm;
  int haar = 0;
  std::string haar_convention = "raw";
  uint64_t seed = 1;
  std::string out;
};

int cmd_fisher(FisherOptions& o) {
  check_writable(o.out);
  std::ostringstream canon;
  canon << "fisher\n" << povm_canonical(o.povm) << "haar=" << o.haar << "\nhaar_convention=" << o.haar_convention
        << '\n';
  if (o.haar > 0) {
    const ptomo_norm_kind norm = parse_norm(o.povm.norm);
    ptomo_haar_convention conv;
    if (o.haar_convention == "raw") {
      conv = PTOMO_HAAR_RAW_COEFFICIENTS;
    } else if (o.haar_convention == "phase-fixed") {
      conv = PTOMO_HAAR_PHASE_FIXED;
    } else {
      throw ConfigError("--haar-convention must be raw or phase-fixed");
    }
    double mean = 0, se = 0;
    const ptomo_status st = ptomo_haar_mean_c_norm(static_cast<size_t>(o.povm.dim), 2 * static_cast<size_t>(o.povm.dim) - 1,
                                                   static_cast<size_t>(o.haar), o.seed, norm, conv, &mean, &se);
    if (st != PTOMO_OK) fail(st, "Haar baseline", st == PTOMO_ERR_INVALID_INPUT);
    std::cout << "haar samples=" << o.haar << " dim=" << o.povm.dim << " outcomes=" << 2 * o.povm.dim - 1
              << " norm=" << o.povm.norm << " convention=" << o.haar_convention << '\n';
    std::cout << "mean ||C|| = " << fmt6(mean) << " +- " << fmt6(se) << '\n';
    if (!o.out.empty()) {
      json m = base_metadata("fisher", config_hash(canon.str()), o.seed);
      m["haar"] = {{"samples", o.haar}, {"dim", o.povm.dim}, {"convention", o.haar_convention},
                   {"norm_kind", o.povm.norm}, {"mean", mean}, {"standard_error", se}};
      m["created_at"] = utc_timestamp();
      OutputSet outputs;
      outputs.add(o.out, m.dump(2) + "\n");
      outputs.commit();
    }
    return 0;
  }

  PovmSource src = build_povm(o.povm);
  const size_t d = ptomo_povm_dim(src.povm.get());
  const size_t m = d - 1;
  std::vector<double> c(2 * m * m), ib(2 * m * m), pb(2 * m * m), jb(2 * m * m), qb(2 * m * m);
  check(ptomo_c_matrix(src.povm.get(), c.data()), "computing C");
  double cn_s = 0, cn_f = 0, gm = 0;
  check(ptomo_c_norm(src.povm.get(), PTOMO_NORM_SPECTRAL, &cn_s), "computing ||C||");
  check(ptomo_c_norm(src.povm.get(), PTOMO_NORM_FROBENIUS, &cn_f), "computing ||C||");
  check(ptomo_cfim_first_order(src.povm.get(), ib.data(), pb.data()), "computing first-order CFIM");
  std::vector<double> zero(2 * m, 0.0);
  check(ptomo_qfim_pure(zero.data(), d, jb.data(), qb.data()), "computing QFIM");
  check(ptomo_gm_inequality_lhs(src.povm.get(), nullptr, 0, &gm), "computing tr(I J^-1)");

  std::cout << "povm=" << src.label << " dim=" << d << " outcomes=" << ptomo_povm_outcomes(src.povm.get()) << '\n';
  print_complex_matrix("C", c, m);
  std::cout << "||C|| spectral=" << fmt6(cn_s) << " frobenius=" << fmt6(cn_f) << '\n';
  print_complex_matrix("CFIM I (theta=0)", ib, m);
  print_complex_matrix("CFIM P (theta=0)", pb, m);
  print_complex_matrix("QFIM J (theta=0)", jb, m);
  print_complex_matrix("QFIM Q (theta=0)", qb, m);
  std::cout << "tr(I J^-1) = " << fmtg(gm) << " (bound " << d - 1 << ")\n";
  if (!o.out.empty()) {
    json meta = base_metadata("fisher", config_hash(canon.str()), 0);
    meta["povm"] = src.meta;
    meta["povm_label"] = src.label;
    meta["c_matrix"] = complex_matrix_json(c, m, m);
    meta["c_norm"] = {{"spectral", cn_s}, {"frobenius", cn_f}};
    meta["cfim"] = {{"I", complex_matrix_json(ib, m, m)}, {"P", complex_matrix_json(pb, m, m)}};
    meta["qfim"] = {{"J", complex_matrix_json(jb, m, m)}, {"Q", complex_matrix_json(qb, m, m)}};
    meta["gm_trace"] = gm;
    meta["created_at"] = utc_timestamp();
    OutputSet outputs;
    outputs.add(o.out, meta.dump(2) + "\n");
    outputs.commit();
  }
  return 0;
}

struct TableOptions {
  std::string in;
  std::string out;
  std::string plot;
};

int cmd_fit(const TableOptions& o) {
  check_writable(o.out);
  const Table t = read_table(o.in);
  const auto summary = summarize(t);
  if (summary.size() < 2) throw ConfigError("fit needs at least two ensemble sizes");
  const ptomo_fit fit = fit_means(summary);
  std::cout << "coefficient=" << fmtg(fit.coefficient) << " exponent=" << fmtg(fit.exponent)
            << " residual=" << fmtg(fit.residual) << " excluded_zero_points=" << fit.excluded_zero_points << '\n';
  if (fit.excluded_zero_points > 0) std::cerr << "warning: points with zero mean infidelity were excluded\n";
  if (!o.out.empty()) {
    json m = base_metadata("fit", t.config_hash, t.seed);
    m["input"] = fs::path(o.in).filename().string();
    m["fit"] = {{"model", "infidelity = coefficient * N^exponent, least squares in log-log on per-N means"},
                {"coefficient", fit.coefficient},
                {"exponent", fit.exponent},
                {"residual", fit.residual},
                {"excluded_zero_points", fit.excluded_zero_points}};
    m["created_at"] = utc_timestamp();
    OutputSet outputs;
    outputs.add(o.out, m.dump(2) + "\n");
    outputs.commit();
  }
  return 0;
}

int cmd_report(const TableOptions& o) {
  check_writable(o.out);
  check_writable(o.plot);
  const Table t = read_table(o.in);
  const auto summary = summarize(t);
  std::optional<ptomo_fit> fit;
  if (summary.size() >= 2 && std::all_of(summary.begin(), summary.end(), [](const NSummary& s) { return s.mean > 0; })) {
    fit = fit_means(summary);
  }
  std::ostringstream table;
  table << "# ptomo config_hash=" << t.config_hash << " seed=" << t.seed << '\n';
  table << "N,trials,mean_infidelity,stderr,q25,q75,mean_boot_low,mean_boot_high,gill_massar,ratio_to_gill_massar\n";
  for (const auto& s : summary) {
    const double gm = 3.0 / static_cast<double>(s.n);
    table << s.n << ',' << s.trials << ',' << fmtg(s.mean) << ',' << fmtg(s.stderr_mean) << ',' << fmtg(s.q25) << ','
          << fmtg(s.q75) << ',' << fmtg(s.boot_low) << ',' << fmtg(s.boot_high) << ',' << fmtg(gm) << ','
          << fmtg(s.mean / gm) << '\n';
  }
  std::cout << table.str();
  if (fit) std::cout << "fit: infidelity ~= " << fmt6(fit->coefficient) << " * N^" << fmt6(fit->exponent) << '\n';
  OutputSet outputs;
  if (!o.out.empty()) outputs.add(o.out, table.str());
  if (!o.plot.empty()) outputs.add(o.plot, render_svg(summary, fit, "ptomo report", t.config_hash, t.seed));
  outputs.commit();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point tomography with multiport-beam-splitter POVMs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ptomo_version()));

  DesignOptions design;
  auto* c_design = app.add_subcommand("design", "Rank input families by optimized ||C||");
  c_design->add_option("--device", design.device.device, "Device matrix file or builtin 'u7'");
  c_design->add_flag("--raw-device", design.device.raw_device, "Use the device matrix as given");
  c_design->add_option("--norm", design.norm, "Norm of C: spectral|frobenius");
  c_design->add_option("--dim", design.dim, "Qudit dimension (inputs connected)");
  c_design->add_option("--starts", design.starts, "Phase optimizer starts per family")->check(CLI::NonNegativeNumber);
  c_design->add_option("--seed", design.seed, "Phase optimizer seed")->each([&](const std::string&) {
    design.seed_given = true;
  });
  c_design->add_option("--out", design.out, "Output CSV table");

  FisherOptions fisher;
  auto* c_fisher = app.add_subcommand("fisher", "C-matrix, CFIM and QFIM at the fiducial state");
  add_povm_options(c_fisher, fisher.povm);
  c_fisher->add_option("--haar", fisher.haar, "Instead: mean ||C|| over this many Haar POVMs")
      ->check(CLI::NonNegativeNumber);
  c_fisher->add_option("--haar-convention", fisher.haar_convention, "raw|phase-fixed coefficients for --haar");
  c_fisher->add_option("--seed", fisher.seed, "Seed for --haar");
  c_fisher->add_option("--out", fisher.out, "Output JSON report");

  SweepOptions simulate;
  auto* c_sim = app.add_subcommand("simulate", "Simulated infidelity-vs-N sweep");
  add_sweep_options(c_sim, simulate, 0);

  SweepOptions boot;
  auto* c_boot = app.add_subcommand("bootstrap", "Bootstrap infidelity spreads");
  add_sweep_options(c_boot, boot, 100);
  c_boot->add_option("--counts", boot.counts, "Comma-separated outcome counts to bootstrap instead of simulating");

  TableOptions fit;
  auto* c_fit = app.add_subcommand("fit", "Fit c * N^p to a sweep table");
  c_fit->add_option("--in", fit.in, "Sweep CSV table")->required();
  c_fit->add_option("--out", fit.out, "Output JSON");

  TableOptions report;
  auto* c_report = app.add_subcommand("report", "Per-N summary of a sweep table");
  c_report->add_option("--in", report.in, "Sweep CSV table")->required();
  c_report->add_option("--out", report.out, "Output summary CSV");
  c_report->add_option("--plot", report.plot, "Output SVG plot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*c_design) return cmd_design(design);
    if (*c_fisher) return cmd_fisher(fisher);
    if (*c_sim) return cmd_simulate(simulate);
    if (*c_boot) return cmd_bootstrap(boot);
    if (*c_fit) return cmd_fit(fit);
    if (*c_report) return cmd_report(report);
  } catch (const ConfigError& e) {
    std::cerr << "ptomo-cli: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const RuntimeError& e) {
    std::cerr << "ptomo-cli: error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "ptomo-cli: error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
