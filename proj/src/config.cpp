#include "chemo/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace chemo {

namespace {

const std::map<std::string, std::set<std::string>> kAllowed = {
    {"scenario", {"name", "seed"}},
    {"grid", {"dim", "points", "length"}},
    {"model", {"gamma", "beta", "a", "b"}},
    {"sources", {"bbar", "bbar_c3", "h", "chi", "g", "fbar", "fbar_c1", "fbar_c2"}},
    {"time", {"dt", "t_end", "record_every"}},
    {"initial",
     {"u", "u_amplitude", "u_width", "u_center", "u_mode", "v", "v_amplitude", "v_width", "v_center", "v_mode", "phi",
      "phi_amplitude", "phi_width", "phi_center", "phi_mode"}},
    {"fit", {"window_lo", "window_hi", "derivative_orders", "sobolev_s"}},
    {"constant_state", {"u_bar"}},
    {"kernel", {"cutoff", "probe_width", "samples", "t_min", "exp_window_lo", "exp_window_hi"}},
    {"output", {"dir", "snapshots", "snapshot_every"}},
    {"diagnostics", {"oracle", "oracle_t_end", "oracle_nodes", "oracle_picard", "mass_tolerance", "verify_propagator"}},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Entry {
  std::string value;
  int line = 0;
};

class Document {
 public:
  explicit Document(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      std::string s = raw;
      const auto comment = s.find_first_of("#;");
      if (comment != std::string::npos) s = s.substr(0, comment);
      s = trim(s);
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') fail(line, "malformed section header '" + s + "'");
        section = lower(trim(s.substr(1, s.size() - 2)));
        if (!kAllowed.count(section)) fail(line, "unknown section [" + section + "]");
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos) fail(line, "expected 'key = value', got '" + s + "'");
      const std::string key = lower(trim(s.substr(0, eq)));
      const std::string value = trim(s.substr(eq + 1));
      if (section.empty()) fail(line, "key '" + key + "' appears before any section header");
      if (!kAllowed.at(section).count(key)) fail(line, "unknown key '" + key + "' in [" + section + "]");
      if (value.empty()) fail(line, "key '" + key + "' has an empty value");
      auto& slot = entries_[section];
      if (slot.count(key)) fail(line, "duplicate key '" + key + "' in [" + section + "]");
      slot[key] = {value, line};
    }
  }

  const Entry* find(const std::string& section, const std::string& key) const {
    const auto s = entries_.find(section);
    if (s == entries_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  const Entry& require(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) throw ConfigError("missing required key '" + key + "' in [" + section + "]");
    return *e;
  }

  [[noreturn]] static void fail(int line, const std::string& what) {
    throw ConfigError("line " + std::to_string(line) + ": " + what);
  }

 private:
  std::map<std::string, std::map<std::string, Entry>> entries_;
};

[[noreturn]] void bad_value(const Entry& e, const std::string& section, const std::string& key, const std::string& what) {
  Document::fail(e.line, "[" + section + "] " + key + " = " + e.value + ": " + what);
}

double to_double(const Entry& e, const std::string& section, const std::string& key) {
  std::size_t pos = 0;
  double x = 0;
  try {
    x = std::stod(e.value, &pos);
  } catch (const std::exception&) {
    bad_value(e, section, key, "expected a real number");
  }
  if (pos != e.value.size() || !std::isfinite(x)) bad_value(e, section, key, "expected a real number");
  return x;
}

long to_long(const Entry& e, const std::string& section, const std::string& key) {
  std::size_t pos = 0;
  long x = 0;
  try {
    x = std::stol(e.value, &pos);
  } catch (const std::exception&) {
    bad_value(e, section, key, "expected an integer");
  }
  if (pos != e.value.size()) bad_value(e, section, key, "expected an integer");
  return x;
}

class Reader {
 public:
  explicit Reader(const Document& doc) : doc_(doc) {}

  double real(const std::string& s, const std::string& k, double fallback) const {
    const Entry* e = doc_.find(s, k);
    return e ? to_double(*e, s, k) : fallback;
  }
  double positive(const std::string& s, const std::string& k, double fallback) const {
    const Entry* e = doc_.find(s, k);
    if (!e) return fallback;
    const double x = to_double(*e, s, k);
    if (!(x > 0)) bad_value(*e, s, k, "must be strictly positive");
    return x;
  }
  double nonnegative(const std::string& s, const std::string& k, double fallback) const {
    const Entry* e = doc_.find(s, k);
    if (!e) return fallback;
    const double x = to_double(*e, s, k);
    if (x < 0) bad_value(*e, s, k, "must be nonnegative");
    return x;
  }
  long integer(const std::string& s, const std::string& k, long fallback, long lo, long hi) const {
    const Entry* e = doc_.find(s, k);
    if (!e) return fallback;
    const long x = to_long(*e, s, k);
    if (x < lo || x > hi)
      bad_value(*e, s, k, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
  }
  bool boolean(const std::string& s, const std::string& k, bool fallback) const {
    const Entry* e = doc_.find(s, k);
    if (!e) return fallback;
    const std::string v = lower(e->value);
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    bad_value(*e, s, k, "expected true or false");
  }
  std::string choice(const std::string& s, const std::string& k, const std::string& fallback,
                     const std::vector<std::string>& options) const {
    const Entry* e = doc_.find(s, k);
    if (!e) return fallback;
    const std::string v = lower(e->value);
    if (std::find(options.begin(), options.end(), v) == options.end()) {
      std::string list;
      for (const auto& o : options) list += (list.empty() ? "" : ", ") + o;
      bad_value(*e, s, k, "expected one of {" + list + "}");
    }
    return v;
  }
  template <typename T>
  std::vector<T> list(const std::string& s, const std::string& k) const {
    const Entry* e = doc_.find(s, k);
    if (!e) return {};
    std::vector<T> out;
    std::stringstream ss(e->value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const Entry part{trim(item), e->line};
      if constexpr (std::is_integral_v<T>)
        out.push_back(static_cast<T>(to_long(part, s, k)));
      else
        out.push_back(to_double(part, s, k));
    }
    return out;
  }
  const Entry* find(const std::string& s, const std::string& k) const { return doc_.find(s, k); }
  const Entry& require(const std::string& s, const std::string& k) const { return doc_.require(s, k); }

 private:
  const Document& doc_;
};

InitProfile read_profile(const Reader& r, const std::string& name, InitShape fallback, double default_width, int dim) {
  InitProfile p;
  const std::string shape =
      r.choice("initial", name, fallback == InitShape::Gaussian ? "gaussian" : "zero", {"zero", "gaussian", "mode"});
  p.shape = shape == "gaussian" ? InitShape::Gaussian : shape == "mode" ? InitShape::Mode : InitShape::Zero;
  p.amplitude = r.real("initial", name + "_amplitude", p.shape == InitShape::Zero ? 0.0 : 1e-2);
  p.width = r.positive("initial", name + "_width", default_width);
  p.center = r.list<double>("initial", name + "_center");
  if (!p.center.empty() && static_cast<int>(p.center.size()) != dim)
    bad_value(*r.find("initial", name + "_center"), "initial", name + "_center", "needs one entry per dimension");
  p.mode = r.list<int>("initial", name + "_mode");
  if (p.shape == InitShape::Mode) {
    if (p.mode.empty()) r.require("initial", name + "_mode");
    if (static_cast<int>(p.mode.size()) != dim)
      bad_value(*r.find("initial", name + "_mode"), "initial", name + "_mode", "needs one entry per dimension");
  }
  return p;
}

std::string shape_name(InitShape s) {
  switch (s) {
    case InitShape::Zero: return "zero";
    case InitShape::Gaussian: return "gaussian";
    case InitShape::Mode: return "mode";
  }
  return "zero";
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (const T& x : v) {
    if (!out.empty()) out += ", ";
    if constexpr (std::is_integral_v<T>)
      out += std::to_string(x);
    else
      out += fmt(x);
  }
  return out;
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::ZeroState: return "zero_state";
    case ScenarioKind::ConstantState: return "constant_state";
    case ScenarioKind::PksCompare: return "pks_compare";
    case ScenarioKind::KernelRates: return "kernel_rates";
  }
  return "?";
}

ScenarioConfig parse_config(const std::string& text) {
  const Document doc(text);
  const Reader r(doc);
  ScenarioConfig c;

  r.require("scenario", "name");
  const std::string scenario = r.choice("scenario", "name", "", {"zero_state", "constant_state", "pks_compare", "kernel_rates"});
  c.scenario = scenario == "zero_state"       ? ScenarioKind::ZeroState
               : scenario == "constant_state" ? ScenarioKind::ConstantState
               : scenario == "pks_compare"    ? ScenarioKind::PksCompare
                                              : ScenarioKind::KernelRates;
  c.seed = static_cast<std::uint64_t>(r.integer("scenario", "seed", 0, 0, std::numeric_limits<long>::max()));

  r.require("grid", "dim");
  const Entry& points_entry = r.require("grid", "points");
  r.require("grid", "length");
  const long dim = r.integer("grid", "dim", 1, 1, 3);
  const long points = r.integer("grid", "points", 8, 8, 1L << 20);
  if ((points & (points - 1)) != 0) bad_value(points_entry, "grid", "points", "must be a power of two");
  const double length = r.positive("grid", "length", 1);
  SolverConfig& s = c.solver;
  s.grid = Grid<double>(static_cast<int>(dim), static_cast<int>(points), length);

  s.params.gamma = r.positive("model", "gamma", 1);
  s.params.beta = r.positive("model", "beta", 1);
  s.params.a = r.positive("model", "a", 1);
  s.params.b = r.positive("model", "b", 1);

  SourceSpec<double>& src = s.sources;
  src.bbar = r.choice("sources", "bbar", "zero", {"zero", "quad"}) == "quad" ? DampingKind::Quad : DampingKind::Zero;
  src.bbar_c3 = r.real("sources", "bbar_c3", 0);
  const std::string h = r.choice("sources", "h", "grad", {"zero", "grad", "sat"});
  src.h = h == "zero" ? SensitivityKind::Zero : h == "sat" ? SensitivityKind::Sat : SensitivityKind::Grad;
  src.chi = r.real("sources", "chi", 1);
  src.g = r.choice("sources", "g", "linear", {"zero", "linear"}) == "linear" ? ResponseKind::Linear : ResponseKind::Zero;
  src.fbar = r.choice("sources", "fbar", "zero", {"zero", "quad"}) == "quad" ? ProductionKind::Quad : ProductionKind::Zero;
  src.fbar_c1 = r.real("sources", "fbar_c1", 0);
  src.fbar_c2 = r.real("sources", "fbar_c2", 0);

  const Entry& t_end_entry = r.require("time", "t_end");
  s.t_end = r.positive("time", "t_end", 1);
  s.dt = r.positive("time", "dt", default_time_step(s.grid, s.params));
  if (s.t_end < s.dt) bad_value(t_end_entry, "time", "t_end", "must be at least dt");
  s.dt = s.time_step();
  const long auto_record = std::max(1L, std::lround(0.5 / s.dt));
  s.record_every = static_cast<int>(r.integer("time", "record_every", auto_record, 1, 1L << 30));

  const double default_width = length / 40;
  s.init.u = read_profile(r, "u", InitShape::Gaussian, default_width, static_cast<int>(dim));
  s.init.v = read_profile(r, "v", InitShape::Zero, default_width, static_cast<int>(dim));
  s.init.phi = read_profile(r, "phi", InitShape::Zero, default_width, static_cast<int>(dim));

  c.window.lo = r.positive("fit", "window_lo", 10);
  c.window.hi = r.positive("fit", "window_hi", std::min(s.t_end, 0.4 * length / s.params.gamma));
  if (!(c.window.hi > c.window.lo)) {
    const Entry* e = r.find("fit", "window_hi");
    if (e) bad_value(*e, "fit", "window_hi", "must exceed window_lo");
    throw ConfigError("[fit] window_hi (default min(t_end, 0.4 L / gamma)) must exceed window_lo");
  }
  s.derivative_orders = static_cast<int>(r.integer("fit", "derivative_orders", 1, 0, 4));
  s.sobolev_s = r.nonnegative("fit", "sobolev_s", 1);

  if (c.scenario == ScenarioKind::ConstantState) {
    const Entry& e = r.require("constant_state", "u_bar");
    s.regime = Regime::ConstantState;
    s.u_bar = to_double(e, "constant_state", "u_bar");
    if (s.u_bar < 0) bad_value(e, "constant_state", "u_bar", "must be nonnegative");
    if (src.fbar != ProductionKind::Zero) {
      const Entry* f = r.find("sources", "fbar");
      bad_value(*f, "sources", "fbar", "the constant-state scenario requires fbar = zero");
    }
  } else if (const Entry* e = r.find("constant_state", "u_bar")) {
    bad_value(*e, "constant_state", "u_bar", "only valid for scenario constant_state");
  }

  c.kernel.cutoff = r.nonnegative("kernel", "cutoff", 0);
  c.kernel.probe_width = r.positive("kernel", "probe_width", 4 * s.grid.spacing());
  c.kernel.samples = static_cast<int>(r.integer("kernel", "samples", 48, 12, 100000));
  c.kernel.t_min = r.positive("kernel", "t_min", 1);
  c.kernel.exp_window_lo = r.positive("kernel", "exp_window_lo", 1);
  c.kernel.exp_window_hi = r.positive("kernel", "exp_window_hi", 30);
  if (c.scenario == ScenarioKind::KernelRates) {
    if (!(c.kernel.t_min <= c.window.lo) || !(c.kernel.t_min <= c.kernel.exp_window_lo))
      throw ConfigError("[kernel] t_min must not exceed the fit windows");
    if (!(c.kernel.exp_window_hi > c.kernel.exp_window_lo))
      throw ConfigError("[kernel] exp_window_hi must exceed exp_window_lo");
  }

  c.output_dir = r.find("output", "dir") ? r.find("output", "dir")->value : "out";
  c.snapshots = r.boolean("output", "snapshots", false);
  s.snapshot_every = static_cast<int>(r.integer("output", "snapshot_every", 0, 0, 1L << 30));

  c.diagnostics.oracle = r.boolean("diagnostics", "oracle", false);
  c.diagnostics.oracle_t_end = r.positive("diagnostics", "oracle_t_end", 0.5);
  if (c.diagnostics.oracle_t_end > 1)
    bad_value(*r.find("diagnostics", "oracle_t_end"), "diagnostics", "oracle_t_end", "must not exceed 1");
  c.diagnostics.oracle_nodes = static_cast<int>(r.integer("diagnostics", "oracle_nodes", 64, 2, 4096));
  c.diagnostics.oracle_picard = static_cast<int>(r.integer("diagnostics", "oracle_picard", 6, 3, 100));
  c.diagnostics.mass_tolerance = r.positive("diagnostics", "mass_tolerance", 1e-9);
  s.verify_propagator = r.boolean("diagnostics", "verify_propagator", false);

  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_ini(const ScenarioConfig& c) {
  const SolverConfig& s = c.solver;
  std::ostringstream o;
  o << "[scenario]\nname = " << to_string(c.scenario) << "\nseed = " << c.seed << "\n\n";
  o << "[grid]\ndim = " << s.grid.dim() << "\npoints = " << s.grid.points_per_dim() << "\nlength = " << fmt(s.grid.length())
    << "\n\n";
  o << "[model]\ngamma = " << fmt(s.params.gamma) << "\nbeta = " << fmt(s.params.beta) << "\na = " << fmt(s.params.a)
    << "\nb = " << fmt(s.params.b) << "\n\n";
  const SourceSpec<double>& src = s.sources;
  o << "[sources]\nbbar = " << (src.bbar == DampingKind::Quad ? "quad" : "zero") << "\nbbar_c3 = " << fmt(src.bbar_c3)
    << "\nh = " << (src.h == SensitivityKind::Zero ? "zero" : src.h == SensitivityKind::Sat ? "sat" : "grad")
    << "\nchi = " << fmt(src.chi) << "\ng = " << (src.g == ResponseKind::Linear ? "linear" : "zero")
    << "\nfbar = " << (src.fbar == ProductionKind::Quad ? "quad" : "zero") << "\nfbar_c1 = " << fmt(src.fbar_c1)
    << "\nfbar_c2 = " << fmt(src.fbar_c2) << "\n\n";
  o << "[time]\ndt = " << fmt(s.dt) << "\nt_end = " << fmt(s.t_end) << "\nrecord_every = " << s.record_every << "\n\n";
  o << "[initial]\n";
  for (const auto& [name, p] : {std::pair<std::string, const InitProfile*>{"u", &s.init.u}, {"v", &s.init.v}, {"phi", &s.init.phi}}) {
    o << name << " = " << shape_name(p->shape) << "\n" << name << "_amplitude = " << fmt(p->amplitude) << "\n"
      << name << "_width = " << fmt(p->width) << "\n";
    if (!p->center.empty()) o << name << "_center = " << join(p->center) << "\n";
    if (!p->mode.empty()) o << name << "_mode = " << join(p->mode) << "\n";
  }
  o << "\n[fit]\nwindow_lo = " << fmt(c.window.lo) << "\nwindow_hi = " << fmt(c.window.hi)
    << "\nderivative_orders = " << s.derivative_orders << "\nsobolev_s = " << fmt(s.sobolev_s) << "\n\n";
  if (c.scenario == ScenarioKind::ConstantState) o << "[constant_state]\nu_bar = " << fmt(s.u_bar) << "\n\n";
  o << "[kernel]\ncutoff = " << fmt(c.kernel.cutoff) << "\nprobe_width = " << fmt(c.kernel.probe_width)
    << "\nsamples = " << c.kernel.samples << "\nt_min = " << fmt(c.kernel.t_min)
    << "\nexp_window_lo = " << fmt(c.kernel.exp_window_lo) << "\nexp_window_hi = " << fmt(c.kernel.exp_window_hi) << "\n\n";
  o << "[output]\ndir = " << c.output_dir << "\nsnapshots = " << (c.snapshots ? "true" : "false")
    << "\nsnapshot_every = " << s.snapshot_every << "\n\n";
  o << "[diagnostics]\noracle = " << (c.diagnostics.oracle ? "true" : "false")
    << "\noracle_t_end = " << fmt(c.diagnostics.oracle_t_end) << "\noracle_nodes = " << c.diagnostics.oracle_nodes
    << "\noracle_picard = " << c.diagnostics.oracle_picard << "\nmass_tolerance = " << fmt(c.diagnostics.mass_tolerance)
    << "\nverify_propagator = " << (s.verify_propagator ? "true" : "false") << "\n";
  return o.str();
}

}  // namespace chemo
