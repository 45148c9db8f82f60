#include "hfscat/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

namespace hfscat {

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Thin view over one TOML table that remembers which keys were read.
class Table {
 public:
  Table(const toml::table* t, std::string path) : t_(t), path_(std::move(path)) {}

  [[nodiscard]] bool has(const std::string& key) const { return t_ && t_->contains(key); }
  [[nodiscard]] std::string field(const std::string& key) const { return join(path_, key); }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    const toml::node* n = lookup(key);
    if (!n) return require(key, fallback);
    if (!n->is_number()) throw ConfigError(field(key), "expected a number");
    const double v = n->value<double>().value();
    if (!std::isfinite(v)) throw ConfigError(field(key), "must be finite");
    return v;
  }

  std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback = std::nullopt) {
    const toml::node* n = lookup(key);
    if (!n) return require(key, fallback);
    if (!n->is_integer()) throw ConfigError(field(key), "expected an integer");
    return n->value<std::int64_t>().value();
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    const toml::node* n = lookup(key);
    if (!n) return require(key, fallback);
    if (!n->is_string()) throw ConfigError(field(key), "expected a string");
    return n->value<std::string>().value();
  }

  bool boolean(const std::string& key, bool fallback) {
    const toml::node* n = lookup(key);
    if (!n) return fallback;
    if (!n->is_boolean()) throw ConfigError(field(key), "expected true or false");
    return n->value<bool>().value();
  }

  std::vector<double> numbers(const std::string& key) {
    const toml::node* n = lookup(key);
    if (!n) return {};
    const toml::array* arr = n->as_array();
    if (!arr) throw ConfigError(field(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const toml::node& e = *arr->get(i);
      if (!e.is_number()) throw ConfigError(field(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(e.value<double>().value());
    }
    return out;
  }

  Table sub(const std::string& key, bool required = false) {
    const toml::node* n = lookup(key);
    if (!n) {
      if (required) throw ConfigError(field(key), "missing table");
      return Table(nullptr, field(key));
    }
    if (!n->is_table()) throw ConfigError(field(key), "expected a table");
    return Table(n->as_table(), field(key));
  }

  const toml::array* array(const std::string& key) {
    const toml::node* n = lookup(key);
    if (!n) return nullptr;
    if (!n->is_array()) throw ConfigError(field(key), "expected an array");
    return n->as_array();
  }

  /// Rejects keys that were never read, which catches misspelt options.
  void finish() const {
    if (!t_) return;
    for (const auto& [k, v] : *t_) {
      const std::string key(k.str());
      if (!seen_.count(key)) throw ConfigError(field(key), "unknown key");
    }
  }

 private:
  const toml::node* lookup(const std::string& key) {
    seen_.insert(key);
    return t_ ? t_->get(key) : nullptr;
  }

  template <typename T>
  T require(const std::string& key, const std::optional<T>& fallback) const {
    if (!fallback) throw ConfigError(field(key), "missing required key");
    return *fallback;
  }

  const toml::table* t_;
  std::string path_;
  std::set<std::string> seen_;
};

// Module validators report "field: message"; turn that into a ConfigError.
template <typename F>
void rethrow_as_config(F&& f, const std::string& fallback_field) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    const auto colon = msg.find(": ");
    if (colon != std::string::npos && msg.find(' ') > colon) {
      throw ConfigError(msg.substr(0, colon), msg.substr(colon + 2));
    }
    throw ConfigError(fallback_field, msg);
  }
}

Potential parse_potential(Table t) {
  const std::string kind = t.string("kind");
  Potential w;
  if (kind == "dirac") {
    w = Potential::dirac(t.number("mass"));
  } else if (kind == "gaussian") {
    const double mass = t.number("mass");
    const double sigma = t.number("sigma");
    if (!(sigma > 0.0)) throw ConfigError(t.field("sigma"), "must be > 0");
    w = Potential::gaussian(mass, sigma);
  } else if (kind == "box") {
    const double mass = t.number("mass");
    const double a = t.number("half_width");
    if (!(a > 0.0)) throw ConfigError(t.field("half_width"), "must be > 0");
    w = Potential::box(mass, a);
  } else if (kind == "sum_of_diracs") {
    const toml::array* atoms = t.array("atoms");
    if (!atoms || atoms->empty()) throw ConfigError(t.field("atoms"), "need at least one [mass, shift] pair");
    std::vector<std::pair<double, double>> list;
    for (std::size_t i = 0; i < atoms->size(); ++i) {
      const std::string f = t.field("atoms") + "[" + std::to_string(i) + "]";
      const toml::array* pair = atoms->get(i)->as_array();
      if (!pair || pair->size() != 2 || !pair->get(0)->is_number() || !pair->get(1)->is_number()) {
        throw ConfigError(f, "expected [mass, shift]");
      }
      const double shift = pair->get(1)->value<double>().value();
      if (!(shift >= 0.0)) throw ConfigError(f, "shift must be >= 0");
      list.emplace_back(pair->get(0)->value<double>().value(), shift);
    }
    w = Potential::sum_of_diracs(std::move(list));
  } else {
    throw ConfigError(t.field("kind"), "unknown potential '" + kind + "' (dirac, gaussian, box, sum_of_diracs)");
  }
  t.finish();
  return w;
}

WavePacket parse_packet(Table t) {
  WavePacket p;
  const std::string shape = t.string("shape", std::string("gaussian"));
  if (shape == "gaussian") {
    p.shape = PacketShape::Gaussian;
  } else if (shape == "plane_wave") {
    p.shape = PacketShape::PlaneWave;
  } else {
    throw ConfigError(t.field("shape"), "expected gaussian or plane_wave");
  }
  p.weight = t.number("weight", 1.0);
  p.amplitude = t.number("amplitude");
  p.center = t.number("center", 0.0);
  p.frequency = t.number("frequency", 0.0);
  p.width = t.number("width", 1.0);
  p.order = static_cast<int>(t.integer("order", 0));
  if (!(p.weight >= 0.0)) throw ConfigError(t.field("weight"), "must be >= 0");
  if (!(p.width > 0.0)) throw ConfigError(t.field("width"), "must be > 0");
  if (p.order != 0 && p.order != 1) throw ConfigError(t.field("order"), "must be 0 or 1");
  t.finish();
  return p;
}

RhsMode parse_mode_field(const std::string& field, const std::string& value) {
  try {
    return parse_rhs_mode(value);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  }
}

}  // namespace

IntegratorConfig RunConfig::integrator_with_probes() const {
  IntegratorConfig ic = integrator;
  for (double s : probes.remainder_times) {
    ic.extra_times.push_back(s * (1.0 - probes.remainder_rel_h));
    ic.extra_times.push_back(s * (1.0 + probes.remainder_rel_h));
  }
  return ic;
}

RunConfig parse_config(const std::string& toml_text) {
  toml::table doc;
  try {
    doc = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << e.description() << " at line " << e.source().begin.line;
    throw ConfigError("<syntax>", msg.str());
  }
  Table root(&doc, "");
  RunConfig cfg;
  cfg.name = root.string("name", std::string("run"));
  cfg.output = root.string("output", cfg.name);
  if (cfg.output.empty()) throw ConfigError("output", "must not be empty");
  cfg.mode = parse_mode_field("mode", root.string("mode"));
  const std::int64_t seed = root.integer("seed", 0);
  if (seed < 0) throw ConfigError("seed", "must be >= 0");
  cfg.seed = static_cast<std::uint64_t>(seed);

  {
    Table g = root.sub("grid", true);
    const std::int64_t n = g.integer("n");
    if (n < 8 || (n & (n - 1)) != 0) throw ConfigError("grid.n", "must be a power of two >= 8, got " + std::to_string(n));
    cfg.grid.n = static_cast<std::size_t>(n);
    cfg.grid.L = g.number("L");
    if (!(cfg.grid.L > 0.0)) throw ConfigError("grid.L", "must be > 0");
    g.finish();
  }

  cfg.potential = parse_potential(root.sub("potential", true));

  {
    Table init = root.sub("initial_data", true);
    const toml::array* packets = init.array("packets");
    if (!packets || packets->empty()) throw ConfigError("initial_data.packets", "need at least one packet");
    for (std::size_t i = 0; i < packets->size(); ++i) {
      const std::string f = "initial_data.packets[" + std::to_string(i) + "]";
      const toml::table* t = packets->get(i)->as_table();
      if (!t) throw ConfigError(f, "expected a table");
      cfg.packets.push_back(parse_packet(Table(t, f)));
    }
    init.finish();
  }

  {
    Table t = root.sub("integrator");
    IntegratorConfig& ic = cfg.integrator;
    ic.dt = t.number("dt", ic.dt);
    const std::string scheme = t.string("scheme", to_string(ic.scheme));
    try {
      ic.scheme = parse_scheme(scheme);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("integrator.scheme", e.what());
    }
    ic.t_start = t.number("t_start", ic.t_start);
    ic.t_end = t.number("t_end", ic.t_end);
    ic.snapshot_ratio = t.number("snapshot_ratio", ic.snapshot_ratio);
    ic.extra_times = t.numbers("extra_times");
    ic.dealias = t.boolean("dealias", ic.dealias);
    t.finish();
    rethrow_as_config([&] { ic.validate(); }, "integrator");
  }

  {
    Table t = root.sub("fit");
    FitConfig& fc = cfg.fit;
    fc.alpha = t.number("alpha", fc.alpha);
    fc.theta = t.number("theta", fc.theta);
    fc.beta = t.number("beta", fc.beta);
    const std::vector<double> window = t.numbers("window");
    if (t.has("window")) {
      if (window.size() != 2) throw ConfigError("fit.window", "expected [t_lo, t_hi]");
      fc.t_lo = window[0];
      fc.t_hi = window[1];
    }
    t.finish();
    rethrow_as_config([&] { fc.validate(); }, "fit");
  }

  {
    Table t = root.sub("probes");
    ProbeConfig& pc = cfg.probes;
    pc.xi_probe = t.number("xi_probe", pc.xi_probe);
    pc.remainder_times = t.numbers("remainder_times");
    pc.remainder_rel_h = t.number("remainder_rel_h", pc.remainder_rel_h);
    t.finish();
    if (!(pc.remainder_rel_h > 0.0 && pc.remainder_rel_h <= 0.1)) {
      throw ConfigError("probes.remainder_rel_h", "must lie in (0, 0.1]");
    }
    for (double s : pc.remainder_times) {
      if (s * (1.0 - pc.remainder_rel_h) < cfg.integrator.t_start || s * (1.0 + pc.remainder_rel_h) > cfg.integrator.t_end) {
        throw ConfigError("probes.remainder_times", "stencil around s=" + std::to_string(s) + " leaves [t_start, t_end]");
      }
    }
  }

  {
    Table t = root.sub("compare");
    cfg.compare.first = parse_mode_field("compare.first", t.string("first", to_string(cfg.compare.first)));
    cfg.compare.second = parse_mode_field("compare.second", t.string("second", to_string(cfg.compare.second)));
    t.finish();
  }

  root.finish();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("<file>", "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

nlohmann::ordered_json potential_json(const Potential& w) {
  nlohmann::ordered_json j;
  j["kind"] = w.kind_name();
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, DiracMass>) {
          j["mass"] = v.lambda;
        } else if constexpr (std::is_same_v<T, GaussianMass>) {
          j["mass"] = v.lambda;
          j["sigma"] = v.sigma;
        } else if constexpr (std::is_same_v<T, BoxMass>) {
          j["mass"] = v.lambda;
          j["half_width"] = v.half_width;
        } else {
          auto atoms = nlohmann::ordered_json::array();
          for (const auto& [m, s] : v.atoms) atoms.push_back({m, s});
          j["atoms"] = atoms;
        }
      },
      w.kind());
  return j;
}

nlohmann::ordered_json canonical_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["grid"] = {{"n", cfg.grid.n}, {"L", cfg.grid.L}};
  j["potential"] = potential_json(cfg.potential);
  j["mode"] = to_string(cfg.mode);
  auto packets = nlohmann::ordered_json::array();
  for (const auto& p : cfg.packets) {
    nlohmann::ordered_json q;
    q["shape"] = p.shape == PacketShape::Gaussian ? "gaussian" : "plane_wave";
    q["weight"] = p.weight;
    q["amplitude"] = p.amplitude;
    q["center"] = p.center;
    q["frequency"] = p.frequency;
    q["width"] = p.width;
    q["order"] = p.order;
    packets.push_back(q);
  }
  j["initial_data"] = packets;
  const IntegratorConfig& ic = cfg.integrator;
  j["integrator"] = {{"dt", ic.dt},         {"scheme", to_string(ic.scheme)},
                     {"t_start", ic.t_start}, {"t_end", ic.t_end},
                     {"snapshot_ratio", ic.snapshot_ratio}, {"extra_times", ic.extra_times},
                     {"dealias", ic.dealias}};
  j["fit"] = {{"alpha", cfg.fit.alpha}, {"theta", cfg.fit.theta}, {"beta", cfg.fit.beta},
              {"window", {cfg.fit.t_lo, cfg.fit.t_hi}}};
  j["probes"] = {{"xi_probe", cfg.probes.xi_probe},
                 {"remainder_times", cfg.probes.remainder_times},
                 {"remainder_rel_h", cfg.probes.remainder_rel_h}};
  j["compare"] = {{"first", to_string(cfg.compare.first)}, {"second", to_string(cfg.compare.second)}};
  j["seed"] = cfg.seed;
  return j;
}

std::string config_hash(const RunConfig& cfg) {
  const std::string text = canonical_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::ordered_json artifact_header(const RunConfig& cfg) {
  nlohmann::ordered_json h;
  h["config_hash"] = config_hash(cfg);
  h["artifact_version"] = artifact_version;
  h["grid"] = {{"n", cfg.grid.n}, {"L", cfg.grid.L}};
  h["potential"] = potential_json(cfg.potential);
  return h;
}

}  // namespace hfscat
