#include "benard/config.hpp"

#include <fmt/format.h>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <set>
#include <sstream>

#include "benard/basis_io.hpp"
#include "benard/error.hpp"
#include "benard/norms.hpp"

namespace benard {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"domain", {"length", "grid_x1", "grid_x2"}},
      {"basis", {"max_k1", "max_k2", "velocity_modes", "bc", "profile_resolution", "velocity_subset",
                 "temperature_subset"}},
      {"physics", {"nu", "kappa"}},
      {"noise", {"amplitude", "decay_s", "lambdas"}},
      {"sigma", {"family", "params"}},
      {"integrator", {"T", "n_steps", "epsilon", "record_stride", "nonlinear"}},
      {"initial", {"kind", "velocity", "temperature", "amplitude", "decay"}},
      {"control", {"kind", "velocity", "temperature"}},
      {"ldp", {"M"}},
      {"mam", {"target", "terminal_velocity", "terminal_temperature", "tolerance", "radius",
               "rho_schedule", "max_iters", "grad_tol", "control_steps"}},
      {"weakconv", {"eps_grid", "paths"}},
      {"mcldp", {"eps_grid", "paths", "radius"}},
      {"increments", {"paths", "levels", "N"}},
      {"compactness", {"n_list", "amplitude", "g_velocity", "g_temperature"}},
      {"diagnostics", {"samples"}},
      {"output", {"dir"}},
  };
  return keys;
}

class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }
  std::string raw(const std::string& key) const {
    return boost::algorithm::trim_copy(tree_->get<std::string>(key));
  }
  std::string path(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

  template <class T>
  void read(const std::string& key, T& out) const {
    if (!has(key)) return;
    const std::string text = raw(key);
    try {
      out = convert<T>(text);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("{}: cannot parse '{}'", path(key), text));
    }
  }

 private:
  template <class T>
  static T convert(const std::string& text) {
    if constexpr (std::is_same_v<T, std::string>) {
      return text;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (text == "true" || text == "1") return true;
      if (text == "false" || text == "0") return false;
      throw std::invalid_argument("bool");
    } else {
      std::size_t used = 0;
      T v{};
      if constexpr (std::is_same_v<T, int>) v = std::stoi(text, &used);
      else if constexpr (std::is_same_v<T, std::uint64_t>) v = std::stoull(text, &used);
      else v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument("trailing characters");
      return v;
    }
  }

  const pt::ptree* tree_;
  std::string name_;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, boost::is_any_of(","));
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::algorithm::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

template <class T>
std::vector<T> parse_list(const Section& s, const std::string& key) {
  std::vector<T> out;
  for (const auto& item : split_list(s.raw(key))) {
    try {
      std::size_t used = 0;
      if constexpr (std::is_same_v<T, int>) out.push_back(std::stoi(item, &used));
      else out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("{}: cannot parse list entry '{}'", s.path(key), item));
    }
  }
  return out;
}

ModeLabel parse_label(const std::string& text, const std::string& where) {
  std::vector<std::string> f;
  boost::algorithm::split(f, text, boost::is_any_of(":"));
  try {
    if (f.size() != 2) throw std::invalid_argument("fields");
    return {std::stoi(f[0]), std::stoi(f[1])};
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("{}: expected 'k1:index', got '{}'", where, text));
  }
}

std::vector<ModeLabel> parse_labels(const Section& s, const std::string& key) {
  std::vector<ModeLabel> out;
  for (const auto& item : split_list(s.raw(key))) out.push_back(parse_label(item, s.path(key)));
  return out;
}

std::vector<ModeValue> parse_mode_values(const Section& s, const std::string& key) {
  std::vector<ModeValue> out;
  for (const auto& item : split_list(s.raw(key))) {
    const auto pos = item.rfind(':');
    if (pos == std::string::npos)
      throw ConfigError(fmt::format("{}: expected 'k1:index:value', got '{}'", s.path(key), item));
    ModeValue mv;
    mv.label = parse_label(item.substr(0, pos), s.path(key));
    try {
      mv.value = std::stod(item.substr(pos + 1));
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("{}: bad value in '{}'", s.path(key), item));
    }
    out.push_back(mv);
  }
  return out;
}

void read_field(const Section& s, FieldSpec& f, const std::string& vkey, const std::string& tkey) {
  s.read("kind", f.kind);
  if (s.has(vkey)) f.velocity = parse_mode_values(s, vkey);
  if (s.has(tkey)) f.temperature = parse_mode_values(s, tkey);
  if ((!f.velocity.empty() || !f.temperature.empty()) && !s.has("kind")) f.kind = "modes";
  if (f.kind != "zero" && f.kind != "modes" && f.kind != "random")
    throw ConfigError(fmt::format("{}: unknown kind '{}' (zero, modes, random)", s.path("kind"), f.kind));
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config syntax error at line {}: {}", e.line(), e.message()));
  }

  RunConfig cfg;
  const auto& allowed = allowed_keys();
  for (const auto& [name, child] : tree) {
    if (child.empty()) {  // top-level key
      if (name != "seed") throw ConfigError(fmt::format("unknown key '{}'", name));
      cfg.echo[name] = boost::algorithm::trim_copy(child.data());
      continue;
    }
    const auto it = allowed.find(name);
    if (it == allowed.end()) throw ConfigError(fmt::format("unknown section '[{}]'", name));
    for (const auto& [key, value] : child) {
      if (!it->second.count(key)) throw ConfigError(fmt::format("unknown key '{}.{}'", name, key));
      cfg.echo[name + "." + key] = boost::algorithm::trim_copy(value.data());
    }
  }
  auto section = [&](const std::string& name) {
    const auto it = tree.find(name);
    return Section(it == tree.not_found() ? nullptr : &it->second, name);
  };

  Section root(&tree, "");
  root.read("seed", cfg.seed);

  auto d = section("domain");
  d.read("length", cfg.domain.length);
  d.read("grid_x1", cfg.domain.grid_x1);
  d.read("grid_x2", cfg.domain.grid_x2);

  auto b = section("basis");
  b.read("max_k1", cfg.basis.max_k1);
  b.read("max_k2", cfg.basis.max_k2);
  b.read("velocity_modes", cfg.basis.velocity_modes);
  b.read("profile_resolution", cfg.basis.profile_resolution);
  if (b.has("bc")) {
    try {
      cfg.basis.bc = parse_boundary_mode(b.raw("bc"));
    } catch (const std::exception& e) {
      throw ConfigError(fmt::format("basis.bc: {}", e.what()));
    }
  }
  if (!(cfg.domain.length > 0.0)) throw ConfigError("domain.length must be positive");
  if (cfg.basis.max_k1 < 0 || cfg.basis.max_k2 < 1 || cfg.basis.velocity_modes < 1)
    throw ConfigError("basis.max_k1 must be >= 0, basis.max_k2 and basis.velocity_modes >= 1");
  if (b.has("velocity_subset")) cfg.velocity_subset = parse_labels(b, "velocity_subset");
  if (b.has("temperature_subset")) cfg.temperature_subset = parse_labels(b, "temperature_subset");

  auto p = section("physics");
  p.read("nu", cfg.physics.nu);
  p.read("kappa", cfg.physics.kappa);
  cfg.physics.validate();

  auto n = section("noise");
  n.read("amplitude", cfg.noise_amplitude);
  n.read("decay_s", cfg.noise_decay);
  if (n.has("lambdas")) cfg.noise_lambdas = parse_list<double>(n, "lambdas");
  if (!(cfg.noise_amplitude >= 0.0)) throw ConfigError("noise.amplitude must be non-negative");
  if (cfg.noise_lambdas.empty() && !(cfg.noise_decay > 1.0))
    throw ConfigError("noise.decay_s must exceed 1 for a trace-class Q");

  auto s = section("sigma");
  if (s.has("family")) cfg.sigma_family = parse_sigma_family(s.raw("family"));
  if (s.has("params")) cfg.sigma_params = parse_list<double>(s, "params");
  DiffusionCoefficient::make(cfg.sigma_family, cfg.sigma_params);  // validates

  auto ig = section("integrator");
  ig.read("T", cfg.integrator.horizon);
  ig.read("n_steps", cfg.integrator.n_steps);
  ig.read("epsilon", cfg.integrator.epsilon);
  ig.read("record_stride", cfg.integrator.record_stride);
  ig.read("nonlinear", cfg.integrator.nonlinear);
  cfg.integrator.validate();

  auto ini = section("initial");
  read_field(ini, cfg.initial, "velocity", "temperature");
  ini.read("amplitude", cfg.initial.amplitude);
  ini.read("decay", cfg.initial.decay);
  auto ctl = section("control");
  read_field(ctl, cfg.control, "velocity", "temperature");
  if (cfg.control.kind == "random") throw ConfigError("control.kind: random controls are not supported");

  section("ldp").read("M", cfg.ldp_M);

  auto m = section("mam");
  if (m.has("target")) {
    const auto t = m.raw("target");
    if (t == "terminal") cfg.mam_target = TargetKind::Terminal;
    else if (t == "exit") cfg.mam_target = TargetKind::Exit;
    else if (t == "path") cfg.mam_target = TargetKind::Path;
    else throw ConfigError(fmt::format("mam.target: unknown target '{}' (terminal, path, exit)", t));
  }
  if (m.has("terminal_velocity")) cfg.mam_terminal.velocity = parse_mode_values(m, "terminal_velocity");
  if (m.has("terminal_temperature"))
    cfg.mam_terminal.temperature = parse_mode_values(m, "terminal_temperature");
  if (!cfg.mam_terminal.velocity.empty() || !cfg.mam_terminal.temperature.empty())
    cfg.mam_terminal.kind = "modes";
  m.read("tolerance", cfg.mam_tolerance);
  m.read("radius", cfg.mam_radius);
  if (m.has("rho_schedule")) cfg.mam.rho_schedule = parse_list<double>(m, "rho_schedule");
  m.read("max_iters", cfg.mam.max_iters);
  m.read("grad_tol", cfg.mam.grad_tol);
  m.read("control_steps", cfg.mam.control_steps);
  if (!(cfg.mam_tolerance > 0.0)) throw ConfigError("mam.tolerance must be positive");
  for (std::size_t i = 1; i < cfg.mam.rho_schedule.size(); ++i)
    if (!(cfg.mam.rho_schedule[i] > cfg.mam.rho_schedule[i - 1]))
      throw ConfigError("mam.rho_schedule must be increasing");

  auto w = section("weakconv");
  if (w.has("eps_grid")) cfg.weakconv_eps = parse_list<double>(w, "eps_grid");
  w.read("paths", cfg.weakconv_paths);
  auto mc = section("mcldp");
  if (mc.has("eps_grid")) cfg.mcldp_eps = parse_list<double>(mc, "eps_grid");
  mc.read("paths", cfg.mcldp_paths);
  mc.read("radius", cfg.mcldp_radius);
  auto inc = section("increments");
  inc.read("paths", cfg.increments_paths);
  inc.read("levels", cfg.increments_levels);
  inc.read("N", cfg.increments_N);
  auto cp = section("compactness");
  if (cp.has("n_list")) cfg.compactness_n = parse_list<int>(cp, "n_list");
  cp.read("amplitude", cfg.compactness_amplitude);
  if (cp.has("g_velocity")) cfg.compactness_g.velocity = parse_mode_values(cp, "g_velocity");
  if (cp.has("g_temperature")) cfg.compactness_g.temperature = parse_mode_values(cp, "g_temperature");
  if (!cfg.compactness_g.velocity.empty() || !cfg.compactness_g.temperature.empty())
    cfg.compactness_g.kind = "modes";
  section("diagnostics").read("samples", cfg.diagnostics_samples);
  section("output").read("dir", cfg.output_dir);

  for (double e : cfg.weakconv_eps)
    if (!(e >= 0.0)) throw ConfigError("weakconv.eps_grid entries must be >= 0");
  for (double e : cfg.mcldp_eps)
    if (!(e > 0.0)) throw ConfigError("mcldp.eps_grid entries must be > 0");
  if (cfg.weakconv_paths < 1 || cfg.mcldp_paths < 1 || cfg.increments_paths < 1)
    throw ConfigError("path counts must be >= 1");
  if (cfg.increments_levels < 1 || cfg.increments_levels > 20)
    throw ConfigError("increments.levels must lie in [1, 20]");
  if (cfg.diagnostics_samples < 1) throw ConfigError("diagnostics.samples must be >= 1");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

GalerkinBasis make_basis(const RunConfig& cfg, const std::string& cache_path) {
  GalerkinBasis full = cache_path.empty() ? GalerkinBasis::build(cfg.domain, cfg.basis)
                                          : cached_basis(cfg.domain, cfg.basis, cache_path);
  if (cfg.velocity_subset.empty() && cfg.temperature_subset.empty()) return full;
  std::vector<int> vi, ti;
  for (const auto& l : cfg.velocity_subset) {
    const int i = full.find_velocity(l);
    if (i < 0) throw ConfigError(fmt::format("basis.velocity_subset: no velocity mode {}:{}", l.k1, l.index));
    vi.push_back(i);
  }
  for (const auto& l : cfg.temperature_subset) {
    const int i = full.find_temperature(l);
    if (i < 0)
      throw ConfigError(fmt::format("basis.temperature_subset: no temperature mode {}:{}", l.k1, l.index));
    ti.push_back(i);
  }
  if (cfg.velocity_subset.empty())
    for (int i = 0; i < full.velocity_size(); ++i) vi.push_back(i);
  if (cfg.temperature_subset.empty())
    for (int i = 0; i < full.temperature_size(); ++i) ti.push_back(i);
  return full.subset(vi, ti);
}

CovarianceSpec make_covariance(const RunConfig& cfg, const GalerkinBasis& basis) {
  if (!cfg.noise_lambdas.empty()) {
    if (static_cast<int>(cfg.noise_lambdas.size()) != basis.size())
      throw ConfigError(fmt::format("noise.lambdas has {} entries, the basis has {} modes",
                                    cfg.noise_lambdas.size(), basis.size()));
    return CovarianceSpec::explicit_list(
        Eigen::Map<const Vec>(cfg.noise_lambdas.data(), static_cast<Eigen::Index>(cfg.noise_lambdas.size())));
  }
  return CovarianceSpec::decay_law(basis, cfg.noise_amplitude, cfg.noise_decay);
}

NoiseModel make_noise(const RunConfig& cfg, const GalerkinBasis& basis) {
  auto sigma = DiffusionCoefficient::make(cfg.sigma_family, cfg.sigma_params);
  return {make_covariance(cfg, basis), sigma, sigma};
}

Vec make_field(const FieldSpec& spec, const GalerkinBasis& basis, std::uint64_t seed) {
  Vec v = Vec::Zero(basis.size());
  if (spec.kind == "random") {
    Rng rng = make_stream(seed, 0x696e6974ULL);
    v = random_field(basis, rng, spec.decay).values() * spec.amplitude;
    return v;
  }
  for (const auto& mv : spec.velocity) {
    const int i = basis.find_velocity(mv.label);
    if (i < 0) throw ConfigError(fmt::format("no velocity mode {}:{} in the basis", mv.label.k1, mv.label.index));
    v[i] = mv.value;
  }
  for (const auto& mv : spec.temperature) {
    const int i = basis.find_temperature(mv.label);
    if (i < 0)
      throw ConfigError(fmt::format("no temperature mode {}:{} in the basis", mv.label.k1, mv.label.index));
    v[basis.velocity_size() + i] = mv.value;
  }
  return v;
}

}  // namespace benard
