#include "config.hpp"

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <set>
#include <sstream>

namespace mwplate::cli {

namespace {

std::string where(const YAML::Node& node, const std::string& key) {
  std::ostringstream out;
  out << key;
  if (node.Mark().line >= 0) out << " (line " << node.Mark().line + 1 << ")";
  return out.str();
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& key, const std::string& message) {
  throw ConfigError(where(node, key) + ": " + message);
}

void require_map(const YAML::Node& node, const std::string& key) {
  if (!node.IsMap()) fail(node, key, "expected a mapping");
}

void check_keys(const YAML::Node& node, const std::string& key, const std::set<std::string>& allowed) {
  require_map(node, key);
  for (const auto& item : node) {
    const std::string name = item.first.as<std::string>();
    if (!allowed.count(name)) fail(item.first, key + "." + name, "unknown key");
  }
}

template <typename T> T scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail(node, key, "expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, key, "cannot parse '" + node.Scalar() + "'");
  }
}

std::vector<double> numbers(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) fail(node, key, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i)
    out.push_back(scalar<double>(node[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

Vec2 pair(const YAML::Node& node, const std::string& key) {
  const auto v = numbers(node, key);
  if (v.size() != 2) fail(node, key, "expected two numbers");
  return Vec2(v[0], v[1]);
}

template <typename F> void optional(const YAML::Node& parent, const char* name, F&& read) {
  const YAML::Node node = parent[name];
  if (node) read(node);
}

void parse_model(const YAML::Node& node, ModelConfig& model) {
  check_keys(node, "model", {"wells", "density", "q", "p", "well_scale"});
  const YAML::Node wells = node["wells"];
  if (!wells) fail(node, "model", "missing key 'wells'");
  if (!wells.IsSequence() || wells.size() == 0) fail(wells, "model.wells", "expected a nonempty list of wells");
  for (std::size_t j = 0; j < wells.size(); ++j) {
    const std::string key = "model.wells[" + std::to_string(j + 1) + "]";
    const auto v = numbers(wells[j], key);
    if (v.size() != 9) fail(wells[j], key, "expected nine numbers (row-major 3x3)");
    Mat3 U;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) U(r, c) = v[3 * r + c];
    try {
      (void)Well(U);
    } catch (const std::invalid_argument& e) {
      fail(wells[j], key, e.what());
    }
    model.wells.push_back(U);
  }
  optional(node, "density", [&](const YAML::Node& n) {
    try {
      model.density = density_kind_from_string(scalar<std::string>(n, "model.density"));
    } catch (const std::invalid_argument& e) {
      fail(n, "model.density", e.what());
    }
  });
  optional(node, "q", [&](const YAML::Node& n) { model.q = scalar<double>(n, "model.q"); });
  optional(node, "p", [&](const YAML::Node& n) { model.p = scalar<double>(n, "model.p"); });
  optional(node, "well_scale", [&](const YAML::Node& n) { model.well_scale = scalar<double>(n, "model.well_scale"); });
  if (model.q < 0.0 || model.q > 2.0) fail(node, "model.q", "q must lie in [0, 2]");
  if (model.p <= 1.0) fail(node, "model.p", "p must exceed 1");
  if (model.well_scale <= 0.0) fail(node, "model.well_scale", "must be positive");
}

void parse_grid(const YAML::Node& node, GridConfig& grid) {
  check_keys(node, "grid", {"lower", "upper", "nodes"});
  optional(node, "lower", [&](const YAML::Node& n) { grid.lower = pair(n, "grid.lower"); });
  optional(node, "upper", [&](const YAML::Node& n) { grid.upper = pair(n, "grid.upper"); });
  optional(node, "nodes", [&](const YAML::Node& n) {
    if (n.IsScalar()) {
      grid.n1 = grid.n2 = scalar<int>(n, "grid.nodes");
    } else {
      const auto v = numbers(n, "grid.nodes");
      if (v.size() != 2) fail(n, "grid.nodes", "expected one or two node counts");
      grid.n1 = static_cast<int>(v[0]);
      grid.n2 = static_cast<int>(v[1]);
    }
  });
  if ((grid.upper - grid.lower).minCoeff() <= 0.0) fail(node, "grid", "upper bounds must exceed lower bounds");
  if (std::min(grid.n1, grid.n2) < 5) fail(node, "grid.nodes", "at least 5 nodes per direction");
}

void parse_regime(const YAML::Node& node, RegimeConfig& regime) {
  check_keys(node, "regime", {"alpha", "h_list", "n3", "gap_tolerance", "limit"});
  optional(node, "alpha", [&](const YAML::Node& n) { regime.alpha = scalar<double>(n, "regime.alpha"); });
  optional(node, "h_list", [&](const YAML::Node& n) { regime.h_list = numbers(n, "regime.h_list"); });
  optional(node, "n3", [&](const YAML::Node& n) { regime.n3 = scalar<int>(n, "regime.n3"); });
  optional(node, "gap_tolerance",
           [&](const YAML::Node& n) { regime.gap_tolerance = scalar<double>(n, "regime.gap_tolerance"); });
  optional(node, "limit", [&](const YAML::Node& n) { regime.limit = scalar<double>(n, "regime.limit"); });
  if (regime.alpha < 2.0) fail(node, "regime.alpha", "alpha must be at least 2");
  if (regime.n3 < 5) fail(node, "regime.n3", "at least 5 thickness quadrature points");
  if (regime.h_list.size() < 4) fail(node, "regime.h_list", "at least four thickness values");
  for (std::size_t i = 0; i < regime.h_list.size(); ++i) {
    if (regime.h_list[i] <= 0.0 || regime.h_list[i] >= 1.0) fail(node, "regime.h_list", "values must lie in (0, 1)");
    if (i > 0 && regime.h_list[i] >= regime.h_list[i - 1]) fail(node, "regime.h_list", "values must decrease strictly");
  }
}

void parse_load(const YAML::Node& node, LoadConfig& load) {
  check_keys(node, "load", {"f1", "f2", "f3", "scale", "samples"});
  const char* names[3] = {"f1", "f2", "f3"};
  for (int i = 0; i < 3; ++i) {
    optional(node, names[i], [&](const YAML::Node& n) {
      const std::string key = std::string("load.") + names[i];
      load.coefficients[i] = numbers(n, key);
      if (load.coefficients[i].size() > 6) fail(n, key, "polynomial loads are limited to degree 2 (six coefficients)");
    });
  }
  optional(node, "scale", [&](const YAML::Node& n) { load.scale = scalar<double>(n, "load.scale"); });
  optional(node, "samples", [&](const YAML::Node& n) { load.samples = scalar<std::string>(n, "load.samples"); });
  if (load.samples && (node["f1"] || node["f2"] || node["f3"]))
    fail(node, "load", "give either polynomial coefficients or a samples file, not both");
}

void parse_profile(const YAML::Node& node, ProfileConfig& profile) {
  check_keys(node, "state.profile", {"kind", "radius", "coefficients", "amplitude", "direction"});
  optional(node, "kind", [&](const YAML::Node& n) {
    const auto kind = scalar<std::string>(n, "state.profile.kind");
    if (kind == "cosine") {
      profile.kind = Profile::Kind::cosine;
    } else if (kind == "polynomial") {
      profile.kind = Profile::Kind::polynomial;
    } else {
      fail(n, "state.profile.kind", "expected cosine or polynomial");
    }
  });
  optional(node, "radius", [&](const YAML::Node& n) { profile.radius = scalar<double>(n, "state.profile.radius"); });
  optional(node, "coefficients",
           [&](const YAML::Node& n) { profile.coefficients = numbers(n, "state.profile.coefficients"); });
  optional(node, "amplitude",
           [&](const YAML::Node& n) { profile.amplitude = scalar<double>(n, "state.profile.amplitude"); });
  optional(node, "direction", [&](const YAML::Node& n) { profile.direction = pair(n, "state.profile.direction"); });
  if (profile.kind == Profile::Kind::cosine && profile.radius <= 0.0)
    fail(node, "state.profile.radius", "must be positive");
  if (profile.kind == Profile::Kind::polynomial && profile.coefficients.empty())
    fail(node, "state.profile.coefficients", "polynomial profile needs coefficients");
  if (profile.direction.norm() == 0.0) fail(node, "state.profile.direction", "must be nonzero");
}

void parse_state(const YAML::Node& node, StateConfig& state) {
  check_keys(node, "state", {"well", "u1", "u2", "v", "profile"});
  optional(node, "well", [&](const YAML::Node& n) {
    const int w = scalar<int>(n, "state.well");
    if (w < 1) fail(n, "state.well", "wells are numbered from 1");
    state.well = static_cast<std::size_t>(w - 1);
  });
  optional(node, "u1", [&](const YAML::Node& n) { state.u1 = numbers(n, "state.u1"); });
  optional(node, "u2", [&](const YAML::Node& n) { state.u2 = numbers(n, "state.u2"); });
  optional(node, "v", [&](const YAML::Node& n) { state.v = numbers(n, "state.v"); });
  optional(node, "profile", [&](const YAML::Node& n) {
    state.profile.emplace();
    parse_profile(n, *state.profile);
  });
  if (state.profile && (node["u1"] || node["u2"] || node["v"]))
    fail(node, "state", "give either polynomial displacements or a profile, not both");
}

void parse_minimize(const YAML::Node& node, MinimizeConfig& minimize) {
  check_keys(node, "minimize", {"regime", "tolerance", "max_iterations", "rotation_grid", "profile_degree"});
  optional(node, "regime", [&](const YAML::Node& n) {
    try {
      minimize.regime = limit_regime_from_string(scalar<std::string>(n, "minimize.regime"));
    } catch (const std::invalid_argument& e) {
      fail(n, "minimize.regime", e.what());
    }
  });
  auto& s = minimize.settings;
  optional(node, "tolerance", [&](const YAML::Node& n) { s.tolerance = scalar<double>(n, "minimize.tolerance"); });
  optional(node, "max_iterations",
           [&](const YAML::Node& n) { s.max_iterations = scalar<int>(n, "minimize.max_iterations"); });
  optional(node, "rotation_grid",
           [&](const YAML::Node& n) { s.rotation_grid = scalar<int>(n, "minimize.rotation_grid"); });
  optional(node, "profile_degree",
           [&](const YAML::Node& n) { s.profile_degree = scalar<int>(n, "minimize.profile_degree"); });
  if (s.tolerance <= 0.0) fail(node, "minimize.tolerance", "must be positive");
  if (s.max_iterations < 1) fail(node, "minimize.max_iterations", "must be positive");
  if (s.rotation_grid < 1) fail(node, "minimize.rotation_grid", "must be positive");
  if (s.profile_degree < 2) fail(node, "minimize.profile_degree", "must be at least 2");
}

ExperimentConfig parse_root(const YAML::Node& root, const std::string& source) {
  ExperimentConfig config;
  config.source = source;
  if (!root || root.IsNull()) throw ConfigError(source + ": empty configuration");
  check_keys(root, "config", {"seed", "model", "grid", "regime", "load", "state", "minimize", "output"});
  if (!root["model"]) throw ConfigError(source + ": missing section 'model'");
  parse_model(root["model"], config.model);
  optional(root, "seed", [&](const YAML::Node& n) { config.seed = scalar<std::uint64_t>(n, "seed"); });
  optional(root, "grid", [&](const YAML::Node& n) { parse_grid(n, config.grid); });
  optional(root, "regime", [&](const YAML::Node& n) { parse_regime(n, config.regime); });
  optional(root, "load", [&](const YAML::Node& n) { parse_load(n, config.load); });
  optional(root, "state", [&](const YAML::Node& n) { parse_state(n, config.state); });
  optional(root, "minimize", [&](const YAML::Node& n) { parse_minimize(n, config.minimize); });
  optional(root, "output", [&](const YAML::Node& n) { config.output = scalar<std::string>(n, "output"); });

  if (config.state.well >= config.model.wells.size()) {
    fail(root["state"]["well"], "state.well",
         "well " + std::to_string(config.state.well + 1) + " does not exist (" +
             std::to_string(config.model.wells.size()) + " wells)");
  }
  // Cross-field checks against the model as the library would build it.
  const auto model = build_model(config);
  for (const auto& [i, j] : model->overlapping_wells()) {
    fail(root["model"]["wells"], "model.wells",
         "wells " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " describe the same orbit");
  }
  if (model->q() < 2.0 && model->p() <= 1.2) fail(root["model"], "model.p", "p must exceed 6/5 when q < 2");
  return config;
}

}  // namespace

ExperimentConfig parse_config_string(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return parse_root(root, source);
}

ExperimentConfig parse_config_file(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw ConfigError(path + ": cannot open file");
  } catch (const YAML::Exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  ExperimentConfig config = parse_root(root, path);
  const auto base = std::filesystem::path(path).parent_path();
  if (config.load.samples && std::filesystem::path(*config.load.samples).is_relative())
    config.load.samples = (base / *config.load.samples).string();
  return config;
}

std::shared_ptr<const MultiWellModel> build_model(const ExperimentConfig& config) {
  std::vector<Well> wells;
  for (const auto& U : config.model.wells) wells.emplace_back(U);
  return std::make_shared<const MultiWellModel>(std::move(wells), config.model.density, config.model.q,
                                                config.model.p, config.model.well_scale);
}

GridPtr build_grid(const ExperimentConfig& config) {
  const auto& g = config.grid;
  return std::make_shared<const MidplaneGrid>(g.lower, g.upper, g.n1, g.n2);
}

LoadField build_load(const ExperimentConfig& config, GridPtr grid) {
  if (config.load.samples) {
    Field<Vec3> f;
    try {
      f = read_vector_csv(*config.load.samples, *grid);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("load.samples: ") + e.what());
    }
    return LoadField(grid, f).scaled(config.load.scale);
  }
  std::array<Polynomial2, 3> f;
  for (int i = 0; i < 3; ++i) f[i] = Polynomial2::graded(config.load.coefficients[i]).scaled(config.load.scale);
  return LoadField::from_polynomials(grid, f);
}

PlateState build_state(const ExperimentConfig& config, GridPtr grid, const MultiWellModel& model) {
  const auto& s = config.state;
  if (s.profile) {
    const auto& p = *s.profile;
    const Profile g = p.kind == Profile::Kind::cosine ? Profile::cosine(p.radius, p.amplitude)
                                                      : Profile::polynomial(p.coefficients, p.amplitude);
    const auto lift = isometry_lift_profile(g, p.direction, model.well(s.well), *grid);
    if (regime_for_alpha(config.regime.alpha) == Regime::kirchhoff)
      return PlateState::kirchhoff(grid, s.well, lift.deformation());
    return PlateState::from_profile(grid, s.well, lift);
  }
  return PlateState::from_polynomials(grid, s.well, Polynomial2::graded(s.u1), Polynomial2::graded(s.u2),
                                      Polynomial2::graded(s.v));
}

}  // namespace mwplate::cli
