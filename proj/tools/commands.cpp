#include "commands.hpp"

#include "mwplate/sampling.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace mwplate::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json matrix_rows(const Eigen::MatrixXd& A) {
  json rows = json::array();
  for (int i = 0; i < A.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < A.cols(); ++k) row.push_back(A(i, k));
    rows.push_back(row);
  }
  return rows;
}

json row_major(const Mat3& A) {
  json out = json::array();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) out.push_back(A(i, k));
  return out;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::string output_path(const ExperimentConfig& config, const std::string& name) {
  fs::create_directories(config.output);
  return (fs::path(config.output) / name).string();
}

void write_json(const ExperimentConfig& config, const std::string& name, const json& summary) {
  write_atomic(output_path(config, name), summary.dump(2) + "\n");
}

double limit_value(const PlateState& state, const RelaxedForm& form, Regime regime) {
  switch (regime) {
    case Regime::kirchhoff: return energy_kl(state, form);
    case Regime::cvk: return energy_cvk(state, form);
    case Regime::vk: return energy_vk(state, form);
    case Regime::lvk: return energy_lvk(state, form);
  }
  throw std::logic_error("limit_value: unreachable");
}

std::string state_csv(const PlateState& state) {
  std::ostringstream out;
  const MidplaneGrid& g = state.grid();
  if (!state.has_displacements()) {
    out << std::setprecision(17) << "x1,x2,y1,y2,y3\n";
    for (int k = 0; k < g.size(); ++k) {
      const Vec2 x = g.point(k);
      const Vec3& y = state.deformation().y[k];
      out << x(0) << "," << x(1) << "," << y(0) << "," << y(1) << "," << y(2) << "\n";
    }
    return out.str();
  }
  out << std::setprecision(17) << "x1,x2,u1,u2,v\n";
  for (int k = 0; k < g.size(); ++k) {
    const Vec2 x = g.point(k);
    out << x(0) << "," << x(1) << "," << state.u()[k](0) << "," << state.u()[k](1) << "," << state.v()[k] << "\n";
  }
  return out.str();
}

std::string trace_csv(const std::vector<TraceEntry>& trace) {
  std::ostringstream out;
  out << std::setprecision(17) << "iteration,value,gradient_norm\n";
  for (const auto& t : trace) out << t.iteration << "," << t.value << "," << t.gradient_norm << "\n";
  return out.str();
}

json cell_json(const CellResult& c) {
  return {{"well", c.well + 1}, {"cell", c.grid_index}, {"theta", vector_json(c.theta)},
          {"rotation", row_major(c.R)}, {"value", c.value}};
}

}  // namespace

void write_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp + "' for writing");
    out << text;
    if (!out.flush()) throw std::runtime_error("write to '" + tmp + "' failed");
  }
  fs::rename(tmp, path);
}

json cmd_qbar(const ExperimentConfig& config) {
  const auto model = build_model(config);
  const HypothesisReport hyp = check_hypotheses(*model, config.seed);
  json wells = json::array();
  for (std::size_t j = 0; j < model->size(); ++j) {
    const RelaxedForm form = relaxed_form(*model, j);
    wells.push_back({{"well", j + 1},
                     {"qbar", matrix_rows(form.coefficients())},
                     {"l_matrix", matrix_rows(form.l_matrix())},
                     {"coercivity", hyp.wells[j].coercivity},
                     {"symmetry_residual", hyp.wells[j].symmetry_residual}});
  }
  json summary = {{"coordinates", "d = (D11, D22, sqrt(2) D12); Qbar(D) = d^T qbar d, L(D) = l_matrix d"},
                  {"density", to_string(model->kind())},
                  {"wells", wells},
                  {"hypotheses",
                   {{"frame_indifference_residual", hyp.frame_indifference_residual},
                    {"frame_indifference_ok", hyp.frame_indifference_ok},
                    {"lower_bound_constant", hyp.lower_bound_constant},
                    {"lower_bound_ok", hyp.lower_bound_ok},
                    {"disjoint_ok", hyp.disjoint_ok},
                    {"penalty_exponent_ok", hyp.penalty_exponent_ok},
                    {"all_ok", hyp.all_ok()}}}};
  write_json(config, "qbar.json", summary);
  return summary;
}

json cmd_converge(const ExperimentConfig& config) {
  const auto model = build_model(config);
  const GridPtr grid = build_grid(config);
  const PlateState state = build_state(config, grid, *model);
  const RelaxedForm form = relaxed_form(*model, config.state.well);
  const double alpha = config.regime.alpha;
  const Regime regime = regime_for_alpha(alpha);
  const double limit = config.regime.limit ? *config.regime.limit : limit_value(state, form, regime);
  const RecoveryFamily family = build_recovery(state, form, regime, alpha);
  const ConvergenceReport report = convergence_report(*model, family, config.regime.h_list, limit, config.regime.n3,
                                                      config.regime.gap_tolerance);

  const std::string csv = output_path(config, "convergence.csv");
  report.write_csv(csv + ".tmp");
  fs::rename(csv + ".tmp", csv);

  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"h", r.h},
                    {"elastic", r.elastic},
                    {"penalty", r.penalty},
                    {"gap", r.gap},
                    {"share", r.share},
                    {"order", r.order ? json(*r.order) : json(nullptr)}});
  }
  const auto& s = report.schedule;
  json summary = {{"regime", to_string(regime)},
                  {"alpha", alpha},
                  {"well", config.state.well + 1},
                  {"limit", limit},
                  {"rows", rows},
                  {"fitted_order", report.fitted_order ? json(*report.fitted_order) : json(nullptr)},
                  {"gaps_decreasing", report.gaps_decreasing},
                  {"share_decreasing", report.share_decreasing},
                  {"final_share", report.final_share},
                  {"final_relative_gap", report.final_relative_gap},
                  {"gap_tolerance", report.gap_tolerance},
                  {"schedule",
                   {{"s", s.s}, {"s_min", s.s_min}, {"s_max", s.s_max}, {"p", s.p}, {"requested_p", s.requested_p},
                    {"p_raised", s.p_raised}}},
                  {"pass", report.pass}};
  write_json(config, "convergence.json", summary);
  return summary;
}

json cmd_rotations(const ExperimentConfig& config) {
  const auto model = build_model(config);
  const GridPtr grid = build_grid(config);
  const LoadField load = build_load(config, grid);
  const WellMaximization wm = maximize_over_wells(load, model->wells());
  Rng rng(config.seed);
  json wells = json::array();
  for (const auto& set : wm.sets) {
    json tangent = json::array();
    for (int i = 0; i < set.tangent.cols(); ++i) tangent.push_back(vector_json(set.tangent.col(i)));
    wells.push_back({{"well", set.well + 1},
                     {"value", set.value},
                     {"sampled_value", sampled_procrustes_max(set.moment, 100000, rng)},
                     {"dimension", set.dimension},
                     {"representative", row_major(set.representative)},
                     {"determinant", set.representative.determinant()},
                     {"tangent", tangent},
                     {"first_order_residual", set.first_order_residual()},
                     {"second_order_max", set.second_order_max()}});
  }
  json lambda = json::array();
  for (std::size_t j : wm.lambda) lambda.push_back(j + 1);
  const Vec3 res = load.resultant();
  json summary = {{"wells", wells},
                  {"lambda", lambda},
                  {"best", wm.best},
                  {"moments", matrix_rows(load_moments(load))},
                  {"resultant", {res(0), res(1), res(2)}},
                  {"mean_zero", load.mean_zero()}};
  write_json(config, "rotations.json", summary);
  return summary;
}

json cmd_minimize(const ExperimentConfig& config) {
  const auto model = build_model(config);
  const GridPtr grid = build_grid(config);
  const LoadField load = build_load(config, grid);
  const MinimizationProblem problem = make_problem(config.minimize.regime, model, load, config.minimize.settings);
  MinimizationResult result;
  try {
    result = minimize_regime(problem);
  } catch (const MinimizationError& e) {
    write_atomic(output_path(config, "trace.csv"), trace_csv(e.trace()));
    throw;
  }
  write_atomic(output_path(config, "trace.csv"), trace_csv(result.trace));
  write_atomic(output_path(config, "state.csv"), state_csv(result.state));

  json lambda = json::array();
  for (std::size_t j : problem.lambda) lambda.push_back(j + 1);
  json cells = json::array(), near = json::array();
  for (const auto& c : result.cells) cells.push_back(cell_json(c));
  for (const auto& c : result.near_optimal) near.push_back(cell_json(c));
  double u_max = 0.0, v_max = 0.0;
  for (int k = 0; k < grid->size() && result.state.has_displacements(); ++k) {
    u_max = std::max(u_max, result.state.u()[k].norm());
    v_max = std::max(v_max, std::abs(result.state.v()[k]));
  }
  json summary = {{"regime", to_string(problem.regime)},
                  {"lambda", lambda},
                  {"well", result.well + 1},
                  {"rotation", row_major(result.R)},
                  {"value", result.value},
                  {"iterations", result.trace.empty() ? 0 : result.trace.back().iteration},
                  {"max_abs_u", result.state.has_displacements() ? json(u_max) : json(nullptr)},
                  {"max_abs_v", result.state.has_displacements() ? json(v_max) : json(nullptr)},
                  {"unique", result.near_optimal.size() == 1},
                  {"near_optimal", near},
                  {"cells", cells}};
  if (!result.profile_parameters.empty()) summary["profile_parameters"] = result.profile_parameters;
  write_json(config, "minimize.json", summary);
  return summary;
}

json cmd_functionals(const ExperimentConfig& config) {
  const auto model = build_model(config);
  const GridPtr grid = build_grid(config);
  const PlateState state = build_state(config, grid, *model);
  const RelaxedForm form = relaxed_form(*model, config.state.well);
  const json grid_json = {{"lower", {config.grid.lower(0), config.grid.lower(1)}},
                          {"upper", {config.grid.upper(0), config.grid.upper(1)}},
                          {"nodes", {config.grid.n1, config.grid.n2}}};
  json records = json::array();
  auto record = [&](const std::string& name, const json& value) {
    records.push_back({{"functional", name}, {"well", config.state.well + 1}, {"value", value}, {"grid", grid_json}});
  };
  json summary;
  if (state.has_deformation()) {
    record("kirchhoff", energy_kl(state, form));
  } else {
    const double residual = constraint_residual(state, form.well());
    record("bending", bending_energy(state, form));
    record("membrane_linear", membrane_energy(state, form, false));
    record("membrane_nonlinear", membrane_energy(state, form, true));
    record("lvk", energy_lvk(state, form));
    record("vk", energy_vk(state, form));
    record("cvk", residual < 1e-6 ? json(energy_cvk(state, form)) : json(nullptr));
    record("force_work", force_work(state, build_load(config, grid), Mat3::Identity(), form.well()));
    summary["constraint_residual"] = residual;
  }
  summary["records"] = records;
  write_json(config, "functionals.json", summary);
  return summary;
}

int run_command(const std::string& name, const std::string& config_path, const std::string& output_override) {
  try {
    ExperimentConfig config = parse_config_file(config_path);
    if (!output_override.empty()) config.output = output_override;
    json summary;
    if (name == "qbar") {
      summary = cmd_qbar(config);
    } else if (name == "converge") {
      summary = cmd_converge(config);
    } else if (name == "rotations") {
      summary = cmd_rotations(config);
    } else if (name == "minimize") {
      summary = cmd_minimize(config);
    } else if (name == "functionals") {
      summary = cmd_functionals(config);
    } else {
      std::cerr << "unknown command '" << name << "'\n";
      return 2;
    }
    std::cout << summary.dump(2) << "\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace mwplate::cli
