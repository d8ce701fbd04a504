// Command-line front end: combination coefficients, truncation sets,
// sparse quadrature, multilevel Monte Carlo, convergence studies and the
// exponential-sum checks.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "smolyak/json_io.hpp"
#include "smolyak/smolyak.hpp"

namespace {

using nlohmann::json;
using namespace smolyak;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

// One subcommand's settings: each is reachable as --key on the command line
// and as "key" in the JSON config file; the command line wins.
class Settings {
 public:
  explicit Settings(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& key, T& target, const std::string& help) {
    auto* opt = app_->add_option("--" + key, target, help);
    if constexpr (!std::is_same_v<T, std::string> && !std::is_arithmetic_v<T>) opt->delimiter(',');
    if constexpr (std::is_arithmetic_v<T> || std::is_same_v<T, std::string>) opt->capture_default_str();
    bindings_[key] = {opt, [&target](const json& j) { target = j.get<T>(); }};
    return opt;
  }

  // Global flags are also accepted as config keys.
  template <class T>
  void bind(const std::string& key, CLI::Option* opt, T& target) {
    bindings_[key] = {opt, [&target](const json& j) { target = j.get<T>(); }};
  }

  void apply_file(const std::string& path, std::vector<std::string>& violations) const {
    std::ifstream in(path);
    if (!in) {
      violations.push_back("config: cannot open '" + path + "'");
      return;
    }
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      violations.push_back(std::string("config: invalid JSON: ") + e.what());
      return;
    }
    if (!j.is_object()) {
      violations.push_back("config: top level must be an object");
      return;
    }
    for (const auto& [key, value] : j.items()) {
      if (key == "subcommand") {
        if (!value.is_string() || value.get<std::string>() != app_->get_name())
          violations.push_back("config: key 'subcommand' does not match '" + app_->get_name() + "'");
        continue;
      }
      auto it = bindings_.find(key);
      if (it == bindings_.end()) {
        violations.push_back("config: unknown key '" + key + "'");
        continue;
      }
      if (it->second.option->count() > 0) continue;
      try {
        it->second.assign(value);
      } catch (const json::exception&) {
        violations.push_back("config: key '" + key + "' has the wrong type");
      }
    }
  }

 private:
  struct Binding {
    CLI::Option* option;
    std::function<void(const json&)> assign;
  };
  CLI::App* app_;
  std::map<std::string, Binding> bindings_;
};

void require(bool ok, const std::string& message, std::vector<std::string>& violations) {
  if (!ok) violations.push_back(message);
}

// Writes to `path`, or stdout when empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

std::string csv_header() { return "# schema_version: " + std::to_string(json_io::kSchemaVersion) + "\n"; }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Shared model parameters for truncate, study and appendix-check.
struct ModelArgs {
  std::string preset;
  std::vector<double> c, w, gc, gw;

  void add_to(Settings& s) {
    s.add("preset", preset, "Named reference model: symmetric-d2, poly-d2, distinct-d3");
    s.add("c", c, "Decay rates c_j (comma separated)");
    s.add("w", w, "Work rates w_j (comma separated)");
    s.add("gc", gc, "Decay polynomial degrees (default 0)");
    s.add("gw", gw, "Work polynomial degrees (default 0)");
  }

  void validate(std::vector<std::string>& v) const {
    if (!preset.empty()) {
      require(reference_models().contains(preset), "unknown preset '" + preset + "'", v);
      require(c.empty() && w.empty() && gc.empty() && gw.empty(), "--preset excludes --c/--w/--gc/--gw", v);
      return;
    }
    require(!c.empty(), "--c is required without --preset", v);
    require(c.size() == w.size(), "--c and --w need the same length", v);
    require(gc.empty() || gc.size() == c.size(), "--gc length must match --c", v);
    require(gw.empty() || gw.size() == c.size(), "--gw length must match --c", v);
    for (double x : c) require(x > 0, "--c entries must be positive", v);
    for (double x : w) require(x > 0, "--w entries must be positive", v);
    for (double x : gc) require(x >= 0, "--gc entries must be nonnegative", v);
    for (double x : gw) require(x >= 0, "--gw entries must be nonnegative", v);
  }

  ExpPolyModel model() const {
    if (!preset.empty()) return reference_models().at(preset);
    return ExpPolyModel::from_rates(c, w, gc, gw);
  }
};

/// Reports a model whose decay is not strictly decreasing from level 0.
void require_profit_model(const ModelArgs& m, std::vector<std::string>& v) {
  try {
    (void)m.model().profit_model();
  } catch (const InvalidArgument& e) {
    v.push_back(std::string(e.what()) + " (polynomial factors must not outweigh the exponential decay)");
  }
}

void require_increasing(const std::vector<double>& xs, const std::string& name, std::vector<std::string>& v) {
  require(!xs.empty(), name + " must not be empty", v);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    require(xs[k] >= 0, name + " entries must be nonnegative", v);
    if (k > 0) require(xs[k] > xs[k - 1], name + " must be increasing", v);
  }
}

json set_json(const IndexSet& s) { return json_io::to_json(s); }

struct Command {
  std::unique_ptr<Settings> settings;
  std::function<void(std::vector<std::string>&)> validate;
  std::function<void()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smolyak's algorithm: combination coefficients, truncation, sparse quadrature and multilevel Monte Carlo"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::size_t threads = 1;
  std::string out_path;
  app.add_option("--config", config_path, "JSON config file; keys are the subcommand's flag names");
  auto* threads_opt =
      app.add_option("--threads", threads, "Worker threads; results do not depend on it")->capture_default_str();
  auto* out_opt = app.add_option("--out", out_path, "Primary output file (default stdout)");

  std::map<std::string, Command> commands;

  // coeffs
  std::size_t co_d = 2;
  unsigned co_L = 2;
  std::string co_set, co_formula = "general";
  {
    auto* sub = app.add_subcommand("coeffs", "Combination-rule coefficients as a JSON plan");
    auto& c = commands["coeffs"];
    c.settings = std::make_unique<Settings>(sub);
    c.settings->add("d", co_d, "Dimension of the simplex");
    c.settings->add("L", co_L, "Level of the simplex {|i|_1 <= L}");
    c.settings->add("set", co_set, "JSON file with a downward-closed index set (replaces the simplex)");
    c.settings->add("formula", co_formula, "general | simplex (closed binomial form)");
    c.validate = [&](std::vector<std::string>& v) {
      require(co_d >= 1, "--d must be at least 1", v);
      require(co_formula == "general" || co_formula == "simplex", "--formula must be general or simplex", v);
      require(co_set.empty() || co_formula == "general", "--set requires --formula general", v);
    };
    c.run = [&] {
      CombinationPlan plan;
      if (!co_set.empty()) {
        std::ifstream in(co_set);
        if (!in) throw InvalidArgument("cannot open set file '" + co_set + "'");
        plan = combination_coefficients(json_io::index_set_from_json(json::parse(in)));
      } else {
        plan = co_formula == "simplex" ? simplex_coefficients(co_d, co_L)
                                       : combination_coefficients(simplex_set(co_d, co_L));
      }
      emit(out_path, dump(json_io::to_json(plan)));
    };
  }

  // truncate
  ModelArgs tr_model;
  double tr_W = 0.0;
  std::vector<unsigned> tr_box;
  {
    auto* sub = app.add_subcommand("truncate", "Dantzig threshold set for an exponential decay/work model");
    auto& c = commands["truncate"];
    c.settings = std::make_unique<Settings>(sub);
    tr_model.add_to(*c.settings);
    c.settings->add("W", tr_W, "Work budget");
    c.settings->add("exact-box", tr_box, "Also solve the knapsack exactly on this box (at most 16 cells)");
    c.validate = [&](std::vector<std::string>& v) {
      tr_model.validate(v);
      if (v.empty()) require_profit_model(tr_model, v);
      require(tr_W > 0, "--W must be positive", v);
    };
    c.run = [&] {
      const auto profit = tr_model.model().profit_model();
      const auto r = dantzig_set(profit, tr_W);
      json out = {{"schema_version", json_io::kSchemaVersion},
                  {"set", set_json(r.set)},
                  {"threshold", r.threshold},
                  {"contribution", r.contribution},
                  {"work", r.work}};
      if (!tr_box.empty()) {
        const auto exact = knapsack_exact(profit, tr_W, tr_box);
        out["exact"] = {{"set", set_json(exact.set)}, {"optimum", exact.optimum}, {"work", exact.work}};
        out["guarantee_holds"] = r.contribution >= (r.work / tr_W) * exact.optimum - 1e-12;
      }
      emit(out_path, dump(out));
    };
  }

  // quad
  std::size_t qu_d = 2;
  std::string qu_integrand = "exp-sum", qu_family = "simplex", qu_grid;
  std::vector<double> qu_levels = {0, 1, 2, 3, 4};
  {
    auto* sub = app.add_subcommand("quad", "Sparse-grid quadrature convergence on [0,1]^d");
    auto& c = commands["quad"];
    c.settings = std::make_unique<Settings>(sub);
    c.settings->add("d", qu_d, "Dimension");
    c.settings->add("integrand", qu_integrand, "exp-sum | runge-product | polynomial");
    c.settings->add("family", qu_family, "simplex | dantzig | hyperbolic-cross");
    c.settings->add("levels", qu_levels, "Levels L (simplex, hyperbolic-cross) or budgets W (dantzig)");
    c.settings->add("grid-json", qu_grid, "Write the merged sparse grid of the last set to this file");
    c.validate = [&](std::vector<std::string>& v) {
      require(qu_d >= 1 && qu_d <= 10, "--d must be in 1..10", v);
      require(std::find(integrand_ids().begin(), integrand_ids().end(), qu_integrand) != integrand_ids().end(),
              "unknown integrand '" + qu_integrand + "'", v);
      require(qu_family == "simplex" || qu_family == "dantzig" || qu_family == "hyperbolic-cross",
              "--family must be simplex, dantzig or hyperbolic-cross", v);
      require_increasing(qu_levels, "--levels", v);
    };
    c.run = [&] {
      const auto integrand = make_integrand(qu_integrand, qu_d);
      // Trapezoid model for the dantzig family: decay 4^-i, cost 2^i + 1.
      std::vector<ProfitModel::Function> g(qu_d, [](MultiIndex::value_type i) { return std::ldexp(1.0, -2 * int(i)); });
      std::vector<ProfitModel::Function> wk(qu_d, [](MultiIndex::value_type i) { return std::ldexp(1.0, int(i)) + 1; });
      const ProfitModel trapezoid_model(g, wk);
      const std::vector<double> ones(qu_d, 1.0), zeros(qu_d, 0.0);
      std::ostringstream csv;
      csv << csv_header();
      csv.precision(17);
      csv << "set_size,work,error,L\n";
      IndexSet last;
      for (double level : qu_levels) {
        IndexSet set;
        if (qu_family == "simplex")
          set = weighted_level_set(ones, level);
        else if (qu_family == "hyperbolic-cross")
          set = hyperbolic_cross_set(ones, zeros, level);
        else
          set = dantzig_set(trapezoid_model, level).set;
        const auto r = sparse_quadrature(integrand.f, qu_d, set, EngineOptions{threads});
        csv << set.size() << ',' << r.total_work << ',' << std::abs(r.value - integrand.exact) << ',' << level
            << '\n';
        last = set;
      }
      if (!qu_grid.empty()) {
        const auto grid = sparse_grid_nodes(last);
        json nodes = json::array();
        for (const auto& n : grid.nodes) nodes.push_back({{"point", n.point}, {"weight", n.weight}});
        emit(qu_grid, dump({{"schema_version", json_io::kSchemaVersion},
                            {"union_size", grid.union_size},
                            {"nodes", nodes}}));
      }
      emit(out_path, csv.str());
    };
  }

  // mlmc
  double ml_a = 0.05, ml_b = 0.2, ml_s0 = 1.0, ml_T = 1.0;
  std::uint64_t ml_M0 = 100, ml_N0 = 1, ml_seed = 1;
  unsigned ml_L = 4, ml_R = 0;
  std::string ml_csv;
  {
    auto* sub = app.add_subcommand("mlmc", "Multilevel Monte Carlo for geometric Brownian motion");
    auto& c = commands["mlmc"];
    c.settings = std::make_unique<Settings>(sub);
    c.settings->add("a", ml_a, "Drift rate a in dS = a S dt + b S dW");
    c.settings->add("b", ml_b, "Volatility b");
    c.settings->add("s0", ml_s0, "Initial value S(0)");
    c.settings->add("T", ml_T, "Horizon");
    c.settings->add("M0", ml_M0, "Base sample count, M_k = ceil(M0 exp(2k/3))");
    c.settings->add("N0", ml_N0, "Base step count, N_l = ceil(N0 exp(2l/3))");
    c.settings->add("L", ml_L, "Triangle level {k + l <= L}");
    c.settings->add("seed", ml_seed, "Master seed");
    c.settings->add("replications", ml_R, "If positive, run the RMSE/work study for L = 0..L");
    c.settings->add("study-csv", ml_csv, "File for the study CSV (required with --replications)");
    c.validate = [&](std::vector<std::string>& v) {
      require(ml_T > 0, "--T must be positive", v);
      require(ml_M0 >= 1, "--M0 must be at least 1", v);
      require(ml_N0 >= 1, "--N0 must be at least 1", v);
      require(ml_L <= 12, "--L must be at most 12", v);
      require(ml_R == 0 || !ml_csv.empty(), "--replications needs --study-csv", v);
      require(ml_R == 0 || ml_R >= 10, "--replications must be 0 or at least 10", v);
    };
    c.run = [&] {
      const auto problem = gbm(ml_a, ml_b, ml_s0, ml_T);
      MlmcParams params{ml_M0, ml_N0, ml_seed};
      const auto est = smolyak_triangle_estimate(problem, params, ml_L, threads);
      const double tele = multilevel_telescoping_estimate(problem, params, ml_L, threads);
      emit(out_path, dump({{"schema_version", json_io::kSchemaVersion},
                           {"L", ml_L},
                           {"seed", ml_seed},
                           {"estimate", est.value},
                           {"telescoping_estimate", tele},
                           {"work", est.total_work},
                           {"reference", *problem.reference_value}}));
      if (ml_R > 0) {
        std::vector<unsigned> levels;
        for (unsigned l = 0; l <= ml_L; ++l) levels.push_back(l);
        const auto rows = mse_work_study(problem, params, levels, ml_R, threads);
        std::ostringstream csv;
        csv << csv_header();
        write_mse_csv(csv, rows);
        emit(ml_csv, csv.str());
      }
    };
  }

  // study
  ModelArgs st_model;
  std::vector<double> st_levels = {0, 1, 2, 3, 4, 5, 6};
  {
    auto* sub = app.add_subcommand("study", "Convergence study of a product-decay evaluator on level sets");
    auto& c = commands["study"];
    c.settings = std::make_unique<Settings>(sub);
    st_model.add_to(*c.settings);
    c.settings->add("levels", st_levels, "Levels L of the sets {(c+w).i <= L}");
    c.validate = [&](std::vector<std::string>& v) {
      st_model.validate(v);
      if (v.empty()) require_profit_model(st_model, v);
      require_increasing(st_levels, "--levels", v);
    };
    c.run = [&] {
      const auto model = st_model.model();
      ProductDecayEvaluator eval(model.profit_model());
      EvaluationCache cache(eval);
      std::vector<IndexSet> sets;
      for (double L : st_levels) sets.push_back(level_set_for_model(model, L));
      const auto rows = convergence_study(cache, std::span<const IndexSet>(sets),
                                          std::optional<double>(decay_series_limit(model)),
                                          std::span<const double>(st_levels), EngineOptions{threads});
      std::ostringstream csv;
      csv << csv_header();
      write_study_csv(csv, rows);
      emit(out_path, csv.str());
    };
  }

  // appendix-check
  ModelArgs ap_model;
  std::vector<double> ap_levels = {5, 10, 20, 40};
  double ap_tol = 1e-9;
  {
    auto* sub = app.add_subcommand("appendix-check", "Exponential-sum bound ratios over a range of levels");
    auto& c = commands["appendix-check"];
    c.settings = std::make_unique<Settings>(sub);
    ap_model.add_to(*c.settings);
    c.settings->add("Ls", ap_levels, "Levels L");
    c.settings->add("tol", ap_tol, "Residual accuracy relative to its bound shape");
    c.validate = [&](std::vector<std::string>& v) {
      ap_model.validate(v);
      require_increasing(ap_levels, "--Ls", v);
      require(ap_tol > 0, "--tol must be positive", v);
    };
    c.run = [&] {
      const auto rows = lemma_ratio_scan(ap_model.model(), ap_levels, ap_tol);
      std::ostringstream csv;
      csv << csv_header();
      write_ratio_csv(csv, rows);
      emit(out_path, csv.str());
    };
  }

  auto fail = [](int code, const std::string& kind, const json& detail) {
    json err = {{"schema_version", json_io::kSchemaVersion}, {"error", kind}};
    err.update(detail);
    std::cerr << err.dump() << '\n';
    return code;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kExitConfig, "config", {{"violations", json::array({e.what()})}});
  }

  const std::string name = app.get_subcommands().front()->get_name();
  auto& cmd = commands.at(name);
  std::vector<std::string> violations;
  cmd.settings->bind("threads", threads_opt, threads);
  cmd.settings->bind("out", out_opt, out_path);
  if (!config_path.empty()) cmd.settings->apply_file(config_path, violations);
  require(threads >= 1, "--threads must be at least 1", violations);
  cmd.validate(violations);
  if (!violations.empty()) return fail(kExitConfig, "config", {{"violations", violations}});

  try {
    cmd.run();
  } catch (const EvaluationError& e) {
    return fail(kExitRuntime, "evaluation",
                {{"message", e.what()}, {"index", e.index().to_string()}, {"work_spent", e.work_spent()}});
  } catch (const std::exception& e) {
    return fail(kExitRuntime, "runtime", {{"message", e.what()}});
  }
  return 0;
}
