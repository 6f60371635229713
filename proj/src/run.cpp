#include "qig/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "qig/channels.hpp"
#include "qig/connections.hpp"
#include "qig/duality.hpp"
#include "qig/manifold.hpp"
#include "qig/metrics.hpp"
#include "qig/parallel.hpp"
#include "qig/sampling.hpp"

namespace qig {

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> commands{"bkm-equivalence", "duality-scan", "monotonicity",
                                                 "flatness",        "legendre",     "all"};
  return commands;
}

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> table{
      {"bkm_relative", 1e-8},     // pairwise relative gap of the three BKM forms
      {"duality_pass", 1e-6},     // duality residual bar for BKM multiples
      {"duality_reject", 1e-2},   // residual every other metric must exceed
      {"affine_constancy", 1e-8}, // constancy score and off-diagonal bar for BKM multiples
      {"affine_reject", 1e-2},    // constancy score every other metric must exceed
      {"christoffel", 1e-8},      // Gamma in a connection's own affine chart
      {"curvature", 1e-4},        // FD curvature in the foreign chart
      {"legendre", 1e-8},         // psi + phi - theta.eta
      {"gradient", 1e-6},         // eta vs FD gradient of psi
      {"hessian_dim2", 1e-5},     // FD Hessian of psi vs BKM metric, N = 2
      {"hessian", 1e-4},          // same, N >= 3
      {"monotone_slack", 1e-9},   // allowed increase for monotone f
      {"violation_bar", 1e-3},    // violation required of the negative control
  };
  return table;
}

void RunConfig::validate() const {
  const auto& cmds = known_commands();
  if (std::find(cmds.begin(), cmds.end(), command) == cmds.end()) {
    throw UsageError("unknown command \"" + command + "\"");
  }
  if (dim < 2) throw UsageError("--dim must be at least 2");
  if (samples < 1) throw UsageError("--samples must be at least 1");
  if (trials < 1) throw UsageError("--trials must be at least 1");
  for (const auto& [key, value] : tolerance_overrides) {
    if (!default_tolerances().count(key)) throw UsageError("unknown tolerance key \"" + key + "\"");
    if (!(value >= 0.0) || !std::isfinite(value)) throw UsageError("tolerance \"" + key + "\" must be finite and >= 0");
  }
  for (const auto& name : functions) {
    try {
      (void)find_function(name);
    } catch (const InvalidParameter& e) {
      throw UsageError(e.what());
    }
  }
}

bool ExperimentReport::pass() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
}

nlohmann::json ExperimentReport::body() const {
  nlohmann::json checks_json = nlohmann::json::array();
  for (const auto& c : checks) {
    checks_json.push_back(
        {{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"relation", c.relation}, {"pass", c.pass}});
  }
  nlohmann::json tolerances_json = nlohmann::json::object();
  for (const auto& [k, v] : tolerances) tolerances_json[k] = v;
  nlohmann::json config_json{{"dim", config.dim},
                             {"samples", config.samples},
                             {"trials", config.trials},
                             {"seed", config.seed},
                             {"f", config.functions},
                             {"csv", config.csv}};
  return {{"schema", kReportSchema},
          {"version", kVersion},
          {"command", config.command},
          {"config", std::move(config_json)},
          {"tolerances", std::move(tolerances_json)},
          {"checks", std::move(checks_json)},
          {"details", details},
          {"verdict", pass() ? "pass" : "fail"}};
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json j = body();
  j["wall_clock_seconds"] = wall_clock_seconds;
  return j;
}

std::string ExperimentReport::csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "kind,label,index,value\n";
  for (const auto& row : csv_rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
    os << '\n';
  }
  return os.str();
}

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

class Session {
 public:
  explicit Session(ExperimentReport& report) : report_(report) {}

  double tol(const std::string& key) const { return report_.tolerances.at(key); }

  void check(std::string name, double value, double bound, const std::string& relation) {
    bool pass = false;
    if (relation == "<") pass = value < bound;
    else if (relation == "<=") pass = value <= bound;
    else if (relation == ">") pass = value > bound;
    // NaN never passes
    report_.checks.push_back({std::move(name), value, bound, relation, pass && !std::isnan(value)});
  }

  void witness(const std::string& kind, const std::string& label, std::size_t index, double value) {
    report_.csv_rows.push_back({kind, label, std::to_string(index), format_double(value)});
  }

  nlohmann::json& details(const std::string& key) { return report_.details[key]; }
  const RunConfig& config() const { return report_.config; }

 private:
  ExperimentReport& report_;
};

std::vector<OperatorMonotoneFunction> selected(const RunConfig& config,
                                               const std::vector<std::string>& fallback) {
  const auto& names = config.functions.empty() ? fallback : config.functions;
  std::vector<OperatorMonotoneFunction> out;
  for (const auto& n : names) {
    try {
      out.push_back(find_function(n));
    } catch (const InvalidParameter& e) {
      throw UsageError(e.what());
    }
  }
  return out;
}

// A scaled BKM metric, i.e. the family members that must pass duality.
bool is_bkm_multiple(const OperatorMonotoneFunction& f) {
  const std::string& n = f.name;
  return n == "bkm" || (n.size() > 4 && n.compare(n.size() - 4, 4, "*bkm") == 0);
}

void bkm_equivalence(Session& s) {
  const RunConfig& c = s.config();
  const auto samples = static_cast<std::size_t>(c.samples);
  std::vector<double> deviation(samples, 0.0);
  parallel_for(samples, [&](std::size_t t) {
    Rng rng(c.seed ^ static_cast<std::uint64_t>(t));
    const DensityMatrix rho = random_state(c.dim, rng);
    const TangentVector a = random_tangent(rho, Rep::minus, rng);
    const TangentVector b = random_tangent(rho, Rep::plus, rng);
    const double v[3] = {bkm_metric(a, b, BkmMethod::trace_pairing),
                         bkm_metric(a, b, BkmMethod::lambda_integral),
                         bkm_metric(a, b, BkmMethod::resolvent_integral)};
    const double scale = std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
    double worst = 0.0;
    for (int x = 0; x < 3; ++x) {
      for (int y = x + 1; y < 3; ++y) worst = std::max(worst, std::abs(v[x] - v[y]) / scale);
    }
    deviation[t] = worst;
  });
  const auto worst = std::max_element(deviation.begin(), deviation.end());
  const auto idx = static_cast<std::size_t>(worst - deviation.begin());
  s.witness("bkm-equivalence", "max_relative_deviation", idx, *worst);
  s.details("bkm_equivalence") = {{"dim", c.dim},
                                  {"samples", c.samples},
                                  {"max_relative_deviation", *worst},
                                  {"worst_sample", idx}};
  s.check("bkm_equivalence.max_relative_deviation", *worst, s.tol("bkm_relative"), "<");
}

void duality_scan(Session& s) {
  const RunConfig& c = s.config();
  const auto family = selected(c, {"bkm", "2*bkm", "sld", "rld", "wy"});
  const ExpChart chart{make_basis(c.dim)};
  const auto reports = uniqueness_scan(family, chart, static_cast<std::size_t>(c.samples), c.seed);
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : reports) {
    records.push_back(to_json(r));
    for (const auto& w : r.witnesses) s.witness("duality", r.f, w.sample, w.residual);
  }
  s.details("duality_scan") = std::move(records);

  for (const auto& r : reports) {
    const auto f = std::find_if(family.begin(), family.end(), [&](const auto& g) { return g.name == r.f; });
    if (is_bkm_multiple(*f)) {
      s.check("duality." + r.f + ".max_residual", r.max_residual, s.tol("duality_pass"), "<");
      if (c.samples >= 2) {
        s.check("affine." + r.f + ".constancy_score", r.constancy_score, s.tol("affine_constancy"), "<");
        s.check("affine." + r.f + ".off_diagonal_over_scale", r.fit.off_diagonal_max / r.fit.diagonal_mean,
                s.tol("affine_constancy"), "<");
        s.check("affine." + r.f + ".scale_error", std::abs(r.fit.diagonal_mean - f->scale) / f->scale,
                s.tol("affine_constancy"), "<");
      }
    } else {
      s.check("duality." + r.f + ".max_residual", r.max_residual, s.tol("duality_reject"), ">");
      if (c.samples >= 2) {
        s.check("affine." + r.f + ".constancy_score", r.constancy_score, s.tol("affine_reject"), ">");
      }
    }
  }
  const bool any_bkm = std::any_of(family.begin(), family.end(), is_bkm_multiple);
  if (any_bkm && !reports.empty()) {
    const auto first = std::find_if(family.begin(), family.end(),
                                    [&](const auto& g) { return g.name == reports.front().f; });
    s.check("duality.bkm_ranks_first", is_bkm_multiple(*first) ? 1.0 : 0.0, 0.5, ">");
  }
}

void monotonicity(Session& s) {
  const RunConfig& c = s.config();
  const auto family = selected(c, {"bkm", "sld", "rld", "wy", "bad"});
  nlohmann::json records = nlohmann::json::array();
  for (const auto& f : family) {
    const auto r = monotonicity_sweep(f, c.dim, static_cast<std::size_t>(c.trials), c.seed);
    records.push_back(to_json(r));
    for (const auto& w : r.witnesses) s.witness("monotonicity", f.name + ":" + w.channel, w.trial, w.violation);
    if (f.monotone_claim) {
      s.check("monotonicity." + f.name + ".max_violation", r.max_violation, s.tol("monotone_slack"), "<=");
      s.check("monotonicity." + f.name + ".max_extended_violation", r.max_extended_violation,
              s.tol("monotone_slack"), "<=");
    } else {
      s.check("monotonicity." + f.name + ".violation_found", r.max_violation, s.tol("violation_bar"), ">");
    }
  }
  s.details("monotonicity") = std::move(records);
}

void flatness(Session& s) {
  const RunConfig& c = s.config();
  const Basis basis = make_basis(c.dim);
  const Chart exp_chart = ExpChart{basis};
  const Chart mix_chart = MixtureChart{basis};
  const auto theta_grid = sample_exp_points(basis.size(), static_cast<std::size_t>(c.samples), c.seed);
  std::vector<RealVector> eta_grid;
  for (const auto& theta : theta_grid) {
    eta_grid.push_back(chart_coords(mix_chart, chart_state(exp_chart, theta)));
  }
  const OperatorMonotoneFunction bkm = bkm_function();

  auto max_gamma = [&](const Connection& conn, const Chart& chart, const std::vector<RealVector>& grid) {
    std::vector<double> v(grid.size());
    parallel_for(grid.size(), [&](std::size_t p) { v[p] = christoffels(conn, chart, bkm, grid[p]).max_abs(); });
    return *std::max_element(v.begin(), v.end());
  };
  const double gamma_e = max_gamma(Connection::exponential(), exp_chart, theta_grid);
  const double gamma_m = max_gamma(Connection::mixture(), mix_chart, eta_grid);
  const double gamma_m_foreign = max_gamma(Connection::mixture(), exp_chart, theta_grid);
  const double curv_e = flatness_residual(Connection::exponential(), mix_chart, eta_grid);
  const double curv_m = flatness_residual(Connection::mixture(), exp_chart, theta_grid);
  const double curv_0 = flatness_residual(Connection(0.0), exp_chart, theta_grid);

  s.details("flatness") = {{"grid_points", c.samples},
                           {"christoffel_exp_in_exp_chart", gamma_e},
                           {"christoffel_mixture_in_mixture_chart", gamma_m},
                           {"christoffel_mixture_in_exp_chart", gamma_m_foreign},
                           {"curvature_exp_in_mixture_chart", curv_e},
                           {"curvature_mixture_in_exp_chart", curv_m},
                           {"curvature_alpha0_in_exp_chart", curv_0}};
  s.witness("flatness", "curvature_alpha0_in_exp_chart", 0, curv_0);
  s.check("flatness.christoffel_exp_in_exp_chart", gamma_e, s.tol("christoffel"), "<");
  s.check("flatness.christoffel_mixture_in_mixture_chart", gamma_m, s.tol("christoffel"), "<");
  s.check("flatness.curvature_exp_in_mixture_chart", curv_e, s.tol("curvature"), "<");
  s.check("flatness.curvature_mixture_in_exp_chart", curv_m, s.tol("curvature"), "<");
}

void legendre(Session& s) {
  const RunConfig& c = s.config();
  const ExpChart chart{make_basis(c.dim)};
  const std::size_t n = chart.basis.size();
  const auto points = sample_exp_points(n, static_cast<std::size_t>(c.samples), c.seed);
  std::vector<double> defect(points.size()), gradient(points.size()), hessian(points.size());
  parallel_for(points.size(), [&](std::size_t p) {
    const RealVector eta = dual_coords(chart, points[p]);
    defect[p] = std::abs(potential_phi(chart, eta).legendre_defect());
    // central-difference gradient of psi against the trace formula
    RealVector grad(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const double h = kDualityStep * (1.0 + std::abs(points[p](static_cast<Eigen::Index>(i))));
      RealVector up = points[p];
      RealVector down = points[p];
      up(static_cast<Eigen::Index>(i)) += h;
      down(static_cast<Eigen::Index>(i)) -= h;
      grad(static_cast<Eigen::Index>(i)) = (potential_psi(chart, up) - potential_psi(chart, down)) / (2.0 * h);
    }
    gradient[p] = (grad - eta).cwiseAbs().maxCoeff();
    hessian[p] = hessian_check(chart, points[p]);
  });
  const double max_defect = *std::max_element(defect.begin(), defect.end());
  const double max_gradient = *std::max_element(gradient.begin(), gradient.end());
  const double max_hessian = *std::max_element(hessian.begin(), hessian.end());
  s.details("legendre") = {{"points", c.samples},
                           {"max_legendre_defect", max_defect},
                           {"max_gradient_gap", max_gradient},
                           {"max_hessian_gap", max_hessian}};
  s.check("legendre.identity", max_defect, s.tol("legendre"), "<");
  s.check("legendre.gradient_gap", max_gradient, s.tol("gradient"), "<");
  s.check("legendre.hessian_gap", max_hessian, s.tol(c.dim == 2 ? "hessian_dim2" : "hessian"), "<");
}

}  // namespace

ExperimentReport run(const RunConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.config = config;
  report.tolerances = default_tolerances();
  for (const auto& [k, v] : config.tolerance_overrides) report.tolerances[k] = v;

  Session s(report);
  const std::string& cmd = config.command;
  const bool all = cmd == "all";
  if (all || cmd == "bkm-equivalence") bkm_equivalence(s);
  if (all || cmd == "duality-scan") duality_scan(s);
  if (all || cmd == "monotonicity") monotonicity(s);
  if (all || cmd == "flatness") flatness(s);
  if (all || cmd == "legendre") legendre(s);

  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace qig
