#include "dphase/cli.hpp"

#include "dphase/analysis.hpp"
#include "dphase/config.hpp"
#include "dphase/musielak.hpp"
#include "dphase/nonvar.hpp"
#include "dphase/report.hpp"
#include "dphase/var.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace dphase::cli {

namespace {

constexpr int kOk = 0;
constexpr int kHypothesisViolation = 1;
constexpr int kNonConvergence = 2;
constexpr int kConfigError = 3;

void emit(const Report& rep, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    rep.write(out);
    return;
  }
  std::ofstream f(path);
  if (!f) throw ConfigError("output", "report", "cannot open report path '" + path + "'");
  rep.write(f);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw ConfigError("output", "", "cannot open output path '" + path + "'");
  f << text;
}

void dump_solution(const Config& cfg, const DiscreteFunction& u) {
  if (!cfg.solution_csv.empty()) {
    std::ofstream f(cfg.solution_csv);
    u.write_csv(f);
  }
  if (!cfg.mesh_csv.empty()) {
    std::ofstream f(cfg.mesh_csv);
    u.mesh().write_csv(f);
  }
}

void hypothesis_to_report(const HypothesisReport& h, Report& rep) {
  rep.set("check.pass", h.pass);
  for (const auto& item : h.items) {
    std::string base = "check.item." + item.id;
    const char* v = item.verdict == Verdict::Pass        ? "pass"
                    : item.verdict == Verdict::Fail      ? "fail"
                                                         : "undetermined";
    rep.set(base + ".verdict", v);
    rep.set(base + ".margin", item.margin);
    if (!item.note.empty()) rep.set(base + ".note", item.note);
  }
  rep.set("check.witness_lambda0", h.witness_lambda0);
}

// Gate shared by the solver subcommands.
bool gate_hypotheses(const Config& cfg, std::ostream& out) {
  HypothesisReport h = check_hypotheses(cfg.build_fields(), cfg.n, cfg.build_nonlinearity(),
                                        cfg.domain(), cfg.sample_grid);
  if (!h.pass) {
    Report rep;
    hypothesis_to_report(h, rep);
    emit(rep, cfg.report_path, out);
  }
  return h.pass;
}

struct CutoffChoice {
  Vec2 center;
  double R = 0;
  double r_lambda = 0;
  double bound = 0;
};

CutoffChoice choose_cutoff(const Config& cfg, const FieldSet& fields) {
  CutoffChoice c;
  DomainSpec dom = cfg.domain();
  dom.center(c.center.x, c.center.y);
  c.R = cfg.cutoff_radius > 0 ? cfg.cutoff_radius : dom.inscribed_radius();
  Extrema pe = field_extrema(fields.p, dom, cfg.sample_grid);
  Extrema qe = field_extrema(fields.q, dom, cfg.sample_grid);
  Extrema me = field_extrema(fields.mu, dom, cfg.sample_grid);
  c.bound = r_lambda_bound(pe.low, qe.high, me.high, c.R, cfg.n);
  c.r_lambda = cfg.cutoff_r_lambda > 0 ? cfg.cutoff_r_lambda : std::min(0.9 * c.bound, 0.9);
  return c;
}

int cmd_check(const Config& cfg, std::ostream& out) {
  HypothesisReport h = check_hypotheses(cfg.build_fields(), cfg.n, cfg.build_nonlinearity(),
                                        cfg.domain(), cfg.sample_grid);
  Report rep;
  hypothesis_to_report(h, rep);
  emit(rep, cfg.report_path, out);
  return h.pass ? kOk : kHypothesisViolation;
}

int cmd_constants(const Config& cfg, std::ostream& out) {
  FieldSet fields = cfg.build_fields();
  NonlinearitySpec nonlin = cfg.build_nonlinearity();
  DomainSpec dom = cfg.domain();

  Extrema pe = field_extrema(fields.p, dom, cfg.sample_grid);
  Extrema qe = field_extrema(fields.q, dom, cfg.sample_grid);
  Extrema se = field_extrema(nonlin.s, dom, cfg.sample_grid);
  Extrema me = field_extrema(fields.mu, dom, cfg.sample_grid);

  CutoffChoice cut = choose_cutoff(cfg, fields);
  double omega = unit_ball_volume(cfg.n);
  double F_inf = f_inf_coefficient(pe.low, cut.r_lambda, cfg.lambda0);
  double ratio = ratio_coefficient(pe.low, qe.high, me.high, cfg.n, cut.r_lambda, cut.R,
                                   cfg.lambda0);
  double lambda_low = 1.0 / ratio;
  long lambda1 = static_cast<long>(std::floor(1.0 / ratio)) + 1;

  // Numerical lower bound on c_H = max of the L^1 and L^{s(x)} embedding
  // constants, maximized on the config mesh.
  Mesh mesh = cfg.build_mesh();
  EmbeddingEstimate e1 = estimate_embedding_constant(
      mesh, ScalarField::constant(1.0, "h"), fields.p, fields.q, fields.mu,
      cfg.embedding_trials, cfg.rng_seed);
  EmbeddingEstimate e2 = estimate_embedding_constant(mesh, nonlin.s, fields.p, fields.q,
                                                     fields.mu, cfg.embedding_trials,
                                                     cfg.rng_seed + 1);
  double cH = std::max(e1.value, e2.value);
  double lstar = lambda_star(cfg.c1, cfg.c2, cH, se.high, pe.low, qe.high);

  Report rep;
  rep.set("constants.N", cfg.n);
  rep.set("constants.p_minus", pe.low);
  rep.set("constants.p_plus", pe.high);
  rep.set("constants.q_minus", qe.low);
  rep.set("constants.q_plus", qe.high);
  rep.set("constants.s_plus", se.high);
  rep.set("constants.mu_sup", me.high);
  rep.set("constants.omega_N", omega);
  rep.set("constants.R", cut.R);
  rep.set("constants.r_lambda", cut.r_lambda);
  rep.set("constants.r_lambda_bound", cut.bound);
  rep.set("constants.F_inf_coeff", F_inf);
  rep.set("constants.ratio_coeff", ratio);
  rep.set("constants.lambda0", cfg.lambda0);
  rep.set("constants.lambda1", lambda1);
  rep.set("constants.lambda_lower", lambda_low);
  rep.set("constants.lambda", cfg.lambda0 * static_cast<double>(lambda1));
  rep.set("constants.c_H_lower_bound", cH);
  rep.set("constants.lambda_star_at_estimate", lstar);
  rep.set("constants.lambda_star_note", "upper bound caveat: c_H is a lower bound");
  if (lambda_low < lstar) {
    rep.set("constants.window", "nonempty");
    rep.set("constants.window_lower", lambda_low);
    rep.set("constants.window_upper", lstar);
  } else {
    rep.set("constants.window", "empty_for_estimated_cH");
  }
  emit(rep, cfg.report_path, out);
  return kOk;
}

int cmd_props(const Config& cfg, int samples, std::ostream& out) {
  Mesh mesh = cfg.build_mesh();
  FieldSet fields = cfg.build_fields();
  Section2Fields sf{fields.p, fields.q, fields.mu, fields.p};

  std::mt19937_64 eng(cfg.rng_seed);
  auto uniform = [&]() { return (eng() >> 11) * 0x1.0p-53; };

  std::vector<DiscreteFunction> pool;
  pool.reserve(samples);
  for (int k = 0; k < samples; ++k) {
    DiscreteFunction u(mesh);
    double scale = std::exp(std::log(0.05) + uniform() * (std::log(20.0) - std::log(0.05)));
    for (int i = 0; i < mesh.vertex_count(); ++i)
      if (!mesh.on_boundary(i)) u[i] = scale * (2.0 * uniform() - 1.0);
    pool.push_back(std::move(u));
  }

  std::vector<ModularReport> reports = check_section2_props(pool, sf);
  if (cfg.props_csv.empty()) {
    write_props_csv(out, reports);
  } else {
    std::ofstream f(cfg.props_csv);
    write_props_csv(f, reports);
  }
  return kOk;
}

int cmd_solve_p(const Config& cfg, std::ostream& out) {
  if (!gate_hypotheses(cfg, out)) return kHypothesisViolation;
  Mesh mesh = cfg.build_mesh();
  FieldSet fields = cfg.build_fields();
  RhsSpec rhs = cfg.build_rhs();

  SolveReport sr = solve_convection(rhs, mesh, fields, cfg.descent_params(), cfg.outer_params());

  Report rep;
  rep.set("solve.converged", sr.converged);
  rep.set("solve.outer_iters", sr.outer_iters);
  rep.set("solve.inner_iters", sr.inner_iters);
  rep.set("solve.residual_inf", sr.residual_inf);
  rep.set("solve.delta_norm", sr.delta_norm);
  rep.set("solve.norm_u", sr.norm_u);
  rep.set("solve.trivial", sr.trivial);
  rep.set("solve.contractive", sr.contractive);
  if (!sr.energy_trace.empty()) rep.set("solve.J_final", sr.energy_trace.back());

  // Growth bound of the double-well term with the estimated embedding
  // constant (a lower bound, so the slack is informational).
  DomainSpec dom = cfg.domain();
  Extrema ae = field_extrema(fields.alpha, dom, cfg.sample_grid);
  if (ae.high > 0) {
    Extrema re = field_extrema(fields.r, dom, cfg.sample_grid);
    ScalarField two_r = ScalarField::parse("2*(" + cfg.r + ")", "2r");
    EmbeddingEstimate est = estimate_embedding_constant(mesh, two_r, fields.p, fields.q,
                                                        fields.mu, cfg.embedding_trials,
                                                        cfg.rng_seed);
    double r_max = std::max(re.low, re.high);
    double Lval = energy_L(sr.u, fields.alpha, fields.gamma, fields.r);
    double C = std::pow(est.value, 2.0 * r_max);
    double bound = energy_L_bound(C, ae.high, re.low, r_max, sr.norm_u);
    rep.set("solve.L_energy", Lval);
    rep.set("solve.L_bound_estimate", bound);
    rep.set("solve.L_bound_slack", bound - Lval);
  }
  emit(rep, cfg.report_path, out);

  dump_solution(cfg, sr.u);
  if (!cfg.trace_csv.empty()) {
    std::string csv = "iter,J,residual_inf,delta_norm\n";
    char buf[160];
    for (const auto& row : sr.outer_trace) {
      std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", row.iter, row.J,
                    row.residual_inf, row.delta_norm);
      csv += buf;
    }
    write_file(cfg.trace_csv, csv);
  }
  return kOk;
}

int cmd_solve_plambda(const Config& cfg, std::ostream& out) {
  if (!gate_hypotheses(cfg, out)) return kHypothesisViolation;
  Mesh mesh = cfg.build_mesh();
  FieldSet fields = cfg.build_fields();
  NonlinearitySpec nonlin = cfg.build_nonlinearity();

  CutoffChoice cut = choose_cutoff(cfg, fields);
  DomainSpec dom = cfg.domain();
  Extrema pe = field_extrema(fields.p, dom, cfg.sample_grid);
  Extrema qe = field_extrema(fields.q, dom, cfg.sample_grid);
  Extrema me = field_extrema(fields.mu, dom, cfg.sample_grid);
  double ratio = ratio_coefficient(pe.low, qe.high, me.high, cfg.n, cut.r_lambda, cut.R,
                                   cfg.lambda0);

  CutoffSpec spec{cut.center, cut.R, cut.r_lambda};
  DiscreteFunction start = cutoff_u_bar(spec, mesh);

  // Default lambda: just above the discrete lower endpoint Phi(u_bar)/Psi(u_bar)
  // of the admissible window, so the start already has negative energy.
  double lambda = cfg.lambda;
  double phi_start = energy_Phi(start, fields.p, fields.q, fields.mu);
  double psi_start = energy_Psi(start, nonlin);
  if (lambda <= 0) {
    if (!(psi_start > 0))
      throw ConfigError("solver", "lambda",
                        "config: Psi(u_bar) <= 0; an explicit solver.lambda is required");
    lambda = 1.1 * phi_start / psi_start;
  }

  DescentParams prm = cfg.descent_params();
  if (cfg.max_iters == 10000) prm.max_iters = 20000;  // variational default budget
  VarSolveReport vr = minimize_I(lambda, nonlin, fields.p, fields.q, fields.mu, start, prm);

  Report rep;
  rep.set("var.lambda", lambda);
  rep.set("var.lambda_lower_est", 1.0 / ratio);
  rep.set("var.lambda_window_lower_discrete", psi_start > 0 ? phi_start / psi_start : 0.0);
  rep.set("var.r_lambda", cut.r_lambda);
  rep.set("var.r_lambda_bound", cut.bound);
  rep.set("var.R", cut.R);
  rep.set("var.converged", vr.converged);
  rep.set("var.iters", vr.iters);
  rep.set("var.I_value", vr.I_value);
  rep.set("var.Phi_value", vr.Phi_value);
  rep.set("var.Psi_value", vr.Psi_value);
  rep.set("var.residual_inf", vr.residual_inf);
  rep.set("var.norm_u", vr.norm_u);
  rep.set("var.nontrivial", vr.nontrivial);
  rep.set("var.cap_held", vr.cap_held);
  emit(rep, cfg.report_path, out);

  dump_solution(cfg, vr.u);
  if (!cfg.trace_csv.empty()) {
    std::string csv = "iter,I,Phi,grad_inf\n";
    char buf[160];
    for (const auto& row : vr.ps_trace) {
      std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", row.iter, row.I, row.Phi,
                    row.grad_inf);
      csv += buf;
    }
    write_file(cfg.trace_csv, csv);
  }
  return kOk;
}

int cmd_gl(const Config& cfg, std::ostream& out) {
  Mesh mesh = cfg.build_mesh();
  FieldSet fields = cfg.build_fields();
  DomainSpec dom = cfg.domain();
  Extrema ae = field_extrema(fields.alpha, dom, cfg.sample_grid);
  if (ae.low != ae.high)
    throw ConfigError("coefficients", "alpha", "gl requires a constant alpha");
  RhsSpec rhs = cfg.build_rhs();

  SolveReport sr = gl_solve({cfg.nu_x, cfg.nu_y}, ae.low, rhs.g, mesh, cfg.descent_params(),
                            cfg.outer_params());

  Report rep;
  rep.set("gl.converged", sr.converged);
  rep.set("gl.outer_iters", sr.outer_iters);
  rep.set("gl.inner_iters", sr.inner_iters);
  rep.set("gl.residual_inf", sr.residual_inf);
  rep.set("gl.norm_psi", sr.norm_u);
  rep.set("gl.trivial", sr.trivial);
  rep.set("gl.nontrivial", !sr.trivial);
  rep.set("gl.convection_bound_slack", sr.gl_bound_slack);
  emit(rep, cfg.report_path, out);
  dump_solution(cfg, sr.u);
  return kOk;
}

int cmd_example41(double lambda0, const std::string& report_path, std::ostream& out) {
  ConstantsReport c = example_4_1_constants(lambda0);

  const double omega_ref = 4.0 * M_PI / 3.0;
  bool pass_omega = std::fabs(c.omega_N - omega_ref) <= 1e-10;
  bool pass_bound = std::fabs(c.r_lambda_bound - 0.29) <= 0.01;
  bool pass_F = std::fabs(c.F_inf_coeff / lambda0 - 0.007) <= 0.0005;
  bool pass_ratio = std::fabs(c.ratio_coeff / lambda0 - 0.11) <= 0.01;
  bool all = pass_omega && pass_bound && pass_F && pass_ratio;

  Report rep;
  rep.set("example41.lambda0", lambda0);
  rep.set("example41.omega_3.value", c.omega_N);
  rep.set("example41.omega_3.reference", omega_ref);
  rep.set("example41.omega_3.pass", pass_omega);
  rep.set("example41.r_lambda_bound.value", c.r_lambda_bound);
  rep.set("example41.r_lambda_bound.reference", 0.29);
  rep.set("example41.r_lambda_bound.pass", pass_bound);
  rep.set("example41.F_coeff.value", c.F_inf_coeff);
  rep.set("example41.F_coeff.reference", 0.007 * lambda0);
  rep.set("example41.F_coeff.pass", pass_F);
  rep.set("example41.ratio.value", c.ratio_coeff);
  rep.set("example41.ratio.reference", 0.11 * lambda0);
  rep.set("example41.ratio.pass", pass_ratio);
  rep.set("example41.F_coeff.rounded_chain", c.F_inf_rounded);
  rep.set("example41.ratio.rounded_chain", c.ratio_rounded);
  rep.set("example41.lambda_lower", c.lambda_lower);
  rep.set("example41.lambda1", c.lambda1);
  rep.set("example41.lambda", c.lambda);
  rep.set("example41.lambda_star_unit_cH", c.lambda_star_unit_cH);
  rep.set("example41.pass", all);
  emit(rep, report_path, out);
  return all ? kOk : kHypothesisViolation;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"double-phase variable exponent toolkit"};
  app.require_subcommand(1);

  std::string config_path, echo_path;
  int samples = 1000;
  double lambda0 = 1.0;
  std::string report_path;

  auto add_config = [&](CLI::App* sub, bool required = true) {
    auto* opt = sub->add_option("-c,--config", config_path, "config file");
    if (required) opt->required();
    sub->add_option("--echo-config", echo_path, "write the normalized config to this path");
  };

  CLI::App* c_check = app.add_subcommand("check", "verify the standing hypotheses");
  add_config(c_check);
  CLI::App* c_constants = app.add_subcommand("constants", "analytic constants report");
  add_config(c_constants);
  CLI::App* c_props = app.add_subcommand("props", "modular/norm property harness CSV");
  add_config(c_props);
  c_props->add_option("--samples", samples, "number of random sample fields");
  CLI::App* c_solvep = app.add_subcommand("solve-p", "solve the nonvariational problem");
  add_config(c_solvep);
  CLI::App* c_solvepl = app.add_subcommand("solve-plambda", "solve the variational problem");
  add_config(c_solvepl);
  CLI::App* c_gl = app.add_subcommand("gl", "Ginzburg-Landau convection example");
  add_config(c_gl);
  CLI::App* c_ex41 = app.add_subcommand("example41", "reproduce the worked constants");
  c_ex41->add_option("--lambda0", lambda0, "superlinearity witness parameter");
  c_ex41->add_option("--report", report_path, "report output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help and friends print through CLI11's machinery.
      std::ostringstream help;
      int code = app.exit(e, help, help);
      out << help.str();
      return code;
    }
    err << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (c_ex41->parsed()) return cmd_example41(lambda0, report_path, out);

    Config cfg = Config::parse_file(config_path);
    if (!echo_path.empty()) write_file(echo_path, cfg.to_text());

    if (c_check->parsed()) return cmd_check(cfg, out);
    if (c_constants->parsed()) return cmd_constants(cfg, out);
    if (c_props->parsed()) return cmd_props(cfg, samples, out);
    if (c_solvep->parsed()) return cmd_solve_p(cfg, out);
    if (c_solvepl->parsed()) return cmd_solve_plambda(cfg, out);
    if (c_gl->parsed()) return cmd_gl(cfg, out);
  } catch (const NonConvergence& e) {
    err << "non-convergence: " << e.what() << " (best residual " << e.residual() << ")\n";
    return kNonConvergence;
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kConfigError;
  } catch (const ParseError& e) {
    err << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace dphase::cli
