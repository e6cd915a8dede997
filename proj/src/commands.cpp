#include "benard/commands.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "benard/config.hpp"
#include "benard/diagnostics.hpp"
#include "benard/ensemble.hpp"
#include "benard/error.hpp"
#include "benard/ldp.hpp"
#include "benard/norms.hpp"
#include "benard/output.hpp"

namespace benard {

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Everything built from a configuration, in dependency order.
struct Context {
  std::string command;
  std::string config_text;
  RunConfig cfg;
  std::string dir;
  int threads = 0;
  std::unique_ptr<GalerkinBasis> basis;
  std::unique_ptr<Operators> ops;
  NoiseModel noise;
  Vec xi;
  std::optional<ControlPath> control;
  EpsilonGuard guard;

  std::string out(const std::string& name) const { return (fs::path(dir) / name).string(); }
  const ControlPath* control_ptr() const { return control ? &*control : nullptr; }
};

Context make_context(const std::string& command, const CommandOptions& opt) {
  Context c;
  c.command = command;
  if (opt.config_path.empty()) throw ConfigError("--config is required");
  c.config_text = read_file(opt.config_path);
  c.cfg = parse_config(c.config_text);
  if (opt.seed) c.cfg.seed = *opt.seed;
  c.dir = opt.out_dir.empty() ? c.cfg.output_dir : opt.out_dir;
  c.threads = opt.threads;
  set_thread_count(opt.threads);

  ManifestInfo info{command, opt.config_path, c.config_text, c.cfg.seed, opt.threads};
  write_manifest(c.dir, info, c.cfg);

  c.basis = std::make_unique<GalerkinBasis>(make_basis(c.cfg, opt.basis_cache));
  c.ops = std::make_unique<Operators>(*c.basis, c.cfg.physics);
  c.noise = make_noise(c.cfg, *c.basis);
  c.xi = make_field(c.cfg.initial, *c.basis, c.cfg.seed);
  if (c.cfg.control.kind != "zero") {
    const Vec h = make_field(c.cfg.control, *c.basis, c.cfg.seed);
    h0_norm_sq(c.noise.q, h);
    ControlPath path = ControlPath::zeros(c.cfg.integrator.horizon, 1, c.basis->size());
    path.values.row(0) = h.transpose();
    c.control = path;
  }

  // eps0 guard with sampled embedding constants (fixed stream: part of the config).
  Rng rng = make_stream(c.cfg.seed, 0x636f6e7374ULL);
  const auto consts = estimate_constants(*c.basis, 64, rng);
  const double K = c.noise.sigma.growth_constant(c.noise.q);
  const double L = c.noise.sigma.lipschitz_constant(c.noise.q);
  const double Kt = c.noise.sigma_tilde.growth_constant_l4(c.noise.q, c.basis->domain().length);
  c.guard = epsilon_guard(c.cfg.physics.nu_wedge_kappa(), K, Kt, L, c.cfg.integrator.horizon,
                          c.cfg.ldp_M, consts.c1_hat * consts.c2_hat);
  append_manifest(c.dir, fmt::format("modes = {} velocity + {} temperature", c.basis->velocity_size(),
                                     c.basis->temperature_size()));
  append_manifest(c.dir, fmt::format("grid = {} x {}", c.basis->grid_x2(), c.basis->grid_x1()));
  append_manifest(c.dir, fmt::format("eps0_log10 = {}", c.guard.log10_eps0));
  return c;
}

void warn_epsilon(const Context& c, double eps) {
  if (eps > c.guard.eps0) {
    const auto msg = fmt::format("warning: epsilon = {} exceeds the guard eps0 = 10^{:.1f}", eps,
                                 c.guard.log10_eps0);
    std::cerr << msg << "\n";
    append_manifest(c.dir, msg);
  }
}

// Blow-ups are reported with their step and leave the partial outputs marked.
template <class Fn>
int guarded(Context& c, Fn&& fn) {
  try {
    fn();
    append_manifest(c.dir, "status = complete");
    return kExitOk;
  } catch (const BlowUpError& e) {
    append_manifest(c.dir, fmt::format("status = blow-up at step {} (t = {})", e.step(), e.time()));
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

int cmd_simulate(const CommandOptions& opt) {
  auto c = make_context("simulate", opt);
  warn_epsilon(c, c.cfg.integrator.epsilon);
  return guarded(c, [&] {
    Rng rng = make_stream(c.cfg.seed, 0);
    const auto rec = run_stochastic(*c.ops, c.noise, c.xi, c.control_ptr(), c.cfg.integrator, rng);
    write_summary_csv(c.out("summary.csv"), rec);
    write_snapshots(c.out("snapshots.bnrd"), rec);
    append_manifest(c.dir, fmt::format("x_norm = {}", x_norm(rec)));
  });
}

int cmd_skeleton(const CommandOptions& opt) {
  auto c = make_context("skeleton", opt);
  return guarded(c, [&] {
    const auto rec = run_skeleton(*c.ops, c.noise, c.xi, c.control_ptr(), c.cfg.integrator);
    write_summary_csv(c.out("summary.csv"), rec);
    write_snapshots(c.out("snapshots.bnrd"), rec);
    const ControlPath h = c.control ? *c.control
                                    : ControlPath::zeros(c.cfg.integrator.horizon, 1, c.basis->size());
    write_control_csv(c.out("control.csv"), h);
    append_manifest(c.dir, fmt::format("action = {}", action(h, c.noise.q)));
    append_manifest(c.dir, fmt::format("x_norm = {}", x_norm(rec)));
  });
}

int cmd_mam(const CommandOptions& opt) {
  auto c = make_context("mam", opt);
  return guarded(c, [&] {
    SkeletonModel model{c.ops.get(), &c.noise, c.cfg.integrator};
    ActionProblem problem;
    problem.xi = c.xi;
    problem.target.kind = c.cfg.mam_target;
    problem.target.tolerance = c.cfg.mam_tolerance;
    problem.M_cap = c.cfg.ldp_M;
    problem.settings = c.cfg.mam;
    IntegratorConfig every = c.cfg.integrator;
    every.record_stride = 1;
    if (c.cfg.mam_target == TargetKind::Terminal) {
      problem.target.terminal = make_field(c.cfg.mam_terminal, *c.basis, c.cfg.seed);
    } else if (c.cfg.mam_target == TargetKind::Exit) {
      problem.target.path = run_skeleton(*c.ops, c.noise, c.xi, nullptr, every);
      problem.target.radius = c.cfg.mam_radius;
    } else {
      problem.target.path = run_skeleton(*c.ops, c.noise, c.xi, c.control_ptr(), every);
    }
    const auto res = minimize_action(model, problem);
    write_control_csv(c.out("control.csv"), res.h_star);
    write_summary_csv(c.out("summary.csv"), res.trajectory);
    {
      CsvWriter csv(c.out("mam_stages.csv"), {"stage", "rho", "action"});
      for (std::size_t i = 0; i < res.stage_actions.size(); ++i)
        csv.row(std::vector<double>{static_cast<double>(i), problem.settings.rho_schedule[i],
                                    res.stage_actions[i]});
    }
    CsvWriter csv(c.out("mam_result.csv"),
                  {"target", "action", "feasibility_gap", "feasible", "converged", "iterations", "within_cap"});
    csv.row({to_string(problem.target.kind), format_number(res.action_value),
             format_number(res.feasibility_gap), res.feasible ? "1" : "0", res.converged ? "1" : "0",
             std::to_string(res.iterations), res.within_cap ? "1" : "0"});
  });
}

int cmd_weakconv(const CommandOptions& opt) {
  auto c = make_context("weakconv", opt);
  for (double e : c.cfg.weakconv_eps) warn_epsilon(c, e);
  return guarded(c, [&] {
    const auto rows = weak_convergence_experiment(*c.ops, c.noise, c.cfg.integrator, c.xi,
                                                  c.control_ptr(), c.cfg.weakconv_eps,
                                                  c.cfg.weakconv_paths, c.cfg.seed, c.threads);
    CsvWriter csv(c.out("weakconv.csv"), {"epsilon", "mean_x_dist_sq", "std_error", "paths", "blowups"});
    for (const auto& r : rows)
      csv.row(std::vector<double>{r.epsilon, r.mean, r.std_error, static_cast<double>(r.paths),
                                  static_cast<double>(r.blowups)});
    append_manifest(c.dir, fmt::format("loglog_slope = {}", loglog_slope(rows)));
  });
}

int cmd_compactness(const CommandOptions& opt) {
  auto c = make_context("compactness", opt);
  return guarded(c, [&] {
    Vec g = make_field(c.cfg.compactness_g, *c.basis, c.cfg.seed);
    if (c.cfg.compactness_g.kind == "zero") {  // default direction: the noisiest mode
      Eigen::Index j = 0;
      c.noise.q.lambdas.maxCoeff(&j);
      g[j] = std::sqrt(c.noise.q.lambdas[j]);
    }
    const ControlPath h = c.control ? *c.control
                                    : ControlPath::zeros(c.cfg.integrator.horizon, 1, c.basis->size());
    const auto rows = compactness_experiment(*c.ops, c.noise, c.cfg.integrator, c.xi, h, g,
                                             c.cfg.compactness_amplitude, c.cfg.compactness_n);
    CsvWriter csv(c.out("compactness.csv"), {"n", "x_distance"});
    for (const auto& r : rows) csv.row(std::vector<double>{static_cast<double>(r.n), r.distance});
  });
}

int cmd_increments(const CommandOptions& opt) {
  auto c = make_context("increments", opt);
  warn_epsilon(c, c.cfg.integrator.epsilon);
  return guarded(c, [&] {
    IntegratorConfig cfg = c.cfg.integrator;
    const int cells = 1 << c.cfg.increments_levels;
    if (cfg.n_steps % cells != 0)
      throw ConfigError(fmt::format("integrator.n_steps must be a multiple of 2^levels = {}", cells));
    cfg.record_stride = std::gcd(cfg.record_stride, cfg.n_steps / cells);
    const auto recs = map_paths<TrajectoryRecord>(c.cfg.increments_paths, c.cfg.seed, c.threads,
                                                  [&](int, Rng& rng) {
      return run_stochastic(*c.ops, c.noise, c.xi, c.control_ptr(), cfg, rng);
    });
    const auto levels = dyadic_increment_statistic(recs, c.cfg.increments_levels, c.cfg.increments_N);
    CsvWriter csv(c.out("increments.csv"), {"level", "I_n", "std_error", "I_n_times_2_pow_half_n", "paths_in_G_N"});
    for (const auto& l : levels)
      csv.row(std::vector<double>{static_cast<double>(l.level), l.mean, l.std_error,
                                  l.mean * std::pow(2.0, 0.5 * l.level), static_cast<double>(l.paths_in_G_N)});
  });
}

int cmd_mcldp(const CommandOptions& opt) {
  auto c = make_context("mcldp", opt);
  for (double e : c.cfg.mcldp_eps) warn_epsilon(c, e);
  return guarded(c, [&] {
    const auto rows = mc_ldp_estimate(*c.ops, c.noise, c.cfg.integrator, c.xi, c.cfg.mcldp_radius,
                                      c.cfg.mcldp_eps, c.cfg.mcldp_paths, c.cfg.seed, c.threads);
    CsvWriter csv(c.out("mcldp.csv"), {"epsilon", "paths", "hits", "probability", "eps_log_p", "no_hits", "blowups"});
    for (const auto& r : rows)
      csv.row({format_number(r.epsilon), std::to_string(r.paths), std::to_string(r.hits),
               format_number(r.probability), r.no_hits ? "nan" : format_number(r.eps_log_p),
               r.no_hits ? "1" : "0", std::to_string(r.blowups)});
  });
}

int cmd_diagnostics(const CommandOptions& opt) {
  auto c = make_context("diagnostics", opt);
  return guarded(c, [&] {
    Rng rng = make_stream(c.cfg.seed, 0x64696167ULL);
    const auto id = identity_suite(*c.ops, c.cfg.diagnostics_samples, rng);
    const auto in = inequality_suite(*c.ops, c.cfg.diagnostics_samples, rng);
    const auto& q = c.noise.q;
    const double l = c.basis->domain().length;
    CsvWriter csv(c.out("diagnostics.csv"), {"quantity", "value"});
    auto put = [&](const std::string& k, double v) { csv.row({k, format_number(v)}); };
    put("b1_self_rel", id.b1_self);
    put("b2_self_rel", id.b2_self);
    put("b1_antisym_rel", id.b1_antisym);
    put("b2_antisym_rel", id.b2_antisym);
    put("diffB_identity_rel", id.diff_identity);
    put("parseval_rel", id.parseval);
    put("divergence_max", id.divergence);
    put("orthonormality_max", id.orthonormality);
    put("c1_hat", in.c1_hat);
    put("c2_hat", in.c2_hat);
    put("c_diff_used", in.c_diff);
    put("c_diff_observed", in.c_diff_observed);
    put("violations_VL4", in.vl4);
    put("violations_Poincare", in.poincare);
    put("violations_inegB2", in.inegB2);
    put("violations_normB1", in.normB1);
    for (int a = 0; a < 3; ++a) {
      put(fmt::format("violations_BB1_alpha_{}", in.alphas[a]), in.bb1[a]);
      put(fmt::format("violations_BB2_alpha_{}", in.alphas[a]), in.bb2[a]);
    }
    put("violations_diffB1", in.diffB1);
    put("violations_mono1", in.mono1);
    put("trace_Q", q.trace());
    put("trace_Q_tail_estimate", q.tail_estimate);
    put("K", c.noise.sigma.growth_constant(q));
    put("L", c.noise.sigma.lipschitz_constant(q));
    put("K_tilde", c.noise.sigma_tilde.growth_constant_l4(q, l));
    put("L_tilde", c.noise.sigma_tilde.lipschitz_constant_l4(q, l));
    put("eps0", c.guard.eps0);
    put("eps0_log10", c.guard.log10_eps0);
  });
}

int cmd_selftest(const CommandOptions& opt, std::ostream& report) {
  set_thread_count(opt.threads);
  Domain domain;
  BasisSpec spec;
  spec.max_k1 = 6;
  spec.max_k2 = 6;
  spec.velocity_modes = 6;
  const auto basis = GalerkinBasis::build(domain, spec);
  const Operators ops(basis, PhysicsParams{1.0, 1.0});
  Rng rng = make_stream(opt.seed.value_or(0), 0x73656c66ULL);
  const auto id = identity_suite(ops, 100, rng);
  const auto in = inequality_suite(ops, 100, rng);
  bool ok = true;
  auto check = [&](const std::string& name, double value, double tol) {
    const bool pass = value <= tol;
    ok = ok && pass;
    fmt::print(report, "{} {} = {:.3e} (tol {:.0e})\n", pass ? "PASS" : "FAIL", name, value, tol);
  };
  check("<B1(u,u),u> relative", id.b1_self, 1e-10);
  check("<B2(u,th),th> relative", id.b2_self, 1e-10);
  check("B1 antisymmetry", id.b1_antisym, 1e-10);
  check("B2 antisymmetry", id.b2_antisym, 1e-10);
  check("difference identity", id.diff_identity, 1e-10);
  check("Parseval round trip", id.parseval, 1e-10);
  check("divergence", id.divergence, 1e-16);
  check("orthonormality", id.orthonormality, 1e-10);
  check("inequality violations", in.total_violations(), 0.0);
  return ok ? kExitOk : kExitSelftest;
}

}  // namespace benard
