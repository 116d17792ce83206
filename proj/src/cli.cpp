#include "pqlab/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "pqlab/catalog.hpp"
#include "pqlab/field_io.hpp"
#include "pqlab/format.hpp"
#include "pqlab/growth.hpp"
#include "pqlab/solver.hpp"
#include "pqlab/validator.hpp"

namespace pqlab {

namespace {

std::string join_notes(const ExponentBoundsReport& b) {
  std::string s;
  for (const ConditionReport* r : {&b.alpha, &b.beta}) {
    if (r->verdict == Verdict::pass) continue;
    if (!s.empty()) s += "; ";
    s += r->id + ": " + r->note;
  }
  return s;
}

ResolvedSchedule reject(ExponentParams p, std::string why) {
  ResolvedSchedule r;
  r.params = p;
  r.reason = std::move(why);
  return r;
}

std::filesystem::path out_path(const RunOptions& o, const std::string& name) {
  std::filesystem::path dir(o.out_dir);
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << text;
}

Problem make_problem(const ProblemConfig& c, const RunOptions& o) {
  Problem pb{c.grid(), c.family, c.solver};
  if (o.tolerance) pb.opts.tolerance = *o.tolerance;
  return pb;
}

nlohmann::json schedule_json(const MoserSchedule& s) {
  nlohmann::json j;
  j["n"] = s.params.ctx.n;
  j["two_star"] = s.params.ctx.two_star;
  j["alpha"] = s.params.alpha;
  j["beta"] = s.params.beta;
  j["gamma"] = s.params.gamma;
  j["delta"] = s.params.delta;
  j["nu"] = s.nu;
  j["mu"] = s.mu ? nlohmann::json(*s.mu) : nlohmann::json("unbounded");
  j["lambda"] = s.lambdas;
  j["theta"] = {s.theta0, s.theta1, s.theta2, s.theta3, s.theta4};
  return j;
}

}  // namespace

ResolvedSchedule resolve_schedule(const ProblemConfig& c) {
  const ScheduleSpec& sp = c.schedule;
  Point center = c.ball_center();
  ResolvedSchedule r;
  std::optional<double> theta = sp.theta;
  if (sp.automatic) {
    ParamsResult pr = auto_params(c.family, center, c.R, sp.n, sp.omega);
    if (!pr.accepted) return reject(pr.params, pr.reason);
    r.params = pr.params;
    if (!theta) theta = pr.coeff_theta;
  } else {
    try {
      if (sp.beta) {
        r.params = make_params(sp.n, *sp.alpha, *sp.beta, *sp.gamma, sp.two_star);
        if (sp.delta) r.params.delta = *sp.delta;
      } else {
        r.params = default_params(sp.n, *sp.alpha, sp.delta.value_or(0.0), sp.two_star);
      }
    } catch (const std::invalid_argument& e) {
      ExponentParams raw = make_params(sp.n, *sp.alpha, sp.beta.value_or(*sp.alpha / 2.0), sp.gamma.value_or(1.0),
                                       sp.two_star);
      return reject(raw, e.what());
    }
    ExponentBoundsReport b = check_exponent_bounds(r.params);
    if (b.verdict != Verdict::pass) return reject(r.params, join_notes(b));
    if (!theta) theta = coefficient_theta(c.family, center, c.R);
  }

  double nu = 1.0;
  std::optional<double> mu;
  if (sp.nu) {
    nu = *sp.nu;
    if (sp.mu) mu = *sp.mu;
  } else {
    MuNuChoice ch = select_mu_nu(r.params);
    if (!ch.accepted) return reject(r.params, ch.reason);
    nu = ch.nu;
    mu = ch.mu;
    if (sp.mu_unbounded) mu.reset();
    if (sp.mu) mu = *sp.mu;
  }
  try {
    MoserSchedule s = moser_exponents(r.params, nu, mu);
    s.coeff_theta = theta;
    r.schedule = s;
  } catch (const std::invalid_argument& e) {
    return reject(r.params, e.what());
  }
  r.accepted = true;
  return r;
}

int cmd_check(const ProblemConfig& c, const RunOptions& o, std::ostream& out) {
  ResolvedSchedule rs = resolve_schedule(c);
  Point center = c.ball_center();
  GrowthTriple tr = catalog_triple(c.family, center, c.R, c.schedule.omega);
  SampleSpec sp = ball_sample_spec(center, c.R, o.seed.value_or(c.seed));
  sp.directions = c.check.directions;
  sp.tol = c.check.tol;
  sp.fd_tol = c.check.fd_tol;

  std::vector<ConditionReport> rows{check_ellipticity_sandwich(c.family, tr, sp), check_growth_A(c.family, tr, sp),
                                    check_11M(tr, rs.params, sp.ts), check_12M(c.family, tr, rs.params, sp),
                                    check_A3(tr, rs.params, sp.ts)};
  ExponentBoundsReport eb = check_exponent_bounds(rs.params);
  rows.push_back(eb.alpha);
  rows.push_back(eb.beta);

  std::ostringstream table;
  table << "id\tverdict\tworst_ratio\tworst_t\tfitted_M\tnote\n";
  bool any_fail = false, any_inconclusive = false;
  for (const ConditionReport& r : rows) {
    table << format_report_row(r) << "\n";
    any_fail |= r.verdict == Verdict::fail;
    any_inconclusive |= r.verdict == Verdict::inconclusive;
  }
  out << table.str();
  if (!rs.accepted) out << "schedule rejected: " << rs.reason << "\n";
  if (o.out_dir != ".") write_text(out_path(o, "conditions.tsv"), table.str());
  if (any_fail || !rs.accepted) return kExitFail;
  return any_inconclusive ? kExitInconclusive : kExitOk;
}

int cmd_params(const ProblemConfig& c, const RunOptions&, std::ostream& out) {
  ResolvedSchedule rs = resolve_schedule(c);
  if (!rs.accepted) {
    const ExponentParams& p = rs.params;
    out << "n " << p.ctx.n << "\n";
    out << "two_star " << num(p.ctx.two_star, 17) << "\n";
    out << "alpha " << num(p.alpha, 17) << "\n";
    out << "beta " << num(p.beta, 17) << "\n";
    out << "gamma " << num(p.gamma, 17) << "\n";
    out << "delta " << num(p.delta, 17) << "\n";
    out << "rejected: " << rs.reason << "\n";
    return kExitFail;
  }
  out << format_schedule(*rs.schedule);
  return kExitOk;
}

int cmd_solve(const ProblemConfig& c, const RunOptions& o, std::ostream& out) {
  Problem pb = make_problem(c, o);
  SolveResult r = minimize(pb.grid, pb.family, pb.opts);
  save_field(out_path(o, "field.txt").string(), r.u, std::string(kind_name(c.family.kind)));
  out << "iterations " << r.iterations << "\n";
  out << "energy " << num(r.energy, 17) << "\n";
  out << "grad_norm " << num(r.grad_norm, 17) << "\n";
  out << "converged " << (r.converged ? "yes" : "no") << "\n";
  if (r.amplitude_scale != 1.0) out << "amplitude_scale " << num(r.amplitude_scale, 17) << "\n";
  for (const std::string& w : r.warnings) out << "warning: " << w << "\n";
  return r.converged ? kExitOk : kExitNoConvergence;
}

int cmd_validate(const ProblemConfig& c, const RunOptions& o, std::ostream& out) {
  ResolvedSchedule rs = resolve_schedule(c);
  if (!rs.accepted) {
    out << "rejected: " << rs.reason << "\n";
    return kExitFail;
  }
  const MoserSchedule& s = *rs.schedule;
  Problem pb = make_problem(c, o);
  Ball b = make_ball(pb.grid, c.rho, c.R, c.ball_center());
  EstimateReport rep = sweep_amplitudes(pb, c.sweep.amplitudes, s, b);

  std::string text = format_report(rep);
  bool pass = rep.pass() && rep.all_energy_descent && rep.nested_monotone;

  nlohmann::json j;
  j["family"] = std::string(kind_name(c.family.kind));
  j["schedule"] = schedule_json(s);
  for (const MeasureRecord& m : rep.records)
    j["records"].push_back({{"amplitude", m.amplitude},
                            {"sup_grad2", m.sup_grad2},
                            {"energy_R", m.energy_R},
                            {"w22", m.w22},
                            {"v_integral", m.v_integral},
                            {"c_hat", m.c_hat},
                            {"c_hat_V", m.c_hat_V},
                            {"c_hat_w22", m.c_hat_w22}});
  j["s1"] = rep.s1;
  j["s3"] = rep.s3 ? nlohmann::json(*rep.s3) : nlohmann::json();
  j["spread"] = rep.spread;
  j["warnings"] = rep.warnings;

  if (!c.sweep.pairs.empty()) {
    SolveResult base = minimize(pb.grid, pb.family, pb.opts);
    RadiusReport rr = radius_sweep(pb.grid, base.u, s, c.sweep.pairs, c.ball_center());
    text += format_radius_report(rr);
    pass = pass && rr.pass();
    for (const RadiusRow& row : rr.rows)
      j["radius"].push_back({{"rho", row.rho}, {"sup_grad2", row.sup_grad2}, {"normalized", row.normalized}});
  }
  j["pass"] = pass;

  out << text;
  out << "result " << (pass ? "pass" : "fail") << "\n";
  write_text(out_path(o, "report.tsv"), text);
  write_text(out_path(o, "report.json"), j.dump(2) + "\n");
  return pass ? kExitOk : kExitFail;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gradient and second-derivative estimates for nonuniformly elliptic variational problems", "pqlab"};
  app.require_subcommand(1);
  RunOptions o;
  std::string config_path;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  std::string command;
  for (const char* name : {"check", "params", "solve", "validate"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("config", config_path, "problem configuration file")->required();
    sub->add_option("--seed", seed, "seed for condition sampling");
    sub->add_option("--out", o.out_dir, "output directory");
    sub->add_option("--tolerance", tolerance, "solver gradient tolerance")->check(CLI::PositiveNumber);
    sub->callback([&command, name] { command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }
  for (CLI::App* sub : app.get_subcommands()) {
    if (sub->count("--seed")) o.seed = seed;
    if (sub->count("--tolerance")) o.tolerance = tolerance;
  }

  ProblemConfig c;
  try {
    c = load_config(config_path);
  } catch (const ParseError& e) {
    err << config_path << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (command == "check") return cmd_check(c, o, out);
    if (command == "params") return cmd_params(c, o, out);
    if (command == "solve") return cmd_solve(c, o, out);
    return cmd_validate(c, o, out);
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const GeometryError& e) {
    err << "geometry error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace pqlab
