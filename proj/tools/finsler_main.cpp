// Command-line entry point: norm verification, Wulff geometry, the classified
// solution family, and the integral-identity checks. Reports are JSON (stdout
// or --output); profiles are CSV. Exit codes: 0 pass, 1 check failed,
// 2 invalid input.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "finsler/identities.hpp"
#include "finsler/operators.hpp"
#include "finsler/wulff.hpp"

namespace {

using namespace finsler;

struct Options {
  std::string norm_path;
  std::string domain = "wulff:1";
  std::string output;
  std::string method = "radial_1d";
  int dim = 2;
  double beta = 1.0;
  double lambda = 1.0;
  double tol = 0.0;  // 0 = command default
  double radius = 2.0;
  double eps = 1e-3;
  double step = 1e-3;
  double tmax = 10.0;
  double u0 = std::nan("");
  int points = 200;
  int samples = 1000;
  int grid = 2048;
  long trials = 200000;
  std::uint64_t seed = 20240901u;
};

NormModel resolve_norm(const Options& opt) {
  if (!opt.norm_path.empty()) return load_norm_config(opt.norm_path);
  return NormModel::euclidean(opt.dim);
}

DomainSpec parse_domain(const std::string& text, int dim) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  std::vector<double> args;
  std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  std::string at_part;
  const auto at = rest.find('@');
  if (at != std::string::npos) {
    at_part = rest.substr(at + 1);
    rest = rest.substr(0, at);
  }
  auto parse_list = [](const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) out.push_back(std::stod(item));
    return out;
  };
  args = parse_list(rest);

  if (kind == "wulff") {
    if (args.size() != 1) throw std::invalid_argument("domain: wulff:R[@cx,cy,...]");
    Vec center(dim);
    if (!at_part.empty()) {
      auto c = parse_list(at_part);
      if (static_cast<int>(c.size()) != dim)
        throw std::invalid_argument("domain: center dimension mismatch");
      center = Vec::from(c);
    }
    return DomainSpec::wulff_ball(args[0], center);
  }
  if (kind == "annulus") {
    if (args.size() != 2) throw std::invalid_argument("domain: annulus:r_in,r_out");
    return DomainSpec::annulus(args[0], args[1]);
  }
  if (kind == "ellipse") {
    if (static_cast<int>(args.size()) != dim)
      throw std::invalid_argument("domain: ellipse needs one semi-axis per dimension");
    return DomainSpec::ellipse(Vec::from(args));
  }
  if (kind == "star") {
    // star:amp,k  ->  rho(theta) = 1 + amp cos(k theta), sampled
    if (args.size() != 2) throw std::invalid_argument("domain: star:amplitude,frequency");
    std::vector<double> rho;
    const int m = 256;
    for (int j = 0; j < m; ++j)
      rho.push_back(1.0 + args[0] * std::cos(args[1] * 2.0 * M_PI * j / m));
    return DomainSpec::star(rho);
  }
  throw std::invalid_argument("domain: unknown kind '" + kind + "'");
}

void emit_json(const nlohmann::json& j, const std::string& output) {
  if (output.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(output, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + output);
    out << j.dump(2) << "\n";
  }
}

double pick(double value, double fallback) { return value > 0.0 ? value : fallback; }

int run_verify_norm(const Options& opt) {
  const NormModel norm = resolve_norm(opt);
  const CheckReport rep =
      verify_norm_properties(norm, opt.samples, pick(opt.tol, 1e-6), opt.seed);
  emit_json(rep, opt.output);
  return rep.pass ? 0 : 1;
}

int run_wulff_volume(const Options& opt) {
  const NormModel norm = resolve_norm(opt);
  const double kappa = wulff_volume(norm, pick(opt.tol, 1e-10));
  emit_json({{"kappa", kappa}, {"family", family_name(norm.family())}, {"dimension", norm.dim()}},
            opt.output);
  return 0;
}

int run_isoperimetric(const Options& opt) {
  const NormModel norm = resolve_norm(opt);
  const DomainSpec domain = parse_domain(opt.domain, norm.dim());
  const CheckReport rep = isoperimetric_quotient(domain, norm, opt.beta, pick(opt.tol, 1e-6));
  emit_json(rep, opt.output);
  return rep.pass ? 0 : 1;
}

int run_verify_solution(const Options& opt) {
  const NormModel norm = resolve_norm(opt);
  const SolutionParams params(norm, opt.beta, opt.lambda);
  const auto pts = annulus_points(norm, 0.5, 3.0, opt.points, opt.seed);
  const ResidualReport res = qN_residual(params, pts, opt.step);
  const double tol = pick(opt.tol, 1e-3);
  CheckReport rep = make_check("qN_residual_max_rel", res.max_rel, 0.0, tol);
  rep.details["max_abs"] = res.max_abs;
  rep.details["fd_step"] = res.fd_step;
  rep.details["points"] = static_cast<int>(res.points.size());
  emit_json(rep, opt.output);
  return rep.pass ? 0 : 1;
}

int run_mass(const Options& opt) {
  const NormModel norm = resolve_norm(opt);
  const SolutionParams params(norm, opt.beta, opt.lambda);
  const MassMethod method = opt.method == "full_nd" ? MassMethod::full_nd : MassMethod::radial_1d;
  const double m = mass(params, method);
  const int n = params.dim;
  const double kappa = wulff_volume(norm);
  const double reference = n * std::pow(n * (n - opt.beta) / (n - 1.0), n - 1.0) * kappa;
  const double rel_tol = pick(opt.tol, method == MassMethod::radial_1d ? 1e-8 : 1e-3);
  CheckReport rep = make_check("mass_quantization", m, reference, rel_tol * reference);
  rep.details["method"] = opt.method;
  rep.details["kappa"] = kappa;
  rep.details["gamma0"] = gamma0(params);
  emit_json(rep, opt.output);
  return rep.pass ? 0 : 1;
}

int run_asymptotics(const Options& opt) {
  const NormModel norm = resolve_norm(opt);
  const SolutionParams params(norm, opt.beta, opt.lambda);
  std::vector<double> radii;
  for (int i = 0; i <= 48; ++i) radii.push_back(std::pow(10.0, 2.0 + 4.0 * i / 48.0));
  const AsymptoticsReport rep = asymptotics_check(params, radii);
  if (!opt.output.empty()) emit_profile(rep, opt.output);
  nlohmann::json j = rep;
  const double tol = pick(opt.tol, 1e-3);
  const bool pass = std::abs(rep.gamma_measured - rep.gamma_expected) <= tol;
  j["pass"] = pass;
  emit_json(j, "");
  return pass ? 0 : 1;
}

int run_pohozaev(const Options& opt) {
  const NormModel norm = resolve_norm(opt);
  const SolutionParams params(norm, opt.beta, opt.lambda);
  const PohozaevReport rep = pohozaev_check(params, opt.radius, opt.eps, opt.grid);
  nlohmann::json j = rep;
  auto inner = nlohmann::json::array();
  for (double e : {1e-1, 1e-2, 1e-3}) {
    const PohozaevInnerTerms terms = pohozaev_inner_terms(params, e, opt.grid);
    inner.push_back({{"eps", e},
                     {"eu_term", terms.eu_term},
                     {"fn_term", terms.fn_term},
                     {"flux_pair_term", terms.flux_pair_term},
                     {"combined", terms.combined}});
  }
  j["inner_terms_vanishing"] = inner;
  const double tol = pick(opt.tol, 1e-4);
  const bool pass = rep.relative_defect <= tol;
  j["pass"] = pass;
  emit_json(j, opt.output);
  return pass ? 0 : 1;
}

int run_brezis_merle(const Options& opt) {
  const NormModel norm = resolve_norm(opt);
  const SolutionParams params(norm, opt.beta, opt.lambda);
  const std::vector<double> fracs = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  const CheckReport rep = brezis_merle_radial_check(params, opt.radius, fracs);
  emit_json(rep, opt.output);
  return rep.pass ? 0 : 1;
}

int run_d0(const Options& opt) {
  const NormModel norm = resolve_norm(opt);
  const MonotonicityConstants rep = d0_estimate(norm, opt.beta, opt.trials, opt.seed);
  emit_json(rep, opt.output);
  return 0;
}

int run_radial_solve(const Options& opt) {
  double u0 = opt.u0;
  if (std::isnan(u0)) {
    // default: the classified profile's peak for the given lambda
    u0 = std::log(std::pow(opt.dim / (opt.dim - 1.0), opt.dim - 1) *
                  std::pow(opt.dim - opt.beta, opt.dim)) +
         opt.dim * std::log(opt.lambda);
  }
  const RadialProfile prof =
      radial_shoot(opt.dim, opt.beta, u0, opt.tmax, pick(opt.tol, 1e-9));
  if (!opt.output.empty()) emit_profile(prof, opt.output);
  const CheckReport defect = radial_operator_check(prof, opt.beta, 1.0);
  emit_json({{"points", prof.t.size()},
             {"u0", u0},
             {"t_max", opt.tmax},
             {"u_at_tmax", prof.u.back()},
             {"max_operator_defect", defect.computed}},
            "");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finsler norms, Wulff geometry and singular Liouville identity checks"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--norm", opt.norm_path, "norm configuration file");
    cmd->add_option("--dim", opt.dim, "dimension when no --norm file is given");
    cmd->add_option("--tol", opt.tol, "check tolerance (command-specific default)");
    cmd->add_option("--seed", opt.seed, "seed for all sampling");
    cmd->add_option("--output", opt.output, "write the report/profile to this path");
  };

  CLI::App* verify_norm = app.add_subcommand("verify-norm", "structural norm properties");
  add_common(verify_norm);
  verify_norm->add_option("--samples", opt.samples, "random sample count");

  CLI::App* wulffv = app.add_subcommand("wulff-volume", "measure of the unit Wulff ball");
  add_common(wulffv);

  CLI::App* iso = app.add_subcommand("isoperimetric", "weighted isoperimetric quotient");
  add_common(iso);
  iso->add_option("--domain", opt.domain, "wulff:R[@c] | annulus:a,b | ellipse:a,b | star:amp,k");
  iso->add_option("--beta", opt.beta, "weight exponent");

  CLI::App* vsol = app.add_subcommand("verify-solution", "PDE residual of the classified family");
  add_common(vsol);
  vsol->add_option("--beta", opt.beta, "weight exponent");
  vsol->add_option("--lambda", opt.lambda, "family parameter");
  vsol->add_option("--points", opt.points, "annulus sample count");
  vsol->add_option("--step", opt.step, "finite-difference step");

  CLI::App* massc = app.add_subcommand("mass", "weighted mass against the quantization constant");
  add_common(massc);
  massc->add_option("--beta", opt.beta, "weight exponent");
  massc->add_option("--lambda", opt.lambda, "family parameter");
  massc->add_option("--method", opt.method, "radial_1d | full_nd");

  CLI::App* asym = app.add_subcommand("asymptotics", "logarithmic asymptotics at infinity");
  add_common(asym);
  asym->add_option("--beta", opt.beta, "weight exponent");
  asym->add_option("--lambda", opt.lambda, "family parameter");

  CLI::App* poho = app.add_subcommand("pohozaev", "Pohozaev identity on a Wulff annulus");
  add_common(poho);
  poho->add_option("--beta", opt.beta, "weight exponent");
  poho->add_option("--lambda", opt.lambda, "family parameter");
  poho->add_option("--radius", opt.radius, "outer gauge radius");
  poho->add_option("--eps", opt.eps, "inner gauge radius");
  poho->add_option("--grid", opt.grid, "boundary quadrature resolution");

  CLI::App* bm = app.add_subcommand("brezis-merle", "weighted exponential integrability bound");
  add_common(bm);
  bm->add_option("--beta", opt.beta, "weight exponent");
  bm->add_option("--lambda", opt.lambda, "family parameter");
  bm->add_option("--radius", opt.radius, "Wulff ball radius");

  CLI::App* d0c = app.add_subcommand("d0", "flux strong-monotonicity constants");
  add_common(d0c);
  d0c->add_option("--beta", opt.beta, "weight exponent entering delta");
  d0c->add_option("--trials", opt.trials, "random sampling budget");

  CLI::App* rsolve = app.add_subcommand("radial-solve", "radial shooting profile");
  add_common(rsolve);
  rsolve->add_option("--beta", opt.beta, "weight exponent");
  rsolve->add_option("--lambda", opt.lambda, "sets the default u0");
  rsolve->add_option("--u0", opt.u0, "initial value at the origin");
  rsolve->add_option("--tmax", opt.tmax, "integration end");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (verify_norm->parsed()) return run_verify_norm(opt);
    if (wulffv->parsed()) return run_wulff_volume(opt);
    if (iso->parsed()) return run_isoperimetric(opt);
    if (vsol->parsed()) return run_verify_solution(opt);
    if (massc->parsed()) return run_mass(opt);
    if (asym->parsed()) return run_asymptotics(opt);
    if (poho->parsed()) return run_pohozaev(opt);
    if (bm->parsed()) return run_brezis_merle(opt);
    if (d0c->parsed()) return run_d0(opt);
    if (rsolve->parsed()) return run_radial_solve(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
