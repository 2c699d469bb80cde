#include "finsler/solution.hpp"

#include <cmath>

#include "finsler/quadrature.hpp"
#include "finsler/wulff.hpp"

namespace finsler {

SolutionParams::SolutionParams(NormModel norm_, double beta_, double lambda_)
    : norm(std::move(norm_)), dim(norm.dim()), beta(beta_), lambda(lambda_) {
  if (!(beta >= 0.0) || !(beta < dim))
    throw std::invalid_argument("SolutionParams: beta must lie in [0, N)");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("SolutionParams: lambda must be positive");
}

double SolutionParams::amplitude() const {
  return std::pow(dim / (dim - 1.0), dim - 1) * std::pow(dim - beta, dim);
}

double SolutionParams::peak_value() const {
  return std::log(amplitude()) + dim * std::log(lambda);
}

double u_of_t(const SolutionParams& p, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("u_of_t: negative radius");
  const double x = std::pow(p.lambda, p.q()) * std::pow(t, p.q_prime());
  return p.peak_value() - p.dim * std::log1p(x);
}

double du_dt(const SolutionParams& p, double t) {
  const double qp = p.q_prime();
  const double x = std::pow(p.lambda, p.q()) * std::pow(t, qp);
  return -p.dim * qp * (x / t) / (1.0 + x);
}

double H_of_t(const SolutionParams& p, double t) {
  // u + gamma0 log t = log C - q log lambda - N log1p(lambda^{-q} t^{-q'})
  const double x = std::pow(p.lambda, -p.q()) * std::pow(t, -p.q_prime());
  return H_limit(p) - p.dim * std::log1p(x);
}

double H_limit(const SolutionParams& p) {
  return std::log(p.amplitude()) - p.q() * std::log(p.lambda);
}

double eval_u(const SolutionParams& p, const Vec& x) {
  return u_of_t(p, p.norm.hat_polar(x));
}

Vec eval_grad_u(const SolutionParams& p, const Vec& x) {
  const double t = p.norm.hat_polar(x);
  if (!(t > 0.0) || norm2(x) < 1e-12)
    throw std::domain_error("eval_grad_u: gradient undefined at the origin");
  return du_dt(p, t) * p.norm.hat_polar_grad(x);
}

namespace {

// Radial mass integrand in the variable tau = t^{q'}. The substitution makes
// t^{N-1-beta} dt = tau^{N-2} dtau / q', so the integrand is smooth up to
// tau = 0 for every beta in [0, N).
double mass_radial(const SolutionParams& p) {
  const double qp = p.q_prime();
  const double gamma0x = p.gamma0_exact();
  if (!(gamma0x > p.dim - p.beta))
    throw std::runtime_error("mass: tail exponent not dominated (internal inconsistency)");

  auto integrand = [&](double tau) {
    const double t = std::pow(tau, 1.0 / qp);
    return std::pow(tau, p.dim - 2.0) * std::exp(u_of_t(p, t));
  };

  // Locate the peak and the 1e-16 cutoff on a coarse dyadic scan.
  double peak = 0;
  for (int k = -60; k <= 200; ++k) peak = std::max(peak, integrand(std::pow(2.0, k * 0.5)));
  double tau_end = 1.0;
  while (integrand(tau_end) > 1e-16 * peak) tau_end *= 2.0;

  const double kap = wulff_volume(p.norm);
  const double body =
      p.dim * kap / qp * adaptive_integrate(integrand, 0.0, tau_end, 1e-13);
  const double t_end = std::pow(tau_end, 1.0 / qp);
  const double tail = p.dim * kap * std::exp(u_of_t(p, t_end)) *
                      std::pow(t_end, p.dim - p.beta) / (gamma0x - (p.dim - p.beta));
  return body + tail;
}

// One dyadic box shell [-2s,2s]^d minus [-s,s]^d, as 2d disjoint slabs. Each
// axis range is integrated with GL panels split at 0, which keeps lp-gauge
// kinks on panel boundaries.
struct AxisRange {
  double lo, hi;
  bool split_at_zero;
};

double tensor_integral(const SolutionParams& p, const std::vector<AxisRange>& ranges, int order) {
  std::vector<double> gx, gw;
  gauss_legendre(order, gx, gw);
  const int d = static_cast<int>(ranges.size());
  std::vector<std::vector<double>> pts(d), wts(d);
  for (int ax = 0; ax < d; ++ax) {
    std::vector<std::pair<double, double>> panels;
    if (ranges[ax].split_at_zero && ranges[ax].lo < 0 && ranges[ax].hi > 0) {
      panels = {{ranges[ax].lo, 0.0}, {0.0, ranges[ax].hi}};
    } else {
      panels = {{ranges[ax].lo, ranges[ax].hi}};
    }
    for (auto [a, b] : panels) {
      const double c = 0.5 * (a + b), h = 0.5 * (b - a);
      for (int i = 0; i < order; ++i) {
        pts[ax].push_back(c + h * gx[i]);
        wts[ax].push_back(h * gw[i]);
      }
    }
  }
  // d <= 3 here; explicit nesting keeps this simple.
  double total = 0;
  if (d == 2) {
    for (std::size_t i = 0; i < pts[0].size(); ++i)
      for (std::size_t j = 0; j < pts[1].size(); ++j) {
        const Vec x{pts[0][i], pts[1][j]};
        total += wts[0][i] * wts[1][j] * std::pow(p.norm.hat_polar(x), -p.beta) * std::exp(eval_u(p, x));
      }
  } else {
    for (std::size_t i = 0; i < pts[0].size(); ++i)
      for (std::size_t j = 0; j < pts[1].size(); ++j)
        for (std::size_t k = 0; k < pts[2].size(); ++k) {
          const Vec x{pts[0][i], pts[1][j], pts[2][k]};
          total += wts[0][i] * wts[1][j] * wts[2][k] * std::pow(p.norm.hat_polar(x), -p.beta) *
                   std::exp(eval_u(p, x));
        }
  }
  return total;
}

double shell_integral(const SolutionParams& p, double s, int order) {
  const int d = p.dim;
  double total = 0;
  for (int k = 0; k < d; ++k) {
    for (int sign = -1; sign <= 1; sign += 2) {
      std::vector<AxisRange> ranges(d);
      for (int j = 0; j < d; ++j) {
        if (j < k)
          ranges[j] = {-2.0 * s, 2.0 * s, true};
        else if (j > k)
          ranges[j] = {-s, s, true};
        else
          ranges[j] = sign > 0 ? AxisRange{s, 2.0 * s, false} : AxisRange{-2.0 * s, -s, false};
      }
      total += tensor_integral(p, ranges, order);
    }
  }
  return total;
}

double mass_full(const SolutionParams& p) {
  const int d = p.dim;
  if (d > 3) throw std::invalid_argument("mass(full_nd): dimension must be 2 or 3");
  const int order = d == 2 ? 16 : 8;
  const double kap = wulff_volume(p.norm);
  const double gamma0x = p.gamma0_exact();
  const double t_char = std::pow(p.lambda, -p.q() / p.q_prime());

  // Gauge radius of the largest Wulff ball inscribed in the unit sup-ball,
  // slightly shrunk so the tail bound stays a bound.
  double m_box = 1e300;
  const int probes = d == 2 ? 2048 : 8192;
  for (int i = 0; i < probes; ++i) {
    Vec w = d == 2 ? angle_to_dir(2.0 * M_PI * (i + 0.5) / probes) : fibonacci_point(i, probes);
    double sup = 0;
    for (int j = 0; j < d; ++j) sup = std::max(sup, std::abs(w[j]));
    m_box = std::min(m_box, p.norm.hat_polar(w) / sup);
  }
  m_box *= 0.999;

  auto tail_bound = [&](double tb) {
    return d * kap * p.amplitude() * std::pow(p.lambda, -p.q()) *
           std::pow(tb, d - p.beta - gamma0x) / (gamma0x - (d - p.beta));
  };

  // Unit-box gauge weight, for the inner-core power-law estimate.
  const double core_unit = unit_box_gauge_weight(p.norm, p.beta);

  double total = 0;
  double s_hi = t_char;  // shells [s, 2s] going outward from the characteristic scale
  for (int k = 0; k < 400; ++k) {
    total += shell_integral(p, s_hi, order);
    s_hi *= 2.0;
    if (tail_bound(s_hi * m_box) < 1e-4 * total) break;
  }
  double s_lo = t_char;
  for (int k = 0; k < 400; ++k) {
    s_lo *= 0.5;
    total += shell_integral(p, s_lo, order);
    const double core = std::exp(p.peak_value()) * core_unit * std::pow(s_lo, d - p.beta);
    if (core < 1e-9 * total) {
      total += core;  // inner box: e^u is constant to O(s^{q'}) there
      break;
    }
  }
  return total;
}

}  // namespace

double mass(const SolutionParams& p, MassMethod method) {
  return method == MassMethod::radial_1d ? mass_radial(p) : mass_full(p);
}

double gamma0(const SolutionParams& p) {
  const double kap = wulff_volume(p.norm);
  return std::pow(mass(p, MassMethod::radial_1d) / (p.dim * kap), 1.0 / (p.dim - 1.0));
}

void to_json(nlohmann::json& j, const AsymptoticsReport& r) {
  j = nlohmann::json{{"gamma_measured", r.gamma_measured},
                     {"gamma_expected", r.gamma_expected},
                     {"H_inf", r.H_inf},
                     {"sandwich_d", r.sandwich_d},
                     {"radii", r.radii},
                     {"H_values", r.H_values}};
  auto arr = nlohmann::json::array();
  for (auto [t, v] : r.grad_decay) arr.push_back({t, v});
  j["grad_decay"] = arr;
}

AsymptoticsReport asymptotics_check(const SolutionParams& p, const std::vector<double>& radii) {
  if (radii.size() < 2) throw std::invalid_argument("asymptotics_check: need at least 2 radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 1.0)) throw std::invalid_argument("asymptotics_check: radii must exceed 1");
    if (i && !(radii[i] > radii[i - 1]))
      throw std::invalid_argument("asymptotics_check: radii must increase");
  }
  AsymptoticsReport rep;
  rep.radii = radii;
  rep.gamma_expected = p.gamma0_exact();
  rep.H_inf = H_limit(p);

  // least-squares slope of -u against log t
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(radii.size());
  for (double t : radii) {
    const double lx = std::log(t), ly = -u_of_t(p, t);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  rep.gamma_measured = (n * sxy - sx * sy) / (n * sxx - sx * sx);

  const double gamma0x = p.gamma0_exact();
  const std::vector<Vec> dirs =
      p.dim == 2 ? circle_directions(16) : fibonacci_sphere(32);
  for (double t : radii) {
    rep.H_values.push_back(H_of_t(p, t));
    double worst = 0;
    for (const Vec& w : dirs) {
      const Vec x = (t / p.norm.hat_polar(w)) * w;
      const Vec v = eval_grad_u(p, x) + (gamma0x / t) * p.norm.hat_polar_grad(x);
      worst = std::max(worst, t * p.norm.eval(v));
    }
    rep.grad_decay.emplace_back(t, worst);
  }

  // Sandwich constant for u-tilde = sup u - u, measured on radii >= 10.
  const double u0 = p.peak_value();
  double d_best = 1.0;
  for (double t : radii) {
    if (t < 10.0) continue;
    const double ratio = (u0 - u_of_t(p, t)) / std::log(t);
    d_best = std::max({d_best, ratio, 1.0 / ratio});
  }
  rep.sandwich_d = d_best;
  return rep;
}

std::optional<double> level_set_radius(const SolutionParams& p, double level) {
  // u(R) = level  <=>  1 + lambda^q R^{q'} = (C lambda^N e^{-level})^{1/N}
  const double a = std::exp((p.peak_value() - level) / p.dim);
  if (a < 1.0) return std::nullopt;
  return std::pow((a - 1.0) * std::pow(p.lambda, -p.q()), 1.0 / p.q_prime());
}

}  // namespace finsler
