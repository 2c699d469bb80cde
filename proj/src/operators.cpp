#include "finsler/operators.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "finsler/parallel.hpp"
#include "finsler/quadrature.hpp"

namespace finsler {

Vec FluxField::flux(const Vec& x) const {
  const double f = norm.eval(x);
  if (f < 1e-10) return Vec(norm.dim());  // continuous extension at the degenerate point
  return std::pow(f, exponent - 1.0) * norm.grad(x);
}

void to_json(nlohmann::json& j, const ResidualReport& r) {
  auto pts = nlohmann::json::array();
  for (const Vec& p : r.points) pts.push_back(p.to_std());
  j = nlohmann::json{{"points", pts},
                     {"residuals", r.residuals},
                     {"max_abs", r.max_abs},
                     {"max_rel", r.max_rel},
                     {"fd_step", r.fd_step}};
}

ResidualReport qN_residual_field(const std::function<Vec(const Vec&)>& grad_u,
                                 const std::function<double(const Vec&)>& source,
                                 const NormModel& norm, int exponent,
                                 const std::vector<Vec>& points, double h) {
  if (!(h > 0)) throw std::invalid_argument("qN_residual: step h must be positive");
  const int n = norm.dim();
  for (const Vec& x : points)
    if (norm2(x) < 10.0 * h)
      throw std::runtime_error("qN_residual: point too close to the origin for the stencil");

  const FluxField field{norm, exponent};
  ResidualReport rep;
  rep.points = points;
  rep.residuals.assign(points.size(), 0.0);
  rep.fd_step = h;

  std::vector<double> src(points.size());
  parallel_for(points.size(), [&](std::size_t k) {
    const Vec& x = points[k];
    double div = 0;
    for (int i = 0; i < n; ++i) {
      Vec xp = x, xm = x;
      xp[i] += 0.5 * h;
      xm[i] -= 0.5 * h;
      div += (field.flux(grad_u(xp))[i] - field.flux(grad_u(xm))[i]) / h;
    }
    src[k] = source(x);
    rep.residuals[k] = div + src[k];
  });

  double max_src = 0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    rep.max_abs = std::max(rep.max_abs, std::abs(rep.residuals[k]));
    max_src = std::max(max_src, std::abs(src[k]));
  }
  rep.max_rel = max_src > 0 ? rep.max_abs / max_src : rep.max_abs;
  return rep;
}

ResidualReport qN_residual(const SolutionParams& params, const std::vector<Vec>& points,
                           double h) {
  return qN_residual_field(
      [&](const Vec& x) { return eval_grad_u(params, x); },
      [&](const Vec& x) {
        return std::pow(params.norm.hat_polar(x), -params.beta) * std::exp(eval_u(params, x));
      },
      params.norm, params.dim, points, h);
}

std::vector<Vec> annulus_points(const NormModel& norm, double t_min, double t_max, int count,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> radius(t_min, t_max);
  std::vector<Vec> pts;
  pts.reserve(count);
  const int n = norm.dim();
  while (static_cast<int>(pts.size()) < count) {
    Vec w(n);
    for (int i = 0; i < n; ++i) w[i] = gauss(rng);
    const double r = norm2(w);
    if (r < 1e-6) continue;
    w *= 1.0 / r;
    pts.push_back((radius(rng) / norm.hat_polar(w)) * w);
  }
  return pts;
}

GridField2D qN_fd(const GridField2D& u, const NormModel& norm, int exponent) {
  if (u.nx < 5 || u.ny < 5) throw std::invalid_argument("qN_fd: grid must be at least 5x5");
  if (norm.dim() != 2) throw std::invalid_argument("qN_fd: 2D grids only");
  const double h = u.h;
  const FluxField field{norm, exponent};
  GridField2D out(u.nx, u.ny, u.x0, u.y0, h);
  for (double& v : out.values) v = std::nan("");

  // Half-point gradients: the in-axis component is an exact centered
  // difference at the face, the cross component averages the two neighboring
  // centered differences. Divergence then differences the face fluxes.
  parallel_for(static_cast<std::size_t>(u.nx - 2) * (u.ny - 2), [&](std::size_t idx) {
    const int i = 1 + static_cast<int>(idx % (u.nx - 2));
    const int j = 1 + static_cast<int>(idx / (u.nx - 2));
    auto face_x = [&](int i0) {  // face between (i0, j) and (i0+1, j)
      const double ux = (u.at(i0 + 1, j) - u.at(i0, j)) / h;
      const double uy =
          (u.at(i0, j + 1) + u.at(i0 + 1, j + 1) - u.at(i0, j - 1) - u.at(i0 + 1, j - 1)) /
          (4.0 * h);
      return field.flux(Vec{ux, uy})[0];
    };
    auto face_y = [&](int j0) {
      const double uy = (u.at(i, j0 + 1) - u.at(i, j0)) / h;
      const double ux =
          (u.at(i + 1, j0) + u.at(i + 1, j0 + 1) - u.at(i - 1, j0) - u.at(i - 1, j0 + 1)) /
          (4.0 * h);
      return field.flux(Vec{ux, uy})[1];
    };
    out.at(i, j) = (face_x(i) - face_x(i - 1)) / h + (face_y(j) - face_y(j - 1)) / h;
  });
  return out;
}

// ---------------------------------------------------------------------------
// radial shooting

namespace {

struct ShootSystem {
  int n;
  double qp;  // q' = (N-beta)/(N-1)

  // State y = (U, P) with U(tau) = u(t), P(tau) = g(t)^{1/(N-1)}, tau = t^{q'}.
  void rhs(double tau, const double y[2], double dy[2]) const {
    dy[0] = -y[1] / (qp * tau);
    dy[1] = std::exp(y[0]) * std::pow(tau, n - 2.0) * std::pow(y[1], 2.0 - n) / (qp * (n - 1.0));
  }
};

// Dormand-Prince 5(4) pair.
void dopri_step(const ShootSystem& sys, double tau, const double y[2], double h, double out5[2],
                double out4[2]) {
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                      a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                      a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static const double b41 = 5179.0 / 57600, b43 = 7571.0 / 16695, b44 = 393.0 / 640,
                      b45 = -92097.0 / 339200, b46 = 187.0 / 2100, b47 = 1.0 / 40;
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

  double k1[2], k2[2], k3[2], k4[2], k5[2], k6[2], k7[2], tmp[2];
  sys.rhs(tau, y, k1);
  for (int i = 0; i < 2; ++i) tmp[i] = y[i] + h * a21 * k1[i];
  sys.rhs(tau + c2 * h, tmp, k2);
  for (int i = 0; i < 2; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
  sys.rhs(tau + c3 * h, tmp, k3);
  for (int i = 0; i < 2; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
  sys.rhs(tau + c4 * h, tmp, k4);
  for (int i = 0; i < 2; ++i)
    tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  sys.rhs(tau + c5 * h, tmp, k5);
  for (int i = 0; i < 2; ++i)
    tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
  sys.rhs(tau + h, tmp, k6);
  for (int i = 0; i < 2; ++i)
    out5[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
  sys.rhs(tau + h, out5, k7);
  for (int i = 0; i < 2; ++i)
    out4[i] = y[i] + h * (b41 * k1[i] + b43 * k3[i] + b44 * k4[i] + b45 * k5[i] + b46 * k6[i] +
                          b47 * k7[i]);
}

struct SeriesStart {
  double p1, p2;
  double u_at(double tau, double u0, double qp) const {
    return u0 - (p1 / qp) * tau - (p2 / (2.0 * qp)) * tau * tau;
  }
  double p_at(double tau) const { return p1 * tau + p2 * tau * tau; }
};

}  // namespace

RadialProfile radial_shoot(int dim, double beta, double u0, double t_max, double tol,
                           std::vector<double> grid) {
  if (dim < 2) throw std::invalid_argument("radial_shoot: dimension must be >= 2");
  if (!(beta >= 0.0) || !(beta < dim))
    throw std::invalid_argument("radial_shoot: beta must lie in [0, N)");
  if (!(t_max > 0)) throw std::invalid_argument("radial_shoot: t_max must be positive");
  if (!(tol > 0)) throw std::invalid_argument("radial_shoot: tolerance must be positive");

  const double qp = (dim - beta) / (dim - 1.0);
  const ShootSystem sys{dim, qp};

  if (grid.empty()) {
    grid.push_back(0.0);
    const int m = 512;
    for (int i = 0; i <= m; ++i)
      grid.push_back(t_max * std::pow(1e-6, 1.0 - static_cast<double>(i) / m));
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0) || (i && !(grid[i] > grid[i - 1])))
      throw std::invalid_argument("radial_shoot: grid must be increasing and nonnegative");
    if (grid[i] > t_max * (1 + 1e-12))
      throw std::invalid_argument("radial_shoot: grid exceeds t_max");
  }

  // Leading series of the startup balance g ~ t^{N-beta} e^{u0}/(N-beta):
  // P = p1 tau + p2 tau^2, U = u0 - (p1/q') tau - (p2/2q') tau^2.
  SeriesStart series;
  series.p1 = std::pow(std::exp(u0) / (qp * (dim - 1.0)), 1.0 / (dim - 1.0));
  series.p2 = -series.p1 * series.p1 / (qp * dim);

  const double tau_max = std::pow(t_max, qp);
  double tau_s = std::min(1e-5, 1e-4 / std::max(1.0, series.p1));
  tau_s = std::min(tau_s, tau_max / 16.0);

  RadialProfile prof;
  prof.dim = dim;
  prof.beta = beta;

  double tau_cur = tau_s;
  double y[2] = {series.u_at(tau_s, u0, qp), series.p_at(tau_s)};
  double h = tau_s;

  auto integrate_to = [&](double tau_target) {
    const double rtol = tol, atol = 1e-3 * tol + 1e-14;
    while (tau_cur < tau_target) {
      h = std::min(h, tau_target - tau_cur);
      double y5[2], y4[2];
      dopri_step(sys, tau_cur, y, h, y5, y4);
      double err = 0;
      for (int i = 0; i < 2; ++i) {
        const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
        const double e = (y5[i] - y4[i]) / sc;
        err += e * e;
      }
      err = std::sqrt(0.5 * err);
      if (err <= 1.0 || h <= 1e-14 * tau_max) {
        if (h <= 1e-14 * tau_max && err > 1.0)
          throw std::runtime_error("radial_shoot: step size underflow (stiff segment)");
        tau_cur += h;
        y[0] = y5[0];
        y[1] = y5[1];
      }
      const double factor = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      h *= std::min(5.0, std::max(0.2, factor));
    }
  };

  for (double t : grid) {
    double uval, pval;
    const double tau = std::pow(t, qp);
    if (t == 0.0) {
      prof.t.push_back(0.0);
      prof.u.push_back(u0);
      prof.g.push_back(0.0);
      if (qp > 1.0)
        prof.minus_du.push_back(0.0);
      else if (qp == 1.0)
        prof.minus_du.push_back(series.p1);
      else
        prof.minus_du.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    if (tau <= tau_s) {
      uval = series.u_at(tau, u0, qp);
      pval = series.p_at(tau);
    } else {
      integrate_to(tau);
      uval = y[0];
      pval = y[1];
    }
    prof.t.push_back(t);
    prof.u.push_back(uval);
    prof.minus_du.push_back(pval / t);
    prof.g.push_back(std::pow(pval, dim - 1.0));
  }
  return prof;
}

CheckReport radial_operator_check(const RadialProfile& profile, double beta, double tol) {
  const auto& t = profile.t;
  const auto& g = profile.g;
  const int n = static_cast<int>(t.size());
  if (n < 5) throw std::invalid_argument("radial_operator_check: profile too short");
  const int dim = profile.dim;

  // Uniform spacing enables the 4th-order stencil; profiles from the default
  // shooting grid fall back to the nonuniform 3-point formula.
  int lo = 0;
  while (lo < n && t[lo] <= 0.0) ++lo;
  bool uniform = n - lo >= 5;
  const double dt0 = uniform ? t[lo + 1] - t[lo] : 0.0;
  for (int k = lo + 1; uniform && k + 1 < n; ++k)
    if (std::abs((t[k + 1] - t[k]) - dt0) > 1e-9 * dt0) uniform = false;

  double worst = 0, worst_t = 0;
  auto consider = [&](int k, double dg) {
    const double defect = std::pow(t[k], 1.0 - dim) * dg -
                          std::pow(t[k], -beta) * std::exp(profile.u[k]);
    if (std::abs(defect) > worst) {
      worst = std::abs(defect);
      worst_t = t[k];
    }
  };
  if (uniform) {
    for (int k = lo + 2; k + 2 < n; ++k)
      consider(k, (g[k - 2] - 8.0 * g[k - 1] + 8.0 * g[k + 1] - g[k + 2]) / (12.0 * dt0));
  } else {
    for (int k = lo + 1; k + 1 < n; ++k) {
      const double h1 = t[k] - t[k - 1], h2 = t[k + 1] - t[k];
      const double dg = -h2 / (h1 * (h1 + h2)) * g[k - 1] + (h2 - h1) / (h1 * h2) * g[k] +
                        h1 / (h2 * (h1 + h2)) * g[k + 1];
      consider(k, dg);
    }
  }

  CheckReport rep = make_check("radial_operator_defect", worst, 0.0, tol);
  rep.details["worst_t"] = worst_t;
  rep.details["uniform_grid"] = uniform;
  return rep;
}

void emit_profile(const RadialProfile& profile, const std::string& path) {
  std::vector<std::vector<double>> rows;
  rows.reserve(profile.t.size());
  for (std::size_t i = 0; i < profile.t.size(); ++i)
    rows.push_back({profile.t[i], profile.u[i], profile.minus_du[i], profile.g[i]});
  write_csv(path, {"t", "u", "minus_du", "g"}, rows);
}

void emit_profile(const AsymptoticsReport& report, const std::string& path) {
  std::vector<std::vector<double>> rows;
  rows.reserve(report.radii.size());
  for (std::size_t i = 0; i < report.radii.size(); ++i)
    rows.push_back({report.radii[i], report.H_values[i], report.grad_decay[i].second});
  write_csv(path, {"t", "H", "grad_decay"}, rows);
}

}  // namespace finsler
