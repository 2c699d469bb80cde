#ifndef FINSLER_OPERATORS_HPP
#define FINSLER_OPERATORS_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "finsler/report.hpp"
#include "finsler/solution.hpp"

namespace finsler {

/// Nonlinear flux A(X) = F^{N-1}(X) DF(X) whose divergence is Q_N.
/// (N-1)-homogeneous; A(0) = 0 by continuous extension.
struct FluxField {
  NormModel norm;
  int exponent;  // N

  Vec flux(const Vec& x) const;
};

struct ResidualReport {
  std::vector<Vec> points;
  std::vector<double> residuals;
  double max_abs = 0;
  double max_rel = 0;  // max |residual| / max |source| over the sample
  double fd_step = 0;
};

void to_json(nlohmann::json& j, const ResidualReport& r);

/// div A(grad u) + source at each point, with the divergence from a staggered
/// flux stencil (component i differenced between x +- (h/2) e_i) on analytic
/// gradients. Residuals vanish to O(h^2) when -Q_N u = source.
ResidualReport qN_residual_field(const std::function<Vec(const Vec&)>& grad_u,
                                 const std::function<double(const Vec&)>& source,
                                 const NormModel& norm, int exponent,
                                 const std::vector<Vec>& points, double h);

/// Same stencil applied to the classified solution with its own right-hand
/// side F-hat°(x)^{-beta} e^u.
ResidualReport qN_residual(const SolutionParams& params, const std::vector<Vec>& points, double h);

/// Seeded sample of points with gauge radius F-hat°(x) uniform in [t_min, t_max].
std::vector<Vec> annulus_points(const NormModel& norm, double t_min, double t_max, int count,
                                std::uint64_t seed = 7u);

/// Uniform 2D grid of samples; evaluation produces NaN on the boundary ring.
struct GridField2D {
  int nx = 0, ny = 0;
  double x0 = 0, y0 = 0, h = 0;
  std::vector<double> values;

  GridField2D() = default;
  GridField2D(int nx_, int ny_, double x0_, double y0_, double h_)
      : nx(nx_), ny(ny_), x0(x0_), y0(y0_), h(h_), values(static_cast<std::size_t>(nx_) * ny_) {}
  double& at(int i, int j) { return values[static_cast<std::size_t>(j) * nx + i]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
  Vec point(int i, int j) const { return Vec{x0 + i * h, y0 + j * h}; }
};

/// Fully discrete Q_N on a grid field: centered-difference gradients at the
/// staggered half points, then flux divergence. Interior points only.
GridField2D qN_fd(const GridField2D& u, const NormModel& norm, int exponent);

/// Solution of the gauge-radial initial value problem
///   g'(t) = t^{N-1-beta} e^u,  -u'(t) = (g / t^{N-1})^{1/(N-1)},
///   g(0) = 0, u(0) = u0,
/// tabulated on a grid. g stores the radial flux t^{N-1}(-u')^{N-1}.
struct RadialProfile {
  int dim = 2;
  double beta = 0;
  std::vector<double> t, u, minus_du, g;
};

/// Adaptive embedded Runge-Kutta integration in the variable tau = t^{q'}
/// (q' = (N-beta)/(N-1)), where the family is analytic, with a series startup
/// near tau = 0. An empty grid selects a default log-spaced grid plus t = 0.
RadialProfile radial_shoot(int dim, double beta, double u0, double t_max, double tol,
                           std::vector<double> grid = {});

/// Recomputes t^{1-N} dg/dt - t^{-beta} e^u by differencing the stored flux
/// (5-point stencil on uniform grids, 3-point otherwise) and reports the
/// largest defect. Validates profiles independently of the integrator.
CheckReport radial_operator_check(const RadialProfile& profile, double beta, double tol = 1e-5);

/// CSV columns t,u,minus_du,g; byte-identical across runs for fixed inputs.
void emit_profile(const RadialProfile& profile, const std::string& path);
/// CSV columns t,H,grad_decay.
void emit_profile(const AsymptoticsReport& report, const std::string& path);

}  // namespace finsler

#endif
