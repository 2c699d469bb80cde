#include "finsler/wulff.hpp"

#include <cmath>
#include <functional>
#include <memory>

#include "finsler/quadrature.hpp"

namespace finsler {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// Trigonometric interpolation of periodic samples on a uniform grid.
struct FourierSeries {
  std::vector<double> a, b;  // cos/sin coefficients
  int m = 0;

  explicit FourierSeries(const std::vector<double>& samples) {
    m = static_cast<int>(samples.size());
    const int half = m / 2;
    a.assign(half + 1, 0.0);
    b.assign(half + 1, 0.0);
    for (int k = 0; k <= half; ++k) {
      double ca = 0, cb = 0;
      for (int j = 0; j < m; ++j) {
        const double th = kTwoPi * k * j / m;
        ca += samples[j] * std::cos(th);
        cb += samples[j] * std::sin(th);
      }
      const double scale = (k == 0 || (2 * k == m)) ? 1.0 / m : 2.0 / m;
      a[k] = ca * scale;
      b[k] = cb * scale;
    }
  }
  double eval(double theta) const {
    double s = a[0];
    for (std::size_t k = 1; k < a.size(); ++k)
      s += a[k] * std::cos(k * theta) + b[k] * std::sin(k * theta);
    return s;
  }
  double deriv(double theta) const {
    double s = 0;
    for (std::size_t k = 1; k < a.size(); ++k)
      s += k * (-a[k] * std::sin(k * theta) + b[k] * std::cos(k * theta));
    return s;
  }
};

// Boundary distance from the origin along direction omega for an off-center
// Wulff ball: the positive root of F-hat°(rho*omega - c) = R (unique since
// the gauge is convex and the origin is interior).
double offcenter_wulff_radius(const NormModel& norm, const Vec& center, double radius,
                              const Vec& omega) {
  double lo = 0.0, hi = radius + 2.0 * norm.hat_polar(-center) + 1.0;
  while (norm.hat_polar(hi * omega - center) < radius) hi *= 2.0;
  for (int it = 0; it < 90; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (norm.hat_polar(mid * omega - center) < radius)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct RadialShape {
  std::function<double(const Vec&)> rho;      // boundary distance along omega
  std::function<Vec(const Vec&)> normal_at;   // outward unit normal at x
};

RadialShape make_radial_shape(const DomainSpec& d, const NormModel& norm) {
  const int n = norm.dim();
  switch (d.kind) {
    case DomainSpec::Kind::wulff_ball: {
      const Vec c = d.center.size() ? d.center : Vec(n);
      const bool centered = norm2(c) == 0.0;
      if (!centered && !(norm.hat_polar(-c) < d.radius))
        throw std::runtime_error("DomainSpec: origin is not interior to the Wulff ball");
      const double r = d.radius;
      return RadialShape{
          [&norm, c, r, centered](const Vec& w) {
            return centered ? r / norm.hat_polar(w) : offcenter_wulff_radius(norm, c, r, w);
          },
          [&norm, c](const Vec& x) {
            Vec g = norm.hat_polar_grad(x - c);
            return (1.0 / norm2(g)) * g;
          }};
    }
    case DomainSpec::Kind::ellipse: {
      const Vec ax = d.semi_axes;
      if (ax.size() != n) throw std::invalid_argument("DomainSpec: semi-axes dimension mismatch");
      return RadialShape{[ax](const Vec& w) {
                           double s = 0;
                           for (int i = 0; i < w.size(); ++i) s += w[i] * w[i] / (ax[i] * ax[i]);
                           return 1.0 / std::sqrt(s);
                         },
                         [ax](const Vec& x) {
                           Vec g(x.size());
                           for (int i = 0; i < x.size(); ++i) g[i] = x[i] / (ax[i] * ax[i]);
                           return (1.0 / norm2(g)) * g;
                         }};
    }
    default:
      throw std::invalid_argument("make_radial_shape: unsupported kind");
  }
}

SurfaceQuadrature radial_surface_2d(const std::function<double(double)>& rho_theta,
                                    const std::function<Vec(double, const Vec&)>& normal,
                                    int resolution) {
  std::vector<double> angles, w;
  circle_rule(resolution, angles, w);
  SurfaceQuadrature q;
  q.nodes.reserve(angles.size());
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const Vec omega = angle_to_dir(angles[i]);
    const double r = rho_theta(angles[i]);
    const Vec x = r * omega;
    const Vec nu = normal(angles[i], x);
    const double cosang = dot(omega, nu);
    if (!(cosang > 0))
      throw std::runtime_error("surface quadrature: domain is not star-shaped about the origin");
    q.nodes.push_back(x);
    q.weights.push_back(w[i] * r / cosang);  // dsigma = rho^{N-1}/<omega,nu> domega
    q.normals.push_back(nu);
  }
  return q;
}

SurfaceQuadrature radial_surface_nd(const RadialShape& shape, int dim, int resolution) {
  if (dim != 3) throw std::invalid_argument("surface quadrature: dimension must be 2 or 3");
  SurfaceQuadrature q;
  const SphereRule rule = sphere_product_rule(resolution);
  for (std::size_t k = 0; k < rule.dirs.size(); ++k) {
    const Vec& omega = rule.dirs[k];
    const double r = shape.rho(omega);
    const Vec x = r * omega;
    const Vec nu = shape.normal_at(x);
    const double cosang = dot(omega, nu);
    if (!(cosang > 0))
      throw std::runtime_error("surface quadrature: domain is not star-shaped about the origin");
    q.nodes.push_back(x);
    q.weights.push_back(rule.weights[k] * r * r / cosang);
    q.normals.push_back(nu);
  }
  return q;
}

double sphere_integral(const NormModel& norm, const std::function<double(const Vec&)>& f,
                       double rel_tol) {
  if (norm.dim() == 2) {
    return adaptive_integrate([&](double th) { return f(angle_to_dir(th)); }, 0.0, kTwoPi,
                              rel_tol);
  }
  if (norm.dim() == 3) {
    double prev = 0;
    for (int m = 2048; m <= (1 << 22); m *= 4) {
      const SphereRule rule = sphere_product_rule(m);
      double s = 0;
      for (std::size_t i = 0; i < rule.dirs.size(); ++i) s += rule.weights[i] * f(rule.dirs[i]);
      if (m > 2048 && std::abs(s - prev) <= rel_tol * std::abs(s)) return s;
      prev = s;
    }
    throw AccuracyError("sphere_integral: refinement did not stabilize");
  }
  throw std::invalid_argument("sphere_integral: dimension must be 2 or 3");
}

void check_beta(double beta, int n) {
  if (!(beta >= 0.0) || !(beta < n))
    throw std::invalid_argument("beta must lie in [0, N) (the weighted integral diverges at N)");
}

}  // namespace

DomainSpec DomainSpec::wulff_ball(double r, const Vec& center_) {
  if (!(r > 0)) throw std::invalid_argument("DomainSpec: radius must be positive");
  DomainSpec d;
  d.kind = Kind::wulff_ball;
  d.radius = r;
  d.center = center_;
  return d;
}

DomainSpec DomainSpec::annulus(double r_in, double r_out) {
  if (!(0 < r_in && r_in < r_out))
    throw std::invalid_argument("DomainSpec: annulus needs 0 < r_in < r_out");
  DomainSpec d;
  d.kind = Kind::annulus;
  d.r_in = r_in;
  d.r_out = r_out;
  return d;
}

DomainSpec DomainSpec::ellipse(const Vec& semi_axes) {
  for (int i = 0; i < semi_axes.size(); ++i)
    if (!(semi_axes[i] > 0)) throw std::invalid_argument("DomainSpec: semi-axes must be positive");
  DomainSpec d;
  d.kind = Kind::ellipse;
  d.semi_axes = semi_axes;
  return d;
}

DomainSpec DomainSpec::star(std::vector<double> rho_samples) {
  if (rho_samples.size() < 8) throw std::invalid_argument("DomainSpec: star needs >= 8 samples");
  for (double r : rho_samples)
    if (!(r > 0)) throw std::invalid_argument("DomainSpec: star radial function must be positive");
  DomainSpec d;
  d.kind = Kind::star;
  d.star_rho = std::move(rho_samples);
  return d;
}

double SurfaceQuadrature::total_weight() const {
  double s = 0;
  for (double w : weights) s += w;
  return s;
}

double SurfaceQuadrature::divergence_closure() const {
  if (nodes.empty()) return 0.0;
  const int n = nodes[0].size();
  double worst = 0;
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (std::size_t k = 0; k < nodes.size(); ++k) s += weights[k] * normals[k][i];
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

SurfaceQuadrature build_wulff_sphere_quadrature(const NormModel& norm, double r, int resolution,
                                                bool outward_normals) {
  DomainSpec ball = DomainSpec::wulff_ball(r, Vec(norm.dim()));
  RadialShape shape = make_radial_shape(ball, norm);
  SurfaceQuadrature q =
      norm.dim() == 2
          ? radial_surface_2d([&](double th) { return shape.rho(angle_to_dir(th)); },
                              [&](double, const Vec& x) { return shape.normal_at(x); }, resolution)
          : radial_surface_nd(shape, norm.dim(), resolution);
  if (!outward_normals)
    for (Vec& nu : q.normals) nu = -nu;
  return q;
}

SurfaceQuadrature build_surface_quadrature(const DomainSpec& domain, const NormModel& norm,
                                           int resolution) {
  const int n = norm.dim();
  switch (domain.kind) {
    case DomainSpec::Kind::annulus: {
      SurfaceQuadrature outer = build_wulff_sphere_quadrature(norm, domain.r_out, resolution);
      SurfaceQuadrature inner =
          build_wulff_sphere_quadrature(norm, domain.r_in, resolution, /*outward=*/false);
      outer.nodes.insert(outer.nodes.end(), inner.nodes.begin(), inner.nodes.end());
      outer.weights.insert(outer.weights.end(), inner.weights.begin(), inner.weights.end());
      outer.normals.insert(outer.normals.end(), inner.normals.begin(), inner.normals.end());
      return outer;
    }
    case DomainSpec::Kind::star: {
      if (n != 2) throw std::invalid_argument("star domains are 2D");
      FourierSeries rho(domain.star_rho);
      return radial_surface_2d(
          [&](double th) { return rho.eval(th); },
          [&](double th, const Vec&) {
            // outward normal from the boundary tangent (rho' w + rho w')
            const double r = rho.eval(th), dr = rho.deriv(th);
            const double c = std::cos(th), s = std::sin(th);
            Vec tangent{dr * c - r * s, dr * s + r * c};
            Vec nu{tangent[1], -tangent[0]};
            nu *= 1.0 / norm2(nu);
            if (nu[0] * c + nu[1] * s < 0) nu = -nu;
            return nu;
          },
          resolution);
    }
    default: {
      RadialShape shape = make_radial_shape(domain, norm);
      return n == 2 ? radial_surface_2d(
                          [&](double th) { return shape.rho(angle_to_dir(th)); },
                          [&](double, const Vec& x) { return shape.normal_at(x); }, resolution)
                    : radial_surface_nd(shape, n, resolution);
    }
  }
}

double wulff_volume(const NormModel& norm, double rel_tol) {
  const int n = norm.dim();
  return sphere_integral(
             norm, [&](const Vec& w) { return std::pow(norm.hat_polar(w), -n); }, rel_tol) /
         n;
}

double weighted_volume(const DomainSpec& domain, const NormModel& norm, double beta) {
  const int n = norm.dim();
  check_beta(beta, n);
  const double power = n - beta;

  const bool origin_centered_ball =
      domain.kind == DomainSpec::Kind::wulff_ball &&
      (domain.center.size() == 0 || norm2(domain.center) == 0.0);
  if (origin_centered_ball || domain.kind == DomainSpec::Kind::annulus) {
    // Radial reduction in the gauge: |{F-hat° <= t}| = kappa t^N.
    const double kap = wulff_volume(norm);
    const double r_out = origin_centered_ball ? domain.radius : domain.r_out;
    const double r_in = origin_centered_ball ? 0.0 : domain.r_in;
    return n * kap * (std::pow(r_out, power) - std::pow(r_in, power)) / power;
  }

  std::function<double(const Vec&)> rho;
  if (domain.kind == DomainSpec::Kind::star) {
    if (n != 2) throw std::invalid_argument("star domains are 2D");
    auto series = std::make_shared<FourierSeries>(domain.star_rho);
    rho = [series](const Vec& w) { return series->eval(std::atan2(w[1], w[0])); };
  } else {
    auto shape = std::make_shared<RadialShape>(make_radial_shape(domain, norm));
    rho = [shape](const Vec& w) { return shape->rho(w); };
  }
  // The gauge weight is an exact power law along each ray from the origin.
  return sphere_integral(
      norm,
      [&](const Vec& w) {
        return std::pow(norm.hat_polar(w), -beta) * std::pow(rho(w), power) / power;
      },
      n == 2 ? 1e-11 : 1e-9);
}

double weighted_perimeter(const DomainSpec& domain, const NormModel& norm, double beta) {
  const int n = norm.dim();
  check_beta(beta, n);
  const double exponent = -(n - 1.0) * beta / n;
  double prev = 0;
  int res = domain.resolution;
  for (int pass = 0; pass < 8; ++pass, res *= 2) {
    const SurfaceQuadrature q = build_surface_quadrature(domain, norm, res);
    double s = 0;
    for (std::size_t k = 0; k < q.nodes.size(); ++k) {
      const double t = norm.hat_polar(q.nodes[k]);
      if (norm2(q.nodes[k]) < 1e-8)
        throw std::runtime_error("weighted_perimeter: boundary touches the origin");
      s += q.weights[k] * std::pow(t, exponent) * norm.hat(q.normals[k]);
    }
    if (pass > 0 && std::abs(s - prev) <= 1e-6 * std::abs(s)) return s;
    prev = s;
  }
  throw AccuracyError("weighted_perimeter: refinement did not stabilize");
}

double isoperimetric_bound(const NormModel& norm, int dim, double beta) {
  const double kap = wulff_volume(norm);
  return std::pow(dim * kap, 1.0 / dim) * std::pow(dim - beta, (dim - 1.0) / dim);
}

CheckReport isoperimetric_quotient(const DomainSpec& domain, const NormModel& norm, double beta,
                                   double tol) {
  const int n = norm.dim();
  check_beta(beta, n);
  const double per = weighted_perimeter(domain, norm, beta);
  const double vol = weighted_volume(domain, norm, beta);
  const double quotient = per / std::pow(vol, (n - 1.0) / n);
  const double bound = isoperimetric_bound(norm, n, beta);
  const double slack = quotient - bound;

  CheckReport rep;
  rep.name = "isoperimetric_quotient";
  rep.computed = quotient;
  rep.reference = bound;
  rep.tolerance = tol;
  rep.residual = slack;
  rep.pass = slack >= -tol;
  rep.details["weighted_perimeter"] = per;
  rep.details["weighted_volume"] = vol;
  rep.details["beta"] = beta;
  if (beta == 0.0) rep.details["diagnostic_beta_zero"] = true;  // outside the (0,N) statement
  return rep;
}

double unit_box_gauge_weight(const NormModel& norm, double beta) {
  const int n = norm.dim();
  check_beta(beta, n);
  const double power = n - beta;
  return sphere_integral(
      norm,
      [&](const Vec& w) {
        double sup = 0;
        for (int i = 0; i < n; ++i) sup = std::max(sup, std::abs(w[i]));
        return std::pow(norm.hat_polar(w), -beta) / (std::pow(sup, power) * power);
      },
      n == 2 ? 1e-10 : 1e-6);
}

// ---------------------------------------------------------------------------
// independent 2D cell quadrature (cross-check path)

namespace {

struct CellIntegrator {
  const NormModel& norm;
  double beta;
  std::function<double(const Vec&)> rho;  // radial boundary distance
  double eps;                             // excised origin disc radius
  double min_size;

  bool inside(const Vec& x) const {
    const double r = norm2(x);
    if (r <= 1e-300) return true;
    return r <= rho((1.0 / r) * x);
  }
  double weight(const Vec& x) const { return std::pow(norm.hat_polar(x), -beta); }

  double cell(double x0, double y0, double size, int depth) const {
    const Vec corners[4] = {Vec{x0, y0}, Vec{x0 + size, y0}, Vec{x0, y0 + size},
                            Vec{x0 + size, y0 + size}};
    int in_count = 0;
    double min_r = 1e300;
    for (const Vec& c : corners) {
      if (inside(c)) ++in_count;
      min_r = std::min(min_r, norm2(c));
    }
    const bool near_origin = min_r < eps + size * 1.5;
    if (in_count == 0 && !near_origin) {
      const Vec mid{x0 + 0.5 * size, y0 + 0.5 * size};
      if (!inside(mid)) return 0.0;
    }
    if ((in_count < 4 || near_origin) && size > min_size)
      return cell(x0, y0, 0.5 * size, depth + 1) + cell(x0 + 0.5 * size, y0, 0.5 * size, depth + 1) +
             cell(x0, y0 + 0.5 * size, 0.5 * size, depth + 1) +
             cell(x0 + 0.5 * size, y0 + 0.5 * size, 0.5 * size, depth + 1);
    if (in_count == 4 && !near_origin) {
      // smooth interior cell: 3x3 tensor GL
      static const double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
      static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
      double s = 0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const Vec p{x0 + 0.5 * size * (1 + gx[i]), y0 + 0.5 * size * (1 + gx[j])};
          s += gw[i] * gw[j] * weight(p);
        }
      return s * size * size / 4.0;
    }
    // finest partial cell: midpoint with indicator, excluding the origin disc
    const Vec mid{x0 + 0.5 * size, y0 + 0.5 * size};
    if (norm2(mid) < eps || !inside(mid)) return 0.0;
    return weight(mid) * size * size;
  }
};

}  // namespace

double weighted_volume_cells2d(const DomainSpec& domain, const NormModel& norm, double beta) {
  if (norm.dim() != 2) throw std::invalid_argument("weighted_volume_cells2d: 2D only");
  check_beta(beta, 2);

  std::function<double(const Vec&)> rho;
  if (domain.kind == DomainSpec::Kind::star) {
    auto series = std::make_shared<FourierSeries>(domain.star_rho);
    rho = [series](const Vec& w) { return series->eval(std::atan2(w[1], w[0])); };
  } else if (domain.kind == DomainSpec::Kind::annulus) {
    throw std::invalid_argument("weighted_volume_cells2d: annuli use the radial closed form");
  } else {
    auto shape = std::make_shared<RadialShape>(make_radial_shape(domain, norm));
    rho = [shape](const Vec& w) { return shape->rho(w); };
  }

  double r_max = 0;
  for (int i = 0; i < 512; ++i)
    r_max = std::max(r_max, rho(angle_to_dir(kTwoPi * (i + 0.5) / 512)));
  const double L = 1.001 * r_max;

  CellIntegrator ci{norm, beta, rho, 1e-4, L / 8192.0};
  double total = ci.cell(-L, -L, 2.0 * L, 0);

  // Excised disc: the weight is exactly a power law, integrate it radially in
  // closed form against an angular GL rule.
  const double ang = adaptive_integrate(
      [&](double th) { return std::pow(norm.hat_polar(angle_to_dir(th)), -beta); }, 0.0, kTwoPi,
      1e-10);
  total += ang * std::pow(ci.eps, 2.0 - beta) / (2.0 - beta);
  return total;
}

}  // namespace finsler
