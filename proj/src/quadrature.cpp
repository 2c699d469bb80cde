#include "finsler/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace finsler {

namespace {

constexpr double kPi = std::numbers::pi;

struct Rule {
  std::vector<double> x, w;
};

const Rule& cached_rule(int n) {
  static std::map<int, Rule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Rule r;
  gauss_legendre(n, r.x, r.w);
  return cache.emplace(n, std::move(r)).first->second;
}

double gl_panel(const std::function<double(double)>& f, double a, double b, const Rule& r) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0;
  for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(c + h * r.x[i]);
  return s * h;
}

double adaptive_rec(const std::function<double(double)>& f, double a, double b, double whole,
                    double tol, int depth, int max_depth, const Rule& r) {
  const double m = 0.5 * (a + b);
  const double left = gl_panel(f, a, m, r);
  const double right = gl_panel(f, m, b, r);
  const double err = std::abs(left + right - whole);
  if (err <= tol || depth >= max_depth) {
    if (depth >= max_depth && err > 64.0 * tol)
      throw AccuracyError("adaptive_integrate: refinement limit reached before tolerance");
    return left + right;
  }
  return adaptive_rec(f, a, m, left, 0.5 * tol, depth + 1, max_depth, r) +
         adaptive_rec(f, m, b, right, 0.5 * tol, depth + 1, max_depth, r);
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  // Newton iteration on P_n with the usual Chebyshev-like initial guess.
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int order) {
  return gl_panel(f, a, b, cached_rule(order));
}

double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  const Rule& r = cached_rule(15);
  const double coarse = gl_panel(f, a, b, r);
  const double scale = std::max(std::abs(coarse), 1e-30);
  const double tol = std::max(abs_tol, rel_tol * scale);
  return adaptive_rec(f, a, b, coarse, tol, 0, max_depth, r);
}

std::vector<Vec> circle_directions(int m) {
  std::vector<Vec> dirs;
  dirs.reserve(m);
  const double golden = 0.6180339887498949;
  for (int i = 0; i < m; ++i) {
    const double theta = 2.0 * kPi * (i + golden) / m;
    dirs.push_back(angle_to_dir(theta));
  }
  return dirs;
}

void circle_rule(int total_nodes, std::vector<double>& angles, std::vector<double>& weights) {
  // Panels are graded dyadically toward the quadrant boundaries: lp gauges
  // and their normals have algebraic kinks exactly on the axes, and geometric
  // grading keeps every panel analytic at near-spectral accuracy. Smooth
  // integrands are unaffected.
  const int per_panel = 16;
  int levels = std::max(4, total_nodes / (8 * per_panel));  // panels per quadrant = 2*levels
  const Rule& r = cached_rule(per_panel);
  angles.clear();
  weights.clear();
  std::vector<double> edges;  // within [0, 1], two-sided dyadic grading
  edges.push_back(0.0);
  for (int k = levels - 1; k >= 1; --k) edges.push_back(std::ldexp(1.0, -k - 1));
  edges.push_back(0.5);
  for (int k = 1; k <= levels - 1; ++k) edges.push_back(1.0 - std::ldexp(1.0, -k - 1));
  edges.push_back(1.0);
  for (int quadrant = 0; quadrant < 4; ++quadrant) {
    const double base = 0.5 * kPi * quadrant;
    for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
      const double a = base + 0.5 * kPi * edges[s];
      const double b = base + 0.5 * kPi * edges[s + 1];
      const double c = 0.5 * (a + b), h = 0.5 * (b - a);
      for (int i = 0; i < per_panel; ++i) {
        angles.push_back(c + h * r.x[i]);
        weights.push_back(h * r.w[i]);
      }
    }
  }
}

Vec fibonacci_point(int i, int m) {
  const double ga = kPi * (3.0 - std::sqrt(5.0));
  const double z = 1.0 - (2.0 * i + 1.0) / m;
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = ga * (i + 0.5);  // offset keeps points off the coordinate planes
  return Vec{rho * std::cos(phi), rho * std::sin(phi), z};
}

std::vector<Vec> fibonacci_sphere(int m) {
  std::vector<Vec> pts;
  pts.reserve(m);
  for (int i = 0; i < m; ++i) pts.push_back(fibonacci_point(i, m));
  return pts;
}

SphereRule sphere_product_rule(int resolution) {
  int n_polar = std::max(8, static_cast<int>(std::lround(std::sqrt(resolution / 2.0))));
  const int n_azim = 2 * n_polar;
  std::vector<double> z, wz;
  gauss_legendre(n_polar, z, wz);
  SphereRule rule;
  rule.dirs.reserve(static_cast<std::size_t>(n_polar) * n_azim);
  rule.weights.reserve(rule.dirs.capacity());
  const double golden = 0.6180339887498949;
  for (int i = 0; i < n_polar; ++i) {
    const double rho = std::sqrt(std::max(0.0, 1.0 - z[i] * z[i]));
    for (int j = 0; j < n_azim; ++j) {
      const double phi = 2.0 * kPi * (j + golden) / n_azim;
      rule.dirs.push_back(Vec{rho * std::cos(phi), rho * std::sin(phi), z[i]});
      rule.weights.push_back(wz[i] * 2.0 * kPi / n_azim);
    }
  }
  return rule;
}

double golden_section_max(const std::function<double(double)>& f, double a, double b,
                          double tol) {
  const double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace finsler
