#ifndef FINSLER_QUADRATURE_HPP
#define FINSLER_QUADRATURE_HPP

#include <functional>
#include <stdexcept>
#include <vector>

#include "finsler/linalg.hpp"

namespace finsler {

/// Raised when a quadrature or refinement loop fails to reach the requested
/// tolerance within its refinement budget.
class AccuracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Fixed-order Gauss-Legendre on [a, b].
double integrate_gl(const std::function<double(double)>& f, double a, double b, int order);

/// Adaptive bisection driven by a GL15 vs two-half-GL15 error estimate.
/// Copes with integrable endpoint singularities by recursing toward them.
double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-12, double abs_tol = 0.0, int max_depth = 60);

/// Equally weighted unit directions on the circle, golden-offset so samples
/// never align with the coordinate axes.
std::vector<Vec> circle_directions(int m);

/// Angular nodes/weights for composite GL panels over [0, 2pi) with panel
/// boundaries at multiples of pi/2 (lp gauges lose smoothness exactly there).
void circle_rule(int total_nodes, std::vector<double>& angles, std::vector<double>& weights);

/// Fibonacci lattice on S^2, equal weights 4pi/m. Good as a quasi-uniform
/// direction sampler; converges only ~O(1/m) as a quadrature.
std::vector<Vec> fibonacci_sphere(int m);
/// i-th point of the m-point Fibonacci lattice (streaming form).
Vec fibonacci_point(int i, int m);

/// Product rule on S^2: Gauss-Legendre in the polar cosine, offset trapezoid
/// in azimuth. Spectrally accurate for smooth integrands; weights sum to 4pi.
struct SphereRule {
  std::vector<Vec> dirs;
  std::vector<double> weights;
};
SphereRule sphere_product_rule(int resolution);

/// Golden-section maximizer of a unimodal-near-peak function on [a, b].
double golden_section_max(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-12);

inline Vec angle_to_dir(double theta) { return Vec{std::cos(theta), std::sin(theta)}; }

}  // namespace finsler

#endif
