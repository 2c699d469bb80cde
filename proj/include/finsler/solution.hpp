#ifndef FINSLER_SOLUTION_HPP
#define FINSLER_SOLUTION_HPP

#include <optional>
#include <vector>

#include "finsler/norm.hpp"

namespace finsler {

// One member of the classified family
//   u(x) = log( (N/(N-1))^{N-1} (N-beta)^N lambda^N
//               / [1 + lambda^{N/(N-1)} F-hat°(x)^{(N-beta)/(N-1)}]^N ).
// beta = 0 is accepted as the classical (unweighted) diagnostic case.
struct SolutionParams {
  SolutionParams(NormModel norm_, double beta_, double lambda_);

  NormModel norm;
  int dim;
  double beta;
  double lambda;

  double q() const { return dim / (dim - 1.0); }                   // N/(N-1)
  double q_prime() const { return (dim - beta) / (dim - 1.0); }    // (N-beta)/(N-1)
  double amplitude() const;                                        // (N/(N-1))^{N-1} (N-beta)^N
  double gamma0_exact() const { return dim * (dim - beta) / (dim - 1.0); }
  double peak_value() const;                                       // u(0)
};

/// Radial profile u(t) at gauge radius t = F-hat°(x).
double u_of_t(const SolutionParams& p, double t);
/// du/dt of the radial profile (t > 0).
double du_dt(const SolutionParams& p, double t);
/// u(t) + gamma0 log t, assembled without cancellation so the limit is exact
/// to roundoff even at t ~ 1e6.
double H_of_t(const SolutionParams& p, double t);
double H_limit(const SolutionParams& p);

double eval_u(const SolutionParams& p, const Vec& x);
/// Chain rule through the gauge: u'(t) * grad F-hat°(x). Throws
/// std::domain_error at the origin.
Vec eval_grad_u(const SolutionParams& p, const Vec& x);

enum class MassMethod { radial_1d, full_nd };

/// Total weighted mass: integral of F-hat°(x)^{-beta} e^u.
/// radial_1d integrates the gauge-radial profile (with an analytic power-law
/// tail); full_nd sums dyadic box shells in the ambient space, truncated when
/// the analytic tail bound drops below 1e-4 of the running total.
double mass(const SolutionParams& p, MassMethod method);

/// (mass / (N kappa_N))^{1/(N-1)}; equals N(N-beta)/(N-1) for the family.
double gamma0(const SolutionParams& p);

struct AsymptoticsReport {
  double gamma_measured = 0;  // slope of -u against log t
  double gamma_expected = 0;
  double H_inf = 0;
  double sandwich_d = 0;  // measured d with (1/d) log t <= sup u - u <= d log t
  std::vector<double> radii;
  std::vector<double> H_values;
  std::vector<std::pair<double, double>> grad_decay;  // (t, t*F(grad(u + gamma0 log F-hat°)))
};

void to_json(nlohmann::json& j, const AsymptoticsReport& r);

/// Measures the log-slope of -u, the boundedness of H, and the decay of
/// t*F(grad(u + gamma0 log F-hat°)) on the given radii (increasing, min > 1).
AsymptoticsReport asymptotics_check(const SolutionParams& p, const std::vector<double>& radii);

/// Radius R with {u > level} = W_R; 0 when level == u(0); empty beyond the peak.
std::optional<double> level_set_radius(const SolutionParams& p, double level);

}  // namespace finsler

#endif
