#ifndef FINSLER_IDENTITIES_HPP
#define FINSLER_IDENTITIES_HPP

#include <cstdint>
#include <vector>

#include "finsler/report.hpp"
#include "finsler/solution.hpp"

namespace finsler {

/// Both sides of the anisotropic Pohozaev identity on the Wulff annulus
/// W_r \ W_eps, for the classified solution.
struct PohozaevReport {
  double volume_term = 0;        // (N-beta) * (weighted e^u integral - weighted volume)
  double boundary_eu = 0;        //   integral of F-hat°^{-beta} e^u <x,nu>
  double boundary_weight = 0;    // - integral of F-hat°^{-beta} <x,nu>
  double boundary_fn = 0;        // - (1/N) integral of F^N(grad u) <x,nu>
  double boundary_flux_pair = 0; //   integral of F^{N-1} <DF,nu> <x,grad u>
  double defect = 0;             // volume term minus the boundary sum
  double relative_defect = 0;    // against the largest term magnitude
};

void to_json(nlohmann::json& j, const PohozaevReport& r);

PohozaevReport pohozaev_check(const SolutionParams& params, double r, double eps,
                              int resolution = 2048);

/// Inner-boundary contributions on the Wulff sphere of radius eps (annulus
/// orientation): the e^u term, the F^N term, the flux-pairing term, and their
/// combination, which vanishes as eps -> 0.
struct PohozaevInnerTerms {
  double eu_term = 0;
  double fn_term = 0;
  double flux_pair_term = 0;
  double combined = 0;
};

PohozaevInnerTerms pohozaev_inner_terms(const SolutionParams& params, double eps,
                                        int resolution = 2048);

/// Outer combination -(r/N) * integral F^N/|grad F-hat°| + flux pairing term;
/// tends to (N-1) kappa_N gamma0^N as r grows.
double pohozaev_outer_combination(const SolutionParams& params, double r, int resolution = 2048);

/// Strong-monotonicity constants of the flux: d0 = inf d_{X,Y} with
///   d_{X,Y} = <A(X) - A(Y), X - Y> / F^N(X - Y),
/// estimated by scale-normalized sampling (F(X-Y) = 1) over directions and a
/// radial scale, refined by local descent. The estimate is an upper bound on
/// the true infimum.
struct MonotonicityConstants {
  double d0_estimate = 0;
  Vec witness_x, witness_y;
  double delta = 0;        // (N-beta) (N kappa)^{1/(N-1)} d0^{1/(N-1)}
  double lambda_beta = 0;  // (N kappa)^{1/N} (N-beta)^{(N-1)/N}
  double kappa = 0;
};

void to_json(nlohmann::json& j, const MonotonicityConstants& r);

MonotonicityConstants d0_estimate(const NormModel& norm, double beta, long trials = 200000,
                                  std::uint64_t seed = 20240902u);

/// Pointwise quotient d_{X,Y} (exponent = dimension of the norm).
double flux_monotonicity_quotient(const NormModel& norm, const Vec& x, const Vec& y);

/// mu_beta(t) = integral of F-hat°^{-beta} over the superlevel set {u > t},
/// via the level-set radius; nonincreasing in t.
struct LevelSetProfile {
  std::vector<double> thresholds;
  std::vector<double> mu_beta;
};

LevelSetProfile mu_beta_profile(const SolutionParams& params, const std::vector<double>& thresholds);

/// Radial instance of the weighted Brezis-Merle inequality on W_r, where the
/// harmonic comparison is the constant boundary value u(r): for each fraction
/// phi, lambda = phi * delta * ||f||^{-1/(N-1)} and the weighted exponential
/// integral must stay below the closed-form bound. phi = 0 gives equality
/// with the weighted volume.
CheckReport brezis_merle_radial_check(const SolutionParams& params, double r,
                                      const std::vector<double>& lambda_fracs);

/// Mass against the quantization constant N (N(N-beta)/(N-1))^{N-1} kappa_N;
/// equality within 1e-6 relative for the classified family.
CheckReport mass_lower_bound_check(const SolutionParams& params);

}  // namespace finsler

#endif
