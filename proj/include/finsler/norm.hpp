#ifndef FINSLER_NORM_HPP
#define FINSLER_NORM_HPP

#include <cstdint>
#include <string>
#include <utility>

#include "finsler/linalg.hpp"
#include "finsler/report.hpp"

namespace finsler {

enum class NormFamily { euclidean, lp, quadratic, shifted };

std::string family_name(NormFamily f);

// A convex, positively 1-homogeneous gauge F on R^N together with its polar
// F° and the reversed pair F-hat, F-hat°. The supported families are a closed
// list; each carries closed forms for evaluation, gradient and polar.
//
// Values are immutable after construction and safe to share across threads.
class NormModel {
 public:
  static NormModel euclidean(int dim);
  static NormModel lp(int dim, double p);
  static NormModel quadratic(const Mat& a);
  static NormModel shifted(const Vec& a);

  int dim() const { return dim_; }
  NormFamily family() const { return family_; }
  double lp_exponent() const { return p_; }
  const Vec& shift() const { return a_; }
  const Mat& matrix() const { return A_; }

  /// Lower/upper gauge bounds: alpha |x| <= F(x) <= eta |x|, estimated on the
  /// Euclidean unit sphere at construction.
  double alpha() const { return alpha_; }
  double eta() const { return eta_; }

  /// F(x). Throws std::invalid_argument on non-finite input.
  double eval(const Vec& x) const;
  /// DF(x), 0-homogeneous; throws std::domain_error near the origin.
  Vec grad(const Vec& x) const;
  /// F°(x) = sup <x,xi>/F(xi), by the family closed form.
  double polar(const Vec& x) const;
  /// Gradient of F°.
  Vec polar_grad(const Vec& x) const;

  /// Model of x -> F(-x). Involution; identity for the symmetric families.
  NormModel reversed() const;

  // Reversed-pair evaluations (paper notation F-hat, F-hat°).
  double hat(const Vec& xi) const { return eval(-xi); }
  Vec hat_grad(const Vec& xi) const { return -grad(-xi); }
  double hat_polar(const Vec& x) const { return polar(-x); }
  Vec hat_polar_grad(const Vec& x) const { return -polar_grad(-x); }

  /// (min, max) of F on the Euclidean unit sphere: quasi-uniform sampling plus
  /// local refinement. samples must be >= 2*dim.
  std::pair<double, double> estimate_bounds(int samples) const;

  /// F°(x) by dense directional search + local refinement. Fallback/oracle
  /// path, independent of the closed forms.
  double polar_via_search(const Vec& x) const;
  /// Biconjugate (F°)°(x) with the inner polar in closed form and the outer
  /// by search. Equals F(x) for convex gauges.
  double polar_polar_via_search(const Vec& x) const;

  bool same_values(const NormModel& o, int samples, double tol) const;

 private:
  NormModel() = default;
  void validate_and_finish();

  NormFamily family_ = NormFamily::euclidean;
  int dim_ = 0;
  double p_ = 2.0;   // lp only
  double q_ = 2.0;   // conjugate exponent, lp only
  Vec a_;            // shifted only
  double a_norm2_ = 0.0;
  Mat A_, A_inv_;    // quadratic only
  double alpha_ = 1.0, eta_ = 1.0;
};

/// Reads a norm configuration: JSON ({"family": ..., "dimension": ...}) or
/// key=value lines. Keys: family, dimension, p (lp), a (shifted),
/// matrix (quadratic, row-major).
NormModel load_norm_config(const std::string& path);
NormModel parse_norm_config(const std::string& text);

/// Checks Lemma-style structural properties of F and F° on random samples:
/// triangle inequality, Euler identities <x,DF(x)> = F(x), the duality
/// normalizations F(DF°(x)) = F°(DF(x)) = 1, the inversion
/// F°(x) DF(DF°(x)) = x, 0-homogeneity of DF, and the polar involution via
/// grid biconjugation. Gradient-magnitude bounds are measured and reported
/// (the constant is not asserted).
CheckReport verify_norm_properties(const NormModel& model, int samples, double tol,
                                   std::uint64_t seed = 20240901u);

}  // namespace finsler

#endif
