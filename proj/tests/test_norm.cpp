#include <doctest.h>

#include <cmath>
#include <random>

#include "finsler/norm.hpp"
#include "finsler/quadrature.hpp"

using namespace finsler;

namespace {

// Brute-force polar oracle: dense angular grid plus golden refinement,
// independent of the closed forms under test.
double polar_bruteforce_2d(const NormModel& m, const Vec& x, int grid = 100000) {
  double best = -1e300, best_theta = 0;
  for (int i = 0; i < grid; ++i) {
    const double th = 2.0 * M_PI * (i + 0.5) / grid;
    const Vec w = angle_to_dir(th);
    const double v = dot(x, w) / m.eval(w);
    if (v > best) {
      best = v;
      best_theta = th;
    }
  }
  const double half = 2.0 * M_PI / grid;
  const double th = golden_section_max(
      [&](double t) {
        const Vec w = angle_to_dir(t);
        return dot(x, w) / m.eval(w);
      },
      best_theta - half, best_theta + half, 1e-14);
  const Vec w = angle_to_dir(th);
  return dot(x, w) / m.eval(w);
}

Vec grad_fd(const NormModel& m, const Vec& x, double h = 1e-6) {
  Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (m.eval(xp) - m.eval(xm)) / (2.0 * h);
  }
  return g;
}

Vec random_point(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> radius(0.1, 10.0);
  Vec x(dim);
  double r;
  do {
    for (int i = 0; i < dim; ++i) x[i] = gauss(rng);
    r = norm2(x);
  } while (r < 1e-6);
  return (radius(rng) / r) * x;
}

const Mat kTestMatrix = [] {
  Mat a(2);
  a(0, 0) = 2.0;
  a(0, 1) = 0.5;
  a(1, 0) = 0.5;
  a(1, 1) = 1.0;
  return a;
}();

}  // namespace

TEST_CASE("norm evaluation closed forms") {
  const NormModel e2 = NormModel::euclidean(2);
  CHECK(e2.eval(Vec{3, 4}) == doctest::Approx(5.0).epsilon(1e-14));

  const NormModel sh = NormModel::shifted(Vec{0.5, 0.0});
  CHECK(sh.eval(Vec{1, 0}) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(sh.eval(Vec{-1, 0}) == doctest::Approx(0.5).epsilon(1e-14));

  const NormModel l4 = NormModel::lp(2, 4.0);
  CHECK(l4.eval(Vec{1, 1}) == doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-14));

  const NormModel qu = NormModel::quadratic(kTestMatrix);
  CHECK(qu.eval(Vec{1, 0}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  CHECK(e2.eval(Vec{0, 0}) == 0.0);
  CHECK(sh.eval(Vec{0, 0}) == 0.0);
}

TEST_CASE("norm gradients match closed forms and finite differences") {
  const NormModel e2 = NormModel::euclidean(2);
  const Vec ge = e2.grad(Vec{3, 4});
  CHECK(ge[0] == doctest::Approx(0.6).epsilon(1e-13));
  CHECK(ge[1] == doctest::Approx(0.8).epsilon(1e-13));

  const NormModel sh = NormModel::shifted(Vec{0.5, 0.0});
  const Vec gs = sh.grad(Vec{0, 1});
  CHECK(gs[0] == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(gs[1] == doctest::Approx(1.0).epsilon(1e-13));

  const NormModel l4 = NormModel::lp(2, 4.0);
  const Vec gl = l4.grad(Vec{1, 1});
  CHECK(gl[0] == doctest::Approx(std::pow(2.0, -0.75)).epsilon(1e-13));
  CHECK(gl[1] == doctest::Approx(std::pow(2.0, -0.75)).epsilon(1e-13));

  // closed form vs central differences, all families
  std::mt19937_64 rng(99);
  for (const NormModel& m :
       {e2, sh, l4, NormModel::quadratic(kTestMatrix), NormModel::lp(3, 3.0),
        NormModel::shifted(Vec{0.2, 0.1, -0.1})}) {
    for (int k = 0; k < 50; ++k) {
      const Vec x = random_point(rng, m.dim());
      const Vec g = m.grad(x);
      const Vec gf = grad_fd(m, x);
      CHECK(norm2(g - gf) <= 1e-5 * std::max(1.0, norm2(g)));
    }
  }
}

TEST_CASE("polar closed forms and the search oracle") {
  const NormModel e2 = NormModel::euclidean(2);
  CHECK(e2.polar(Vec{3, 4}) == doctest::Approx(5.0).epsilon(1e-14));

  const NormModel l4 = NormModel::lp(2, 4.0);
  CHECK(l4.polar(Vec{1, 1}) == doctest::Approx(std::pow(2.0, 0.75)).epsilon(1e-14));

  const NormModel sh = NormModel::shifted(Vec{0.5, 0.0});
  CHECK(sh.polar(Vec{1, 0}) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(sh.polar(Vec{-1, 0}) == doctest::Approx(2.0).epsilon(1e-13));
  // brute-force maximization oracle agrees with the quadratic-root form
  CHECK(polar_bruteforce_2d(sh, Vec{1, 0}) == doctest::Approx(2.0 / 3.0).epsilon(1e-7));
  CHECK(polar_bruteforce_2d(sh, Vec{-1, 0}) == doctest::Approx(2.0).epsilon(1e-7));

  const NormModel qu = NormModel::quadratic(kTestMatrix);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const Vec x = random_point(rng, 2);
    CHECK(qu.polar(x) == doctest::Approx(polar_bruteforce_2d(qu, x)).epsilon(1e-8));
    CHECK(sh.polar(x) == doctest::Approx(polar_bruteforce_2d(sh, x)).epsilon(1e-8));
    CHECK(l4.polar(x) == doctest::Approx(polar_bruteforce_2d(l4, x)).epsilon(1e-8));
  }

  // library search fallback against closed forms
  for (int k = 0; k < 10; ++k) {
    const Vec x = random_point(rng, 2);
    CHECK(sh.polar_via_search(x) == doctest::Approx(sh.polar(x)).epsilon(1e-9));
  }
  const NormModel l3 = NormModel::lp(3, 3.0);
  for (int k = 0; k < 5; ++k) {
    const Vec x = random_point(rng, 3);
    CHECK(l3.polar_via_search(x) == doctest::Approx(l3.polar(x)).epsilon(1e-7));
  }
}

TEST_CASE("shifted polar satisfies the translated-ball identity") {
  const NormModel sh = NormModel::shifted(Vec{0.5, 0.0});
  const Vec a{0.5, 0.0};
  std::mt19937_64 rng(17);
  for (int k = 0; k < 200; ++k) {
    const Vec x = random_point(rng, 2);
    const double t = sh.polar(x);
    CHECK(norm2((1.0 / t) * x - a) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("reverse is the sign flip and an involution") {
  const NormModel e2 = NormModel::euclidean(2);
  CHECK(e2.reversed().same_values(e2, 100, 0.0));

  const NormModel sh = NormModel::shifted(Vec{0.5, 0.0});
  const NormModel rev = sh.reversed();
  CHECK(rev.shift()[0] == -0.5);
  CHECK(rev.reversed().same_values(sh, 100, 0.0));

  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const Vec x = random_point(rng, 2);
    CHECK(rev.eval(x) == sh.eval(-x));  // exact
  }
}

TEST_CASE("estimate_bounds finds the sphere extrema") {
  auto [a1, e1] = NormModel::euclidean(2).estimate_bounds(512);
  CHECK(a1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e1 == doctest::Approx(1.0).epsilon(1e-12));

  auto [a2, e2] = NormModel::shifted(Vec{0.5, 0.0}).estimate_bounds(2048);
  CHECK(a2 == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(e2 == doctest::Approx(1.5).epsilon(1e-10));

  auto [a3, e3] = NormModel::lp(2, 4.0).estimate_bounds(2048);
  CHECK(a3 == doctest::Approx(std::pow(2.0, -0.25)).epsilon(1e-10));
  CHECK(e3 == doctest::Approx(1.0).epsilon(1e-10));

  // quadratic: extrema are the sqrt-eigenvalues of A
  auto [a4, e4] = NormModel::quadratic(kTestMatrix).estimate_bounds(2048);
  const double disc = std::sqrt(0.25 + 0.5 * 0.5);
  CHECK(a4 == doctest::Approx(std::sqrt(1.5 - disc)).epsilon(1e-9));
  CHECK(e4 == doctest::Approx(std::sqrt(1.5 + disc)).epsilon(1e-9));

  CHECK_THROWS_AS(NormModel::euclidean(2).estimate_bounds(3), std::invalid_argument);
}

TEST_CASE("homogeneity and duality pairing") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> scale(1e-6, 10.0);
  for (const NormModel& m : {NormModel::euclidean(2), NormModel::lp(2, 4.0),
                             NormModel::shifted(Vec{0.25, 0.0}), NormModel::quadratic(kTestMatrix)}) {
    for (int k = 0; k < 100; ++k) {
      const Vec x = random_point(rng, 2);
      const double t = scale(rng);
      CHECK(std::abs(m.eval(t * x) - t * m.eval(x)) <= 1e-12 * t * m.eval(x));
      const Vec xi = random_point(rng, 2);
      CHECK(dot(x, xi) <= m.polar(x) * m.eval(xi) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("triangle lower bound needs the reversed gauge when F is non-symmetric") {
  // For F(x) = |x| + <a,x> the symmetric-looking bound |F(x)-F(y)| <= F(x+y)
  // fails near antipodal pairs; the reversal-corrected bound holds.
  const NormModel sh = NormModel::shifted(Vec{0.5, 0.0});
  const Vec x{1.0, 0.0};
  const Vec y{-1.0 + 1e-3, 0.0};
  CHECK(std::abs(sh.eval(x) - sh.eval(y)) > sh.eval(x + y));  // literal form is false
  std::mt19937_64 rng(71);
  for (int k = 0; k < 500; ++k) {
    const Vec u = random_point(rng, 2), v = random_point(rng, 2);
    const double lower = std::max(sh.eval(u) - sh.eval(-v), sh.eval(v) - sh.eval(-u));
    CHECK(lower <= sh.eval(u + v) * (1.0 + 1e-12) + 1e-12);
  }
}

TEST_CASE("verify_norm_properties passes for every family") {
  for (const NormModel& m :
       {NormModel::euclidean(2), NormModel::euclidean(3), NormModel::lp(2, 4.0),
        NormModel::lp(3, 3.0), NormModel::quadratic(kTestMatrix),
        NormModel::shifted(Vec{0.25, 0.0}), NormModel::shifted(Vec{0.2, 0.1, -0.1})}) {
    const CheckReport rep = verify_norm_properties(m, 1000, 1e-6);
    INFO(rep.name, " worst violation ", rep.computed);
    CHECK(rep.pass);
    CHECK(rep.details["gradient_bound_C"].get<double>() >= 1.0);
  }
}

TEST_CASE("input validation") {
  const NormModel e2 = NormModel::euclidean(2);
  CHECK_THROWS_AS(e2.eval(Vec{std::nan(""), 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(e2.polar(Vec{1.0, std::numeric_limits<double>::infinity()}),
                  std::invalid_argument);
  CHECK_THROWS_AS(e2.grad(Vec{0.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(e2.grad(Vec{1e-13, 0.0}), std::domain_error);

  CHECK_THROWS_AS(NormModel::shifted(Vec{1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(NormModel::shifted(Vec{1.2, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(NormModel::lp(2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(NormModel::lp(2, 0.5), std::invalid_argument);

  Mat bad(2);
  bad(0, 0) = 1.0;
  bad(0, 1) = 3.0;
  bad(1, 0) = 3.0;
  bad(1, 1) = 1.0;  // indefinite
  CHECK_THROWS_AS(NormModel::quadratic(bad), std::invalid_argument);
}

TEST_CASE("norm configuration parsing") {
  const NormModel a = parse_norm_config("family=euclidean\ndimension=2\n");
  CHECK(a.family() == NormFamily::euclidean);
  CHECK(a.dim() == 2);

  const NormModel b = parse_norm_config("# comment\nfamily=shifted\ndimension=2\na=0.25,0\n");
  CHECK(b.family() == NormFamily::shifted);
  CHECK(b.eval(Vec{1, 0}) == doctest::Approx(1.25));

  const NormModel c = parse_norm_config(R"({"family":"lp","dimension":2,"p":4})");
  CHECK(c.eval(Vec{1, 1}) == doctest::Approx(std::pow(2.0, 0.25)));

  const NormModel d =
      parse_norm_config(R"({"family":"quadratic","dimension":2,"matrix":[2,0.5,0.5,1]})");
  CHECK(d.eval(Vec{1, 0}) == doctest::Approx(std::sqrt(2.0)));

  CHECK_THROWS_AS(parse_norm_config("family=unknown\ndimension=2\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_norm_config("dimension=2\n"), std::invalid_argument);
  CHECK_THROWS_AS(load_norm_config("/nonexistent/path.cfg"), std::invalid_argument);
}
