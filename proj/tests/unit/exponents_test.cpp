#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"

#include "convwave/exponents.hpp"
#include "convwave/fields.hpp"
#include "convwave/radial_grid.hpp"

using namespace convwave;

namespace {

GridPtr small_grid() {
  return std::make_shared<const RadialGrid>(RadialGrid::uniform(0.25, 4.0));
}

}  // namespace

TEST_CASE("strauss exponent frozen values") {
  CHECK(strauss_exponent(1).infinite);
  CHECK(strauss_exponent(2).value ==
        doctest::Approx((3.0 + std::sqrt(17.0)) / 2.0).epsilon(1e-14));
  CHECK(strauss_exponent(3).value ==
        doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-14));
  for (int n = 2; n <= 20; ++n) {
    double p = strauss_exponent(n).value;
    double res = (n - 1.0) * p * p - (n + 1.0) * p - 2.0;
    CHECK(std::abs(res) < 1e-10);
  }
  CHECK(strauss_exponent(1) > strauss_exponent(2));
  CHECK(ExtendedReal::finite(3.0) < strauss_exponent(1));
}

TEST_CASE("fujita exponent") {
  CHECK(fujita_exponent(1) == doctest::Approx(3.0));
  CHECK(fujita_exponent(2) == doctest::Approx(2.0));
  CHECK(fujita_exponent(3) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("critical decay rate") {
  CHECK(critical_decay(3, 2.0, 0.0) == doctest::Approx(1.5));
  for (double g : {0.5, 1.0, 2.5})
    CHECK(critical_decay(3, g, 0.0) == doctest::Approx((5.0 - g) / 2.0));
  CHECK(critical_decay(3, 1.0, 2.0) == doctest::Approx(1.0));
  // mu = 2 collapses to (n - gamma)/2
  for (int n : {2, 3, 5})
    for (double g : {0.5, 1.0})
      CHECK(critical_decay(n, g, 2.0) == doctest::Approx(0.5 * (n - g)));
  CHECK_THROWS(critical_decay(3, 3.0, 0.0));
  CHECK_THROWS(critical_decay(3, 0.0, 0.0));
}

TEST_CASE("liouville transform frozen values and round trip") {
  GridPtr g = small_grid();
  RadialField one = RadialField::sample(g, [](double) { return 1.0; });
  CHECK(liouville_forward(one, 0.0, 2.0).values[3] == doctest::Approx(1.0));
  CHECK(liouville_forward(one, 3.0, 2.0).values[3] == doctest::Approx(4.0));
  RadialField two = RadialField::sample(g, [](double) { return 2.0; });
  CHECK(liouville_forward(two, 3.0, 4.0).values[5] == doctest::Approx(32.0));
  RadialField four = RadialField::sample(g, [](double) { return 4.0; });
  CHECK(liouville_inverse(four, 3.0, 2.0).values[0] == doctest::Approx(1.0));

  std::mt19937_64 rng(11);
  RadialField noisy = RadialField::sample(g, [&](double r) {
    return std::sin(3.0 * r) + 1e-3 * static_cast<double>(rng() % 1000);
  });
  RadialField back = liouville_inverse(liouville_forward(noisy, 1.7, 2.0), 1.7, 2.0);
  for (std::size_t i = 0; i < noisy.values.size(); ++i)
    CHECK(back.values[i] ==
          doctest::Approx(noisy.values[i]).epsilon(1e-14));
}

TEST_CASE("scale transform prefactor and induced grid") {
  GridPtr g = small_grid();
  SpaceTimeField u = SpaceTimeField::sample(
      g, {0.0, 0.5, 1.0}, [](double, double) { return 1.0; });

  SpaceTimeField id = scale_transform(u, 1.0, 3, 1.0);
  CHECK(id.frames[1][2] == doctest::Approx(1.0));
  CHECK(id.times[2] == doctest::Approx(1.0));

  SpaceTimeField v = scale_transform(u, 2.0, 3, 1.0);
  CHECK(v.frames[0][0] == doctest::Approx(4.0));
  CHECK(v.grid->r_max() == doctest::Approx(2.0));
  CHECK(v.times[1] == doctest::Approx(0.25));

  SpaceTimeField w = scale_transform(u, 3.0, 5, 1.0);
  CHECK(w.frames[2][1] == doctest::Approx(27.0));
}

TEST_CASE("problem spec validation names the offending field") {
  CHECK_THROWS_WITH_AS(ProblemSpec(3, 3.5, 2.0, 0.5, 1.0, 1.0, 1e-2),
                       "ProblemSpec: gamma must lie in (0, n)",
                       std::invalid_argument);
  CHECK_THROWS_AS(ProblemSpec(0, 0.5, 2.0, 0.5, 1.0, 1.0, 1e-2),
                  std::invalid_argument);
  CHECK_THROWS_AS(ProblemSpec(3, 1.0, 2.0, -0.5, 1.0, 1.0, 1e-2),
                  std::invalid_argument);
  CHECK_THROWS_AS(ProblemSpec(3, 1.0, 2.0, 0.5, 1.0, 1.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("problem spec json round trip") {
  ProblemSpec s(4, 1.5, 2.0, 0.75, 2.0, 1.5, 0.125);
  ProblemSpec t = ProblemSpec::from_json(s.to_json());
  CHECK(t.n == 4);
  CHECK(t.gamma == doctest::Approx(1.5));
  CHECK(t.mu == doctest::Approx(2.0));
  CHECK(t.nu == doctest::Approx(0.75));
  CHECK(t.A == doctest::Approx(2.0));
  CHECK(t.R == doctest::Approx(1.5));
  CHECK(t.eps == doctest::Approx(0.125));

  CHECK_THROWS_AS(ProblemSpec::from_json(
                      R"({"n":3,"gamma":1,"mu":2,"nu":0.5,"a":1,"r":1,"eps":0.01,"bogus":7})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ProblemSpec::from_json(R"({"n":3})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ProblemSpec::from_json("not json"), std::invalid_argument);
}
