#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "adabkb/objectives.hpp"
#include "adabkb/posterior.hpp"

#include <cmath>
#include <random>

using namespace adabkb;

namespace {

Vector vx(std::initializer_list<double> coords) {
  Vector v(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (double c : coords) v[i++] = c;
  return v;
}

Vector constant_vec(int dim, double value) {
  return Vector::Constant(dim, value);
}

double eval(const char* name, const Vector& x) {
  const Objective* o = find_objective(name);
  REQUIRE(o != nullptr);
  return o->fn(x);
}

}  // namespace

TEST_CASE("registry inventory") {
  const auto& reg = objective_registry();
  REQUIRE(reg.size() == 17);
  const char* expected[] = {
      "branin",      "beale",     "bohachevsky", "rosenbrock-2", "six-hump-camel",
      "ackley-2",    "trid-2",    "hartmann-3",  "trid-4",       "shekel",
      "ackley-5",    "hartmann-6", "levy-6",     "levy-8",       "rastrigin-8",
      "dixon-price-10", "ackley-30"};
  for (std::size_t i = 0; i < reg.size(); ++i) CHECK(reg[i].name == expected[i]);
  CHECK(find_objective("branin") != nullptr);
  CHECK(find_objective("no-such-function") == nullptr);
}

TEST_CASE("search domains") {
  struct Row {
    const char* name;
    int dim;
    double lo0, hi0, lo1, hi1;  // first and last coordinate bounds
  };
  const Row rows[] = {
      {"branin", 2, -5.0, 10.0, 0.0, 15.0},
      {"beale", 2, -4.5, 4.5, -4.5, 4.5},
      {"bohachevsky", 2, -10.0, 190.0, -180.0, 20.0},
      {"rosenbrock-2", 2, -5.0, 10.0, -5.0, 10.0},
      {"six-hump-camel", 2, -2.0, 2.0, -3.0, 3.0},
      {"ackley-2", 2, -10.0, 52.768, -10.0, 52.768},
      {"trid-2", 2, -4.0, 4.0, -4.0, 4.0},
      {"hartmann-3", 3, 0.0, 1.0, 0.0, 1.0},
      {"trid-4", 4, -16.0, 16.0, -16.0, 16.0},
      {"shekel", 4, 0.0, 10.0, 0.0, 10.0},
      {"ackley-5", 5, -10.0, 52.768, -10.0, 52.768},
      {"hartmann-6", 6, 0.0, 1.0, 0.0, 1.0},
      {"levy-6", 6, -10.0, 10.0, -10.0, 10.0},
      {"levy-8", 8, -10.0, 10.0, -10.0, 10.0},
      {"rastrigin-8", 8, -1.12, 5.12, -1.12, 5.12},
      {"dixon-price-10", 10, -10.0, 10.0, -10.0, 10.0},
      {"ackley-30", 30, -10.0, 52.768, -10.0, 52.768},
  };
  for (const Row& r : rows) {
    CAPTURE(r.name);
    const Objective* o = find_objective(r.name);
    REQUIRE(o != nullptr);
    CHECK(o->domain.dim() == r.dim);
    CHECK(o->domain.lo[0] == r.lo0);
    CHECK(o->domain.hi[0] == r.hi0);
    CHECK(o->domain.lo[r.dim - 1] == r.lo1);
    CHECK(o->domain.hi[r.dim - 1] == r.hi1);
  }
}

TEST_CASE("spot values") {
  CHECK(eval("branin", vx({2.5, 7.5})) ==
        doctest::Approx(24.129964413622268).epsilon(1e-13));
  CHECK(eval("beale", vx({0.0, 0.0})) == doctest::Approx(14.203125).epsilon(1e-13));
  CHECK(eval("bohachevsky", vx({90.0, -80.0})) ==
        doctest::Approx(20900.0).epsilon(1e-13));
  CHECK(eval("rosenbrock-2", vx({2.5, 2.5})) == doctest::Approx(1408.5).epsilon(1e-13));
  CHECK(eval("six-hump-camel", vx({1.0, 0.5})) ==
        doctest::Approx(1.9833333333333334).epsilon(1e-13));
  CHECK(eval("ackley-2", vx({1.0, 1.0})) ==
        doctest::Approx(3.6253849384403627).epsilon(1e-13));
  CHECK(eval("trid-2", vx({0.0, 0.0})) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(eval("hartmann-3", constant_vec(3, 0.5)) ==
        doctest::Approx(-0.6280220150705942).epsilon(1e-13));
  CHECK(eval("trid-4", vx({1.0, 2.0, -3.0, 0.5})) ==
        doctest::Approx(22.75).epsilon(1e-13));
  CHECK(eval("shekel", constant_vec(4, 5.0)) ==
        doctest::Approx(-0.8646158345828573).epsilon(1e-13));
  CHECK(eval("ackley-5", constant_vec(5, 21.384)) ==
        doctest::Approx(21.96625352124517).epsilon(1e-13));
  CHECK(eval("hartmann-6", constant_vec(6, 0.5)) ==
        doctest::Approx(-0.5053149917022333).epsilon(1e-13));
  CHECK(eval("levy-6", constant_vec(6, 0.0)) ==
        doctest::Approx(1.0792227705848725).epsilon(1e-13));
  CHECK(eval("levy-6", vx({2.0, 3.0, 5.0, -1.0, 0.5, 7.0})) ==
        doctest::Approx(13.516029558615559).epsilon(1e-13));
  CHECK(eval("levy-8", constant_vec(8, 0.0)) ==
        doctest::Approx(1.2609118788188212).epsilon(1e-13));
  CHECK(eval("rastrigin-8", constant_vec(8, 0.5)) ==
        doctest::Approx(162.0).epsilon(1e-13));
  CHECK(eval("dixon-price-10", constant_vec(10, 1.0)) ==
        doctest::Approx(54.0).epsilon(1e-13));
  CHECK(eval("ackley-30", constant_vec(30, 0.5)) ==
        doctest::Approx(4.253654026568412).epsilon(1e-13));
}

TEST_CASE("known optima and minimizers agree") {
  struct Row {
    const char* name;
    double optimum;
  };
  const Row rows[] = {
      {"branin", 0.39788735772973816},
      {"beale", 0.0},
      {"bohachevsky", 0.0},
      {"rosenbrock-2", 0.0},
      {"six-hump-camel", -1.0316284534898774},
      {"ackley-2", 0.0},
      {"trid-2", -2.0},
      {"hartmann-3", -3.8627797869493365},
      {"trid-4", -16.0},
      {"shekel", -10.53640981346819},
      {"ackley-5", 0.0},
      {"hartmann-6", -3.322368011391339},
      {"levy-6", 0.0},
      {"levy-8", 0.0},
      {"rastrigin-8", 0.0},
      {"dixon-price-10", 0.0},
      {"ackley-30", 0.0},
  };
  for (const Row& r : rows) {
    CAPTURE(r.name);
    const Objective* o = find_objective(r.name);
    REQUIRE(o != nullptr);
    REQUIRE(o->known_optimum.has_value());
    CHECK(*o->known_optimum == r.optimum);
    if (o->minimizer.has_value()) {
      CHECK(o->domain.contains(*o->minimizer));
      CHECK(o->fn(*o->minimizer) == doctest::Approx(*o->known_optimum).epsilon(1e-9));
      CHECK(std::abs(o->fn(*o->minimizer) - *o->known_optimum) < 1e-9 + 1e-9);
    }
  }
  // The trid optima follow -d (d+4)(d-1)/6.
  CHECK(-2.0 == -2.0 * 6.0 * 1.0 / 6.0);
  CHECK(-16.0 == -4.0 * 8.0 * 3.0 / 6.0);
}

TEST_CASE("dimension mismatch is rejected") {
  const Objective* o = find_objective("branin");
  REQUIRE(o != nullptr);
  CHECK_THROWS_AS(o->fn(constant_vec(3, 0.5)), std::invalid_argument);
  CHECK_THROWS_AS(o->fn(constant_vec(1, 0.5)), std::invalid_argument);
}

TEST_CASE("per-objective defaults") {
  struct Row {
    const char* name;
    double lengthscale;
    int h_max;
    int N;
  };
  const Row rows[] = {
      {"branin", 0.5, 5, 3},        {"beale", 1.0, 5, 3},
      {"bohachevsky", 1.70, 9, 3},  {"rosenbrock-2", 0.70, 10, 11},
      {"six-hump-camel", 0.5, 6, 5}, {"ackley-2", 3.5, 7, 3},
      {"trid-2", 1.5, 7, 5},        {"hartmann-3", 0.5, 7, 3},
      {"trid-4", 10.75, 7, 13},     {"shekel", 1.75, 6, 9},
      {"ackley-5", 5.0, 6, 3},      {"hartmann-6", 0.35, 5, 5},
      {"levy-6", 5.0, 7, 5},        {"levy-8", 2.5, 7, 3},
      {"rastrigin-8", 7.0, 10, 3},  {"dixon-price-10", 2.0, 10, 5},
      {"ackley-30", 20.50, 300, 3},
  };
  for (const Row& r : rows) {
    CAPTURE(r.name);
    const auto d = registry_defaults(r.name);
    REQUIRE(d.has_value());
    CHECK(d->lengthscale == r.lengthscale);
    CHECK(d->h_max == r.h_max);
    CHECK(d->N == r.N);
  }
  CHECK(!registry_defaults("no-such-function").has_value());
}

TEST_CASE("grid density by dimension") {
  CHECK(default_grid_points_per_dim(1) == 15);
  CHECK(default_grid_points_per_dim(2) == 15);
  CHECK(default_grid_points_per_dim(4) == 15);
  CHECK(default_grid_points_per_dim(5) == 10);
  CHECK(default_grid_points_per_dim(6) == 10);
  CHECK(default_grid_points_per_dim(7) == 5);
  CHECK(default_grid_points_per_dim(30) == 5);
}

TEST_CASE("noise models") {
  SUBCASE("noiseless") {
    const NoiseModel m = NoiseModel::none();
    std::mt19937_64 rng(1);
    std::mt19937_64 untouched(1);
    for (int i = 0; i < 5; ++i) CHECK(m.sample(rng) == 0.0);
    CHECK(rng() == untouched());  // never draws
  }
  SUBCASE("gaussian scales a standard normal and consumes two draws") {
    const NoiseModel m = NoiseModel::gaussian(0.25);
    std::mt19937_64 rng(42);
    std::mt19937_64 replay(42);
    for (int i = 0; i < 100; ++i) {
      CHECK(m.sample(rng) == 0.25 * gaussian01(replay));
    }
    CHECK(rng() == replay());
  }
  SUBCASE("negative width is rejected") {
    CHECK_THROWS_AS(NoiseModel::gaussian(-0.1), std::invalid_argument);
  }
}

TEST_CASE("random search never beats the recorded branin optimum") {
  const Objective* o = find_objective("branin");
  REQUIRE(o != nullptr);
  std::mt19937_64 rng(2024);
  double best = std::numeric_limits<double>::infinity();
  Vector x(2);
  for (int i = 0; i < 1000000; ++i) {
    for (int j = 0; j < 2; ++j) {
      x[j] = o->domain.lo[j] + (o->domain.hi[j] - o->domain.lo[j]) * uniform53(rng);
    }
    best = std::min(best, o->fn(x));
  }
  CHECK(best >= *o->known_optimum - 1e-6);
  CHECK(best < *o->known_optimum + 0.01);  // and the optimum is reachable
}
