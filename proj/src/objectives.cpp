#include "adabkb/objectives.hpp"

#include "adabkb/posterior.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace adabkb {

namespace {

using std::numbers::e;
using std::numbers::pi;

Vector vec(std::initializer_list<double> vals) {
  Vector v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

double branin(const Vector& x) {
  const double a = 1.0, b = 5.1 / (4.0 * pi * pi), c = 5.0 / pi;
  const double r = 6.0, s = 10.0, t = 1.0 / (8.0 * pi);
  const double term = x[1] - b * x[0] * x[0] + c * x[0] - r;
  return a * term * term + s * (1.0 - t) * std::cos(x[0]) + s;
}

double beale(const Vector& x) {
  const double t1 = 1.5 - x[0] + x[0] * x[1];
  const double t2 = 2.25 - x[0] + x[0] * x[1] * x[1];
  const double t3 = 2.625 - x[0] + x[0] * x[1] * x[1] * x[1];
  return t1 * t1 + t2 * t2 + t3 * t3;
}

double bohachevsky(const Vector& x) {
  return x[0] * x[0] + 2.0 * x[1] * x[1] - 0.3 * std::cos(3.0 * pi * x[0]) -
         0.4 * std::cos(4.0 * pi * x[1]) + 0.7;
}

double rosenbrock(const Vector& x) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = 1.0 - x[i];
    sum += 100.0 * a * a + b * b;
  }
  return sum;
}

double six_hump_camel(const Vector& x) {
  const double x1 = x[0], x2 = x[1];
  return (4.0 - 2.1 * x1 * x1 + x1 * x1 * x1 * x1 / 3.0) * x1 * x1 + x1 * x2 +
         (-4.0 + 4.0 * x2 * x2) * x2 * x2;
}

double ackley(const Vector& x) {
  const double a = 20.0, b = 0.2, c = 2.0 * pi;
  const double d = static_cast<double>(x.size());
  double sq = 0.0, cs = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    sq += x[i] * x[i];
    cs += std::cos(c * x[i]);
  }
  return -a * std::exp(-b * std::sqrt(sq / d)) - std::exp(cs / d) + a + e;
}

double trid(const Vector& x) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double u = x[i] - 1.0;
    sum += u * u;
  }
  for (Eigen::Index i = 1; i < x.size(); ++i) sum -= x[i] * x[i - 1];
  return sum;
}

double hartmann3(const Vector& x) {
  static const double alpha[4] = {1.0, 1.2, 3.0, 3.2};
  static const double A[4][3] = {
      {3.0, 10.0, 30.0}, {0.1, 10.0, 35.0}, {3.0, 10.0, 30.0}, {0.1, 10.0, 35.0}};
  static const double P[4][3] = {{0.3689, 0.1170, 0.2673},
                                 {0.4699, 0.4387, 0.7470},
                                 {0.1091, 0.8732, 0.5547},
                                 {0.0381, 0.5743, 0.8828}};
  double outer = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < 3; ++j) {
      const double d = x[j] - P[i][j];
      inner += A[i][j] * d * d;
    }
    outer += alpha[i] * std::exp(-inner);
  }
  return -outer;
}

double hartmann6(const Vector& x) {
  static const double alpha[4] = {1.0, 1.2, 3.0, 3.2};
  static const double A[4][6] = {{10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
                                 {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
                                 {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
                                 {17.0, 8.0, 0.05, 10.0, 0.1, 14.0}};
  static const double P[4][6] = {{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                                 {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                                 {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                                 {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};
  double outer = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < 6; ++j) {
      const double d = x[j] - P[i][j];
      inner += A[i][j] * d * d;
    }
    outer += alpha[i] * std::exp(-inner);
  }
  return -outer;
}

double shekel(const Vector& x) {
  static const double C[10][4] = {{4.0, 4.0, 4.0, 4.0}, {1.0, 1.0, 1.0, 1.0},
                                  {8.0, 8.0, 8.0, 8.0}, {6.0, 6.0, 6.0, 6.0},
                                  {3.0, 7.0, 3.0, 7.0}, {2.0, 9.0, 2.0, 9.0},
                                  {5.0, 5.0, 3.0, 3.0}, {8.0, 1.0, 8.0, 1.0},
                                  {6.0, 2.0, 6.0, 2.0}, {7.0, 3.6, 7.0, 3.6}};
  static const double B[10] = {0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5};
  double sum = 0.0;
  for (int i = 0; i < 10; ++i) {
    double inner = B[i];
    for (int j = 0; j < 4; ++j) {
      const double d = x[j] - C[i][j];
      inner += d * d;
    }
    sum -= 1.0 / inner;
  }
  return sum;
}

double levy(const Vector& x) {
  const Eigen::Index d = x.size();
  auto w = [&](Eigen::Index i) { return 1.0 + (x[i] - 1.0) / 4.0; };
  const double s1 = std::sin(pi * w(0));
  double sum = s1 * s1;
  for (Eigen::Index i = 0; i + 1 < d; ++i) {
    const double wi = w(i);
    const double s = std::sin(pi * wi + 1.0);
    sum += (wi - 1.0) * (wi - 1.0) * (1.0 + 10.0 * s * s);
  }
  const double wd = w(d - 1);
  const double s2 = std::sin(2.0 * pi * wd);
  sum += (wd - 1.0) * (wd - 1.0) * (1.0 + s2 * s2);
  return sum;
}

double rastrigin(const Vector& x) {
  double sum = 10.0 * static_cast<double>(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    sum += x[i] * x[i] - 10.0 * std::cos(2.0 * pi * x[i]);
  }
  return sum;
}

double dixon_price(const Vector& x) {
  const double first = x[0] - 1.0;
  double sum = first * first;
  for (Eigen::Index i = 1; i < x.size(); ++i) {
    const double t = 2.0 * x[i] * x[i] - x[i - 1];
    sum += static_cast<double>(i + 1) * t * t;
  }
  return sum;
}

Objective make(std::string name, Domain domain, std::function<double(const Vector&)> fn,
               std::optional<double> known_optimum, std::optional<Vector> minimizer) {
  Objective o;
  o.name = std::move(name);
  o.domain = std::move(domain);
  o.fn = [f = std::move(fn), dim = o.domain.dim()](const Vector& x) {
    if (x.size() != dim) {
      throw std::invalid_argument("objective: point dimension mismatch");
    }
    return f(x);
  };
  o.known_optimum = known_optimum;
  o.minimizer = std::move(minimizer);
  return o;
}

std::vector<Objective> build_registry() {
  std::vector<Objective> reg;
  reg.push_back(make("branin", Domain::box(vec({-5.0, 0.0}), vec({10.0, 15.0})), branin,
                     0.39788735772973816, vec({pi, 2.275})));
  reg.push_back(make("beale", Domain::cube(-4.5, 4.5, 2), beale, 0.0, vec({3.0, 0.5})));
  reg.push_back(make("bohachevsky", Domain::box(vec({-10.0, -180.0}), vec({190.0, 20.0})),
                     bohachevsky, 0.0, vec({0.0, 0.0})));
  reg.push_back(make("rosenbrock-2", Domain::cube(-5.0, 10.0, 2), rosenbrock, 0.0,
                     vec({1.0, 1.0})));
  reg.push_back(make("six-hump-camel", Domain::box(vec({-2.0, -3.0}), vec({2.0, 3.0})),
                     six_hump_camel, -1.0316284534898774,
                     vec({0.08984201368301331, -0.7126564032704135})));
  reg.push_back(make("ackley-2", Domain::cube(-10.0, 52.768, 2), ackley, 0.0,
                     Vector::Zero(2)));
  reg.push_back(make("trid-2", Domain::cube(-4.0, 4.0, 2), trid, -2.0, vec({2.0, 2.0})));
  reg.push_back(make("hartmann-3", Domain::cube(0.0, 1.0, 3), hartmann3,
                     -3.8627797869493365, vec({0.114614, 0.555649, 0.852547})));
  reg.push_back(make("trid-4", Domain::cube(-16.0, 16.0, 4), trid, -16.0,
                     vec({4.0, 6.0, 6.0, 4.0})));
  reg.push_back(make("shekel", Domain::cube(0.0, 10.0, 4), shekel, -10.53640981346819,
                     vec({4.00075, 4.00059, 3.99966, 3.99951})));
  reg.push_back(make("ackley-5", Domain::cube(-10.0, 52.768, 5), ackley, 0.0,
                     Vector::Zero(5)));
  reg.push_back(make("hartmann-6", Domain::cube(0.0, 1.0, 6), hartmann6,
                     -3.322368011391339,
                     vec({0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573})));
  reg.push_back(make("levy-6", Domain::cube(-10.0, 10.0, 6), levy, 0.0,
                     Vector::Ones(6)));
  reg.push_back(make("levy-8", Domain::cube(-10.0, 10.0, 8), levy, 0.0,
                     Vector::Ones(8)));
  reg.push_back(make("rastrigin-8", Domain::cube(-1.12, 5.12, 8), rastrigin, 0.0,
                     Vector::Zero(8)));
  reg.push_back(make("dixon-price-10", Domain::cube(-10.0, 10.0, 10), dixon_price, 0.0,
                     std::nullopt));
  reg.push_back(make("ackley-30", Domain::cube(-10.0, 52.768, 30), ackley, 0.0,
                     Vector::Zero(30)));
  return reg;
}

struct DefaultsEntry {
  const char* name;
  RegistryDefaults d;
};

constexpr DefaultsEntry kDefaults[] = {
    {"branin", {0.5, 5, 3}},          {"beale", {1.0, 5, 3}},
    {"bohachevsky", {1.70, 9, 3}},    {"rosenbrock-2", {0.70, 10, 11}},
    {"six-hump-camel", {0.5, 6, 5}},  {"ackley-2", {3.5, 7, 3}},
    {"trid-2", {1.5, 7, 5}},          {"hartmann-3", {0.5, 7, 3}},
    {"trid-4", {10.75, 7, 13}},       {"shekel", {1.75, 6, 9}},
    {"ackley-5", {5.0, 6, 3}},        {"hartmann-6", {0.35, 5, 5}},
    {"levy-6", {5.0, 7, 5}},          {"levy-8", {2.5, 7, 3}},
    {"rastrigin-8", {7.0, 10, 3}},    {"dixon-price-10", {2.0, 10, 5}},
    {"ackley-30", {20.50, 300, 3}},
};

}  // namespace

const std::vector<Objective>& objective_registry() {
  static const std::vector<Objective> registry = build_registry();
  return registry;
}

const Objective* find_objective(std::string_view name) {
  for (const Objective& o : objective_registry()) {
    if (o.name == name) return &o;
  }
  return nullptr;
}

std::optional<RegistryDefaults> registry_defaults(std::string_view name) {
  for (const DefaultsEntry& e : kDefaults) {
    if (name == e.name) return e.d;
  }
  return std::nullopt;
}

int default_grid_points_per_dim(int dim) {
  if (dim <= 4) return 15;
  if (dim <= 6) return 10;
  return 5;
}

NoiseModel NoiseModel::gaussian(double sigma) {
  if (sigma < 0.0) {
    throw std::invalid_argument("noise: sigma must be non-negative");
  }
  return NoiseModel{Kind::Gaussian, sigma};
}

double NoiseModel::sample(std::mt19937_64& rng) const {
  if (kind == Kind::None) return 0.0;
  return sigma * gaussian01(rng);
}

}  // namespace adabkb
