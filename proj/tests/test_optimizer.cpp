#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "adabkb/optimizer.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace adabkb;

namespace {

double quadratic_peak(const Vector& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s -= (x[i] - 0.3) * (x[i] - 0.3);
  return s;
}

OptimizerConfig small_config() {
  OptimizerConfig cfg;
  cfg.N = 3;
  cfg.h_max = 6;
  cfg.budget = 25;
  cfg.lambda = 0.01;
  cfg.mode = PosteriorMode::Sketched;
  return cfg;
}

bool same_bits(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return false;
  }
  return true;
}

// Linear-scan reimplementation of the selection rule: maximize the index,
// break ties toward the (depth, path)-smaller cell id.
std::size_t select_oracle(const std::vector<LeafEntry>& leaves) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < leaves.size(); ++i) {
    if (leaves[i].index > leaves[best].index ||
        (leaves[i].index == leaves[best].index &&
         CellId::index_less(leaves[i].cell.id, leaves[best].cell.id))) {
      best = i;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("configuration validation") {
  const Domain d = Domain::cube(0.0, 1.0, 1);
  const Kernel k = Kernel::gaussian(1.0);
  OptimizerConfig cfg = small_config();
  cfg.N = 1;
  CHECK_THROWS_AS(AdaBkbOptimizer(d, k, cfg), std::invalid_argument);
  cfg = small_config();
  cfg.h_max = 0;
  CHECK_THROWS_AS(AdaBkbOptimizer(d, k, cfg), std::invalid_argument);
  cfg = small_config();
  cfg.budget = 0;
  CHECK_THROWS_AS(AdaBkbOptimizer(d, k, cfg), std::invalid_argument);
  cfg = small_config();
  cfg.lambda = 0.0;
  CHECK_THROWS_AS(AdaBkbOptimizer(d, k, cfg), std::invalid_argument);
}

TEST_CASE("initial state and the first step") {
  Vector lo(2), hi(2);
  lo << -1.0, 0.0;
  hi << 1.0, 4.0;
  AdaBkbOptimizer opt(Domain::box(lo, hi), Kernel::gaussian(1.0), small_config());

  CHECK(opt.t() == 0);
  CHECK(opt.tau() == 0);
  CHECK(opt.termination() == Termination::Running);
  CHECK(!opt.terminated());
  CHECK(!opt.current_beta().has_value());
  CHECK(opt.lstar() == -std::numeric_limits<double>::infinity());
  REQUIRE(opt.leaves().size() == 1);
  CHECK(opt.leaves()[0].cell.id.depth() == 0);
  CHECK(opt.select() == 0);
  CHECK(!opt.stop_condition_now());

  // With no confidence radius yet, the first step must evaluate the root
  // centroid (the domain midpoint).
  std::mt19937_64 rng(1);
  const StepOutcome out = opt.step(quadratic_peak, rng);
  CHECK(out.kind == StepKind::Evaluated);
  CHECK(out.point[0] == 0.0);
  CHECK(out.point[1] == 2.0);
  REQUIRE(out.value.has_value());
  CHECK(*out.value == quadratic_peak(out.point));
  CHECK(opt.t() == 1);
  CHECK(opt.tau() == 1);
  CHECK(opt.current_beta().has_value());
}

TEST_CASE("counters, selection, and leaf-set invariants over a full run") {
  OptimizerConfig cfg = small_config();
  AdaBkbOptimizer opt(Domain::cube(0.0, 1.0, 2), Kernel::gaussian(0.5), cfg);
  std::mt19937_64 rng(7);
  Vector probe(2);
  probe << 0.123, 0.871;

  std::size_t evaluations = 0;
  std::size_t iterations = 0;
  while (!opt.terminated()) {
    REQUIRE(iterations < 5000);

    // Pre-step invariants (hold once a confidence radius exists).
    if (opt.current_beta().has_value()) {
      const double beta = *opt.current_beta();
      for (const LeafEntry& e : opt.leaves()) {
        const auto p = opt.model().predict(e.cell.centroid());
        CHECK(e.mu == p.mu);
        CHECK(e.sigma == p.sigma);
        CHECK(e.ucb == e.mu + beta * e.sigma);
        const int h = e.cell.id.depth();
        const double want_index =
            h == 0 ? e.ucb + opt.vh(0)
                   : std::min(e.ucb, e.parent_ucb + opt.vh(h - 1)) + opt.vh(h);
        CHECK(e.index == want_index);
        CHECK(h <= cfg.h_max);
        // No retained leaf is prunable.
        CHECK(e.ucb + opt.vh(h) >= opt.lstar());
      }
      CHECK(opt.select() == select_oracle(opt.leaves()));
    }

    const std::size_t sel = opt.select();
    const LeafEntry chosen = opt.leaves()[sel];
    const std::size_t t_before = opt.t();
    const std::size_t tau_before = opt.tau();
    const auto probe_before = opt.model().predict(probe);

    const StepOutcome out = opt.step(quadratic_peak, rng);
    ++iterations;

    CHECK(opt.tau() == tau_before + 1);
    CHECK(out.cell == chosen.cell.id);
    if (out.kind == StepKind::Evaluated) {
      ++evaluations;
      CHECK(opt.t() == t_before + 1);
      CHECK(out.value.has_value());
    } else {
      // Refinement must not touch the model: same data count, bit-identical
      // predictions, and the acted-on cell satisfied the expansion gate.
      CHECK(opt.t() == t_before);
      CHECK(!out.value.has_value());
      const auto probe_after = opt.model().predict(probe);
      CHECK(probe_before.mu == probe_after.mu);
      CHECK(probe_before.sigma == probe_after.sigma);
      CHECK(chosen.cell.id.depth() < cfg.h_max);
      CHECK(*opt.current_beta() * chosen.sigma <=
            opt.vh(chosen.cell.id.depth()));
      // The expanded cell leaves the frontier; its children join it.
      std::size_t child_count = 0;
      for (const LeafEntry& e : opt.leaves()) {
        CHECK(!(e.cell.id == chosen.cell.id));
        if (e.cell.id.depth() == chosen.cell.id.depth() + 1 &&
            parent_id(e.cell.id, cfg.N) == chosen.cell.id) {
          ++child_count;
          CHECK(same_bits(e.parent_centroid, chosen.cell.centroid()));
          CHECK(e.parent_ucb == chosen.ucb);
        }
      }
      CHECK(child_count + out.pruned == static_cast<std::size_t>(cfg.N));
    }

    // l* is the best lower confidence bound over observed centroids, taken
    // under the refreshed model.
    if (out.kind == StepKind::Evaluated) {
      CHECK(opt.lstar() > -std::numeric_limits<double>::infinity());
      const auto p = opt.model().predict(out.point);
      CHECK(opt.lstar() >= p.mu - *opt.current_beta() * p.sigma - 1e-12);
    }
  }

  CHECK(evaluations == cfg.budget);
  CHECK(opt.t() == cfg.budget);
  CHECK(opt.termination() == Termination::Budget);
  CHECK_THROWS_AS(opt.step(quadratic_peak, rng), std::logic_error);
}

TEST_CASE("budget of one evaluates the root and stops") {
  OptimizerConfig cfg = small_config();
  cfg.budget = 1;
  AdaBkbOptimizer opt(Domain::cube(-2.0, 2.0, 1), Kernel::gaussian(1.0), cfg);
  std::mt19937_64 rng(3);
  const StepOutcome out = opt.step(quadratic_peak, rng);
  CHECK(out.kind == StepKind::Evaluated);
  CHECK(out.point[0] == 0.0);
  CHECK(opt.terminated());
  CHECK(opt.termination() == Termination::Budget);
}

TEST_CASE("variation bound ladder") {
  OptimizerConfig cfg = small_config();
  cfg.N = 2;
  AdaBkbOptimizer opt(Domain::cube(0.0, 1.0, 2), Kernel::gaussian(2.0), cfg);
  const double rho = opt.geometry().rho;
  CHECK(rho == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-15));
  const double coeff = std::sqrt(2.0 / 2.0);  // sqrt(2 / min lengthscale)
  for (int h = 0; h <= cfg.h_max; ++h) {
    const double r = opt.geometry().v1 * std::pow(rho, h);
    CHECK(opt.vh(h) == doctest::Approx(coeff * r).epsilon(1e-12));
    if (h > 0) CHECK(opt.vh(h) < opt.vh(h - 1));
  }
  CHECK_THROWS_AS(opt.vh(-1), std::invalid_argument);
  CHECK_THROWS_AS(opt.vh(cfg.h_max + 1), std::invalid_argument);
}

TEST_CASE("early stop on a single deepest-level survivor") {
  // Sharp noiseless peak, tiny ridge: the posterior collapses fast and the
  // frontier shrinks to one cell at the maximum depth.
  const auto f = [](const Vector& x) {
    return -50.0 * (x[0] - 0.35) * (x[0] - 0.35);
  };
  OptimizerConfig cfg;
  cfg.N = 3;
  cfg.h_max = 3;
  cfg.budget = 400;
  cfg.lambda = 1e-4;
  cfg.mode = PosteriorMode::Sketched;

  SUBCASE("stops at the condition") {
    AdaBkbOptimizer opt(Domain::cube(0.0, 1.0, 1), Kernel::gaussian(2.0), cfg);
    std::mt19937_64 rng(3);
    std::size_t guard = 0;
    while (!opt.terminated()) {
      REQUIRE(++guard < 5000);
      opt.step(f, rng);
    }
    CHECK(opt.termination() == Termination::EarlyStop);
    CHECK(opt.t() < cfg.budget);
    REQUIRE(opt.stop_condition_tau().has_value());
    CHECK(*opt.stop_condition_tau() == opt.tau());
    REQUIRE(opt.stop_condition_t().has_value());
    CHECK(*opt.stop_condition_t() == opt.t());
    REQUIRE(opt.leaves().size() == 1);
    CHECK(opt.leaves()[0].cell.id.depth() == cfg.h_max);
    CHECK(opt.stop_condition_now());
  }

  SUBCASE("continue-after-stop pins further evaluations to the survivor") {
    cfg.continue_after_stop = true;
    cfg.budget = 60;
    AdaBkbOptimizer opt(Domain::cube(0.0, 1.0, 1), Kernel::gaussian(2.0), cfg);
    std::mt19937_64 rng(3);
    std::optional<std::size_t> first_stop_tau;
    Vector survivor;
    std::size_t guard = 0;
    while (!opt.terminated()) {
      REQUIRE(++guard < 5000);
      const StepOutcome out = opt.step(f, rng);
      if (out.stop_condition && !first_stop_tau) {
        first_stop_tau = opt.tau();
        survivor = opt.leaves()[0].cell.centroid();
      } else if (first_stop_tau) {
        // Once the frontier is a single deepest cell, every step evaluates
        // its centroid.
        CHECK(out.kind == StepKind::Evaluated);
        CHECK(same_bits(out.point, survivor));
      }
    }
    CHECK(opt.termination() == Termination::Budget);
    CHECK(opt.t() == cfg.budget);
    REQUIRE(first_stop_tau.has_value());
    // The recorded stop point is the first time the condition held.
    CHECK(opt.stop_condition_tau() == first_stop_tau);
  }
}

TEST_CASE("early stop on an emptied frontier") {
  const auto f = [](const Vector& x) {
    return -50.0 * (x[0] - 0.35) * (x[0] - 0.35);
  };
  OptimizerConfig cfg;
  cfg.N = 3;
  cfg.h_max = 3;
  cfg.budget = 400;
  cfg.lambda = 1e-3;
  cfg.mode = PosteriorMode::Sketched;
  AdaBkbOptimizer opt(Domain::cube(0.0, 1.0, 1), Kernel::gaussian(2.0), cfg);
  std::mt19937_64 rng(3);
  std::size_t guard = 0;
  while (!opt.terminated()) {
    REQUIRE(++guard < 5000);
    opt.step(f, rng);
  }
  CHECK(opt.termination() == Termination::EarlyStop);
  CHECK(opt.leaves().empty());
  CHECK(opt.stop_condition_now());
  CHECK(opt.t() < cfg.budget);
}

TEST_CASE("exact and saturated-sketch runs take identical decisions") {
  const auto f = [](const Vector& x) {
    return std::sin(3.0 * x[0]) * std::cos(2.0 * x[1]);
  };
  OptimizerConfig exact_cfg = small_config();
  exact_cfg.budget = 20;
  exact_cfg.mode = PosteriorMode::Exact;
  OptimizerConfig sk_cfg = exact_cfg;
  sk_cfg.mode = PosteriorMode::Sketched;
  sk_cfg.qbar = QbarRule::constant(1e18);

  AdaBkbOptimizer a(Domain::cube(0.0, 1.0, 2), Kernel::gaussian(0.5), exact_cfg);
  AdaBkbOptimizer b(Domain::cube(0.0, 1.0, 2), Kernel::gaussian(0.5), sk_cfg);
  std::mt19937_64 rng_a(11);
  std::mt19937_64 rng_b(11);
  std::size_t guard = 0;
  while (!a.terminated() && !b.terminated()) {
    REQUIRE(++guard < 5000);
    const StepOutcome oa = a.step(f, rng_a);
    const StepOutcome ob = b.step(f, rng_b);
    CHECK(oa.kind == ob.kind);
    CHECK(oa.cell == ob.cell);
    CHECK(same_bits(oa.point, ob.point));
    if (oa.value.has_value()) {
      REQUIRE(ob.value.has_value());
      CHECK(*oa.value == doctest::Approx(*ob.value).epsilon(1e-9));
    }
  }
  CHECK(a.terminated());
  CHECK(b.terminated());
  CHECK(a.t() == b.t());
}
