#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "adabkb/external.hpp"

#include <chrono>
#include <stdexcept>
#include <string>

using namespace adabkb;

namespace {

Vector vx(std::initializer_list<double> coords) {
  Vector v(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (double c : coords) v[i++] = c;
  return v;
}

std::string error_of(ExternalObjective& obj, const Vector& x) {
  try {
    obj.evaluate(x);
  } catch (const std::runtime_error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(ExternalObjective("", 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ExternalObjective("cat", 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ExternalObjective("cat", -1.0), std::invalid_argument);
}

TEST_CASE("constant replies") {
  ExternalObjective obj("while read l; do echo 0.25; done", 5.0);
  CHECK(obj.alive());
  for (int i = 0; i < 10; ++i) {
    CHECK(obj.evaluate(vx({0.5, -1.5})) == 0.25);
  }
}

TEST_CASE("the child echoes a coordinate back through awk") {
  // Extracts the second array element: for [a,b] the reply is b.
  ExternalObjective obj(
      R"(while read l; do echo "$l" | awk -F'[],[]' '{print $3}'; done)", 5.0);
  CHECK(obj.evaluate(vx({1.0, 42.5})) == 42.5);
  CHECK(obj.evaluate(vx({7.0, -0.125})) == -0.125);
}

TEST_CASE("non-numeric replies are protocol errors") {
  SUBCASE("prose") {
    ExternalObjective obj("while read l; do echo hello; done", 5.0);
    const std::string msg = error_of(obj, vx({0.0}));
    CHECK(msg.find("external objective") != std::string::npos);
    CHECK(!obj.alive());
  }
  SUBCASE("bare nan is not valid json") {
    ExternalObjective obj("while read l; do echo nan; done", 5.0);
    CHECK(!error_of(obj, vx({0.0})).empty());
    CHECK(!obj.alive());
  }
  SUBCASE("a json array is not a number") {
    ExternalObjective obj("while read l; do echo '[1,2]'; done", 5.0);
    CHECK(!error_of(obj, vx({0.0})).empty());
    CHECK(!obj.alive());
  }
}

TEST_CASE("timeouts are reported with the command") {
  ExternalObjective obj("read l; sleep 5", 0.2);
  const auto start = std::chrono::steady_clock::now();
  const std::string msg = error_of(obj, vx({0.0}));
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(msg.find("timed out") != std::string::npos);
  CHECK(msg.find("read l; sleep 5") != std::string::npos);
  CHECK(elapsed < 3.0);  // the deadline cut the wait short
  CHECK(!obj.alive());
}

TEST_CASE("child exit before replying is diagnosed with the status") {
  ExternalObjective obj("read l; exit 3", 5.0);
  const std::string msg = error_of(obj, vx({0.0}));
  CHECK(msg.find("exited with status 3") != std::string::npos);
  CHECK(!obj.alive());
}

TEST_CASE("immediate eof") {
  ExternalObjective obj("true", 5.0);
  CHECK(!error_of(obj, vx({0.0})).empty());
  CHECK(!obj.alive());
}

TEST_CASE("a failed instance refuses further evaluations") {
  ExternalObjective obj("read l; exit 0", 5.0);
  (void)error_of(obj, vx({0.0}));
  CHECK(!obj.alive());
  CHECK_THROWS_AS(obj.evaluate(vx({0.0})), std::runtime_error);
}

TEST_CASE("full-precision coordinates cross the pipe") {
  // The child sees round-trip-formatted doubles; echoing one back must
  // reproduce the exact bits.
  ExternalObjective obj(
      R"(while read l; do echo "$l" | awk -F'[],[]' '{print $2}'; done)", 5.0);
  const double tricky = 0.1 + 0.2;  // 0.30000000000000004
  CHECK(obj.evaluate(vx({tricky})) == tricky);
  CHECK(obj.evaluate(vx({1e-300})) == 1e-300);
  CHECK(obj.evaluate(vx({-12345.678901234567})) == -12345.678901234567);
}
