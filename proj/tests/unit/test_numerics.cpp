#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "klearn/numerics.hpp"

using namespace klearn;

TEST_CASE("log_sum_exp is max-shifted") {
  std::vector<double> x{1000.0, 1000.0};
  CHECK(log_sum_exp(x) == doctest::Approx(1000.0 + std::log(2.0)));
  std::vector<double> y{-1000.0, -1e9};
  CHECK(log_sum_exp(y) == doctest::Approx(-1000.0));
  CHECK(std::isinf(log_sum_exp(std::vector<double>{})));
}

TEST_CASE("soft_max_value against direct evaluation") {
  std::vector<double> x{0.3, -1.2, 2.0};
  for (double tau : {0.5, 1.0, 3.0}) {
    double s = 0.0;
    for (double v : x) s += std::exp(v / tau);
    CHECK(soft_max_value(x, tau) == doctest::Approx(tau * std::log(s)).epsilon(1e-14));
  }
  // small temperatures approach the max without overflow
  CHECK(soft_max_value(x, 1e-6) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("softmax rows are distributions and limits behave") {
  std::vector<double> x{1.0, 0.0}, p(2);
  softmax(x, 1.0, p);
  CHECK(p[0] == doctest::Approx(std::exp(1.0) / (1.0 + std::exp(1.0))));
  softmax(x, 1e-3, p);
  CHECK(p[0] == doctest::Approx(1.0));
  softmax(x, 1e3, p);
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-3));
  std::vector<double> big{1e308, 1e308}, q(2);
  softmax(big, 1e-3, q);
  CHECK(q[0] == doctest::Approx(0.5));
}

TEST_CASE("entropy uses 0 log 0 = 0") {
  CHECK(entropy(std::vector<double>{1.0, 0.0}) == 0.0);
  CHECK(entropy(std::vector<double>{0.5, 0.5}) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("golden section finds interior minima of convex functions") {
  for (double target : {1e-3, 0.7, 42.0, 3e4}) {
    auto f = [target](double x) {
      const double d = std::log(x) - std::log(target);
      return d * d + 1.0;
    };
    const LineSearchResult r = golden_section_log(f);
    CHECK(r.argmin == doctest::Approx(target).epsilon(1e-6));
    CHECK_FALSE(r.boundary);
  }
  // a*x + b/x has its minimum at sqrt(b/a)
  auto g = [](double x) { return 2.0 * x + 8.0 / x; };
  CHECK(golden_section_log(g).argmin == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("golden section widens once and flags boundary optima") {
  auto increasing = [](double x) { return x; };
  LineSearchResult r = golden_section_log(increasing);
  CHECK(r.boundary);
  CHECK(r.argmin == doctest::Approx(1e-9).epsilon(1e-6));

  // minimum just below the bracket but inside the widened one
  auto f = [](double x) {
    const double d = std::log(x) - std::log(1e-7);
    return d * d;
  };
  r = golden_section_log(f);
  CHECK_FALSE(r.boundary);
  CHECK(r.argmin == doctest::Approx(1e-7).epsilon(1e-6));

  auto decreasing = [](double x) { return 1.0 / x; };
  r = golden_section_log(decreasing);
  CHECK(r.boundary);
  CHECK(r.argmin == doctest::Approx(1e9).epsilon(1e-6));
}

TEST_CASE("golden section rejects bad brackets") {
  LineSearchOptions o;
  o.lower = 0.0;
  CHECK_THROWS(golden_section_log([](double x) { return x; }, o));
  o.lower = 2.0;
  o.upper = 1.0;
  CHECK_THROWS(golden_section_log([](double x) { return x; }, o));
}
