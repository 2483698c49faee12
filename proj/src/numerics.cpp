#include "klearn/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace klearn {

double log_sum_exp(std::span<const double> x) {
  if (x.empty()) return -std::numeric_limits<double>::infinity();
  const double hi = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(hi)) return hi;
  double sum = 0.0;
  for (double v : x) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

double soft_max_value(std::span<const double> x, double tau) {
  if (x.empty()) return -std::numeric_limits<double>::infinity();
  const double hi = *std::max_element(x.begin(), x.end());
  double sum = 0.0;
  for (double v : x) sum += std::exp((v - hi) / tau);
  return hi + tau * std::log(sum);
}

void softmax(std::span<const double> x, double tau, std::span<double> out) {
  if (x.size() != out.size()) throw std::invalid_argument("softmax: size mismatch");
  if (x.empty()) return;
  const double hi = *std::max_element(x.begin(), x.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp((x[i] - hi) / tau);
    sum += out[i];
  }
  for (double& p : out) p /= sum;
}

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double q : p) {
    if (q > 0.0) h -= q * std::log(q);
  }
  return h;
}

namespace {

struct Bracket {
  double a, b;  // log-space
};

LineSearchResult golden(const std::function<double(double)>& f, Bracket br, double tol,
                        int max_iter) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  LineSearchResult res;
  double a = br.a, b = br.b;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(std::exp(c));
  double fd = f(std::exp(d));
  res.evaluations = 2;
  int it = 0;
  while ((b - a) > tol && it < max_iter) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(std::exp(d));
    }
    ++res.evaluations;
    ++it;
  }
  // Compare the interior best with both edges so monotone objectives land on the edge exactly.
  double best_x = fc <= fd ? c : d;
  double best_f = std::min(fc, fd);
  const double fa = f(std::exp(br.a));
  const double fb = f(std::exp(br.b));
  res.evaluations += 2;
  if (fa < best_f) {
    best_x = br.a;
    best_f = fa;
  }
  if (fb < best_f) {
    best_x = br.b;
    best_f = fb;
  }
  res.argmin = std::exp(best_x);
  res.value = best_f;
  return res;
}

bool near_edge(double x, double edge, double tol) { return std::abs(x - edge) <= 2.0 * tol; }

}  // namespace

LineSearchResult golden_section_log(const std::function<double(double)>& f,
                                    const LineSearchOptions& opts) {
  if (!(opts.lower > 0.0) || !(opts.upper > opts.lower))
    throw std::invalid_argument("golden_section_log: bracket must satisfy 0 < lower < upper");
  if (!(opts.tolerance > 0.0)) throw std::invalid_argument("golden_section_log: tolerance <= 0");

  Bracket br{std::log(opts.lower), std::log(opts.upper)};
  LineSearchResult res = golden(f, br, opts.tolerance, opts.max_iterations);
  const double lx = std::log(res.argmin);
  const double widen = std::log(opts.widen_factor);
  bool low_edge = near_edge(lx, br.a, opts.tolerance);
  bool high_edge = near_edge(lx, br.b, opts.tolerance);
  if (!low_edge && !high_edge) return res;

  Bracket wide = low_edge ? Bracket{br.a - widen, br.a + opts.tolerance}
                          : Bracket{br.b - opts.tolerance, br.b + widen};
  LineSearchResult again = golden(f, wide, opts.tolerance, opts.max_iterations);
  again.evaluations += res.evaluations;
  if (res.value < again.value) {
    again.argmin = res.argmin;
    again.value = res.value;
  }
  const double ax = std::log(again.argmin);
  again.boundary = low_edge ? near_edge(ax, wide.a, opts.tolerance)
                            : near_edge(ax, wide.b, opts.tolerance);
  return again;
}

}  // namespace klearn
