#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace klearn {

// max_i x_i + log sum_i exp(x_i - max). Empty input gives -inf.
double log_sum_exp(std::span<const double> x);

// tau * log sum_i exp(x_i / tau), evaluated max-shifted. Requires tau > 0.
double soft_max_value(std::span<const double> x, double tau);

// Writes exp(x_i / tau) / sum_j exp(x_j / tau) into out (same length as x).
void softmax(std::span<const double> x, double tau, std::span<double> out);

// Shannon entropy in nats with 0 log 0 := 0.
double entropy(std::span<const double> p);

struct LineSearchOptions {
  double lower = 1e-6;
  double upper = 1e6;
  // Stopping width of the bracket in log-space, i.e. a relative tolerance on the argument.
  double tolerance = 1e-8;
  int max_iterations = 200;
  // Factor applied to a bracket edge when the minimum sits on it (applied once).
  double widen_factor = 1e3;
};

struct LineSearchResult {
  double argmin = 0.0;
  double value = 0.0;
  int evaluations = 0;
  bool boundary = false;  // minimum still on a bracket edge after widening
};

// Golden-section search for the minimizer of a unimodal f over log(x), x in [lower, upper].
// If the minimizer lands on an edge the bracket is widened once on that side; if it is
// still on the edge the result is flagged as a boundary optimum.
LineSearchResult golden_section_log(const std::function<double(double)>& f,
                                    const LineSearchOptions& opts = {});

}  // namespace klearn
