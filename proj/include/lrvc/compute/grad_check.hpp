// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "lrvc/compute/tape.hpp"

namespace lrvc {

struct GradCheckOptions {
  double epsilon = 1e-5;
  double tolerance = 1e-3;
  /// Denominator floor of the relative error, so that entries whose true
  /// gradient is zero are judged on absolute error.
  double floor = 1e-6;
  /// Entries checked per parameter; 0 checks all, otherwise a seeded subsample.
  std::size_t max_entries = 0;
  std::uint64_t seed = 0;
  /// Added to every reverse-mode entry. Used only to exercise failure paths.
  double analytic_perturbation = 0.0;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t entries_checked = 0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  double tolerance = 0.0;

  bool passed() const noexcept { return max_relative_error < tolerance; }
};

/// Compares reverse-mode gradients of a scalar function against central
/// differences. `fn` records the function on the tape it is given and returns
/// the scalar root; it must be deterministic.
template <class Fn>
GradCheckReport grad_check(Fn&& fn, const ParameterList<double>& params, const GradCheckOptions& options = {}) {
  for (auto* p : params) p->zero_grad();
  {
    Tape<double> tape;
    tape.backward(fn(tape));
  }
  std::vector<Tensor<double>> analytic;
  for (auto* p : params) analytic.push_back(p->grad);

  auto evaluate = [&fn]() {
    Tape<double> tape;
    return fn(tape).value()[0];
  };

  GradCheckReport report;
  report.tolerance = options.tolerance;
  std::mt19937_64 rng(options.seed);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& value = params[k]->value.values();
    std::vector<std::size_t> entries(value.size());
    std::iota(entries.begin(), entries.end(), std::size_t{0});
    if (options.max_entries && entries.size() > options.max_entries) {
      std::shuffle(entries.begin(), entries.end(), rng);
      entries.resize(options.max_entries);
      std::sort(entries.begin(), entries.end());
    }
    for (std::size_t i : entries) {
      const double saved = value[i];
      value[i] = saved + options.epsilon;
      const double up = evaluate();
      value[i] = saved - options.epsilon;
      const double down = evaluate();
      value[i] = saved;
      const double numeric = (up - down) / (2.0 * options.epsilon);
      const double a = analytic[k][i] + options.analytic_perturbation;
      const double denom = std::max({std::abs(a), std::abs(numeric), options.floor});
      const double rel = std::abs(a - numeric) / denom;
      ++report.entries_checked;
      if (report.worst_parameter.empty() || rel > report.max_relative_error) {
        report.max_relative_error = rel;
        report.worst_parameter = params[k]->name;
        report.worst_index = i;
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
  }
  for (auto* p : params) p->zero_grad();
  return report;
}

}  // namespace lrvc
