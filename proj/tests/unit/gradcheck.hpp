#pragma once

#include "motionstyle/nn/ops.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace gradcheck {

using motionstyle::nn::Tensor;
using motionstyle::nn::Var;

inline Tensor<double> random_tensor(int n, int t, int c, std::mt19937_64& rng, double lo = -1.0,
                                    double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor<double> x(n, t, c);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = u(rng);
  return x;
}

/// Worst relative error between analytic and central-difference gradients of
/// a scalar function of `inputs`, over at most `samples` entries per input.
inline double max_relative_error(std::vector<Var<double>> inputs,
                                 const std::function<Var<double>(const std::vector<Var<double>>&)>& f,
                                 int samples = 16, double h = 1e-6) {
  for (auto& v : inputs) v.zero_grad();
  Var<double> out = f(inputs);
  motionstyle::nn::backward(out);
  std::vector<Tensor<double>> analytic;
  for (auto& v : inputs) analytic.push_back(v.grad().empty() ? Tensor<double>(v.n(), v.t(), v.c()) : v.grad());
  std::mt19937_64 rng(1234);
  double worst = 0.0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    auto& value = inputs[k].mutable_value();
    std::uniform_int_distribution<std::size_t> pick(0, value.size() - 1);
    const int count = std::min<int>(samples, static_cast<int>(value.size()));
    for (int s = 0; s < count; ++s) {
      const std::size_t i = count == static_cast<int>(value.size()) ? s : pick(rng);
      const double saved = value[i];
      value[i] = saved + h;
      const double up = f(inputs).item();
      value[i] = saved - h;
      const double down = f(inputs).item();
      value[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[k][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace gradcheck
