#pragma once

#include "motionstyle/nn/params.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace motionstyle::nn {

struct AdamOptions {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int warmup_steps = 200;
  /// Global gradient-norm clip; <= 0 disables.
  double clip_norm = 0.0;
};

/// Adaptive-moment descent with linear learning-rate warmup.
template <typename T>
class Adam {
 public:
  explicit Adam(AdamOptions options) : options_(options) {}

  void attach(ParameterStore<T>& store) {
    for (auto& [name, v] : store.entries()) {
      if (!v.requires_grad()) continue;
      params_.push_back(v);
      m_.emplace_back(v.n(), v.t(), v.c());
      v_.emplace_back(v.n(), v.t(), v.c());
    }
  }

  double current_lr() const {
    const double warm = options_.warmup_steps > 0
                            ? std::min(1.0, static_cast<double>(step_ + 1) / options_.warmup_steps)
                            : 1.0;
    return options_.lr * warm;
  }

  /// Returns the pre-clip global gradient norm.
  double step() {
    double sq = 0.0;
    for (auto& p : params_) {
      const auto& g = p.grad();
      for (std::size_t i = 0; i < g.size(); ++i) sq += static_cast<double>(g[i]) * g[i];
    }
    const double norm = std::sqrt(sq);
    const double clip =
        options_.clip_norm > 0.0 && norm > options_.clip_norm ? options_.clip_norm / norm : 1.0;
    const double lr = current_lr();
    ++step_;
    const double bc1 = 1.0 - std::pow(options_.beta1, step_);
    const double bc2 = 1.0 - std::pow(options_.beta2, step_);
    for (std::size_t k = 0; k < params_.size(); ++k) {
      auto& p = params_[k];
      const auto& g = p.grad();
      if (g.empty()) continue;
      auto& w = p.mutable_value();
      auto& m = m_[k];
      auto& v = v_[k];
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double gi = clip * g[i];
        m[i] = static_cast<T>(options_.beta1 * m[i] + (1.0 - options_.beta1) * gi);
        v[i] = static_cast<T>(options_.beta2 * v[i] + (1.0 - options_.beta2) * gi * gi);
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        w[i] = static_cast<T>(w[i] - lr * mhat / (std::sqrt(vhat) + options_.eps));
      }
    }
    return norm;
  }

  void zero_grad() {
    for (auto& p : params_) p.zero_grad();
  }

  int steps_taken() const { return step_; }

 private:
  AdamOptions options_;
  std::vector<Var<T>> params_;
  std::vector<Tensor<T>> m_;
  std::vector<Tensor<T>> v_;
  int step_ = 0;
};

}  // namespace motionstyle::nn
