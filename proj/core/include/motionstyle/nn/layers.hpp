#pragma once

#include "motionstyle/nn/ops.hpp"
#include "motionstyle/nn/params.hpp"

#include <random>
#include <string>

namespace motionstyle::nn {

template <typename T>
struct Conv1d {
  Var<T> weight;
  Var<T> bias;
  int stride = 1;
  int pad = 1;

  static Conv1d make(ParameterStore<T>& store, const std::string& name, int cin, int cout, int kernel,
                     int stride, std::mt19937_64& rng) {
    Conv1d c;
    c.weight = store.add_uniform(name + ".weight", kernel, cin, cout, kernel * cin, rng);
    c.bias = store.add_uniform(name + ".bias", 1, 1, cout, kernel * cin, rng);
    c.stride = stride;
    c.pad = kernel / 2;
    return c;
  }

  Var<T> operator()(const Var<T>& x) const { return conv1d(x, weight, bias, stride, pad); }
};

template <typename T>
struct Linear {
  Var<T> weight;
  Var<T> bias;

  static Linear make(ParameterStore<T>& store, const std::string& name, int in, int out,
                     std::mt19937_64& rng) {
    Linear l;
    l.weight = store.add_uniform(name + ".weight", 1, in, out, in, rng);
    l.bias = store.add_uniform(name + ".bias", 1, 1, out, in, rng);
    return l;
  }

  /// Zero weight and constant bias; used for heads that should start at a
  /// known value.
  static Linear make_constant(ParameterStore<T>& store, const std::string& name, int in, int out,
                              T bias_value) {
    Linear l;
    l.weight = store.add_constant(name + ".weight", 1, in, out, T(0));
    l.bias = store.add_constant(name + ".bias", 1, 1, out, bias_value);
    return l;
  }

  Var<T> operator()(const Var<T>& x) const { return linear(x, weight, bias); }
};

}  // namespace motionstyle::nn
