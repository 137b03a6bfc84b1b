#pragma once

#include "motionstyle/nn/autograd.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace motionstyle::nn {

/// Named float32 tensors as stored on disk.
using TensorMap = std::map<std::string, Tensor<float>>;

/// Binary container: "MSTW" magic, u32 version, u32 count, then per tensor
/// u32 name length, name bytes, 3 x i32 shape, float32 little-endian payload.
void write_tensor_blob(const std::filesystem::path& path, const TensorMap& tensors);
TensorMap read_tensor_blob(const std::filesystem::path& path);

/// Ordered collection of trainable tensors owned by one model.
template <typename T>
class ParameterStore {
 public:
  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialisation.
  Var<T> add_uniform(const std::string& name, int n, int t, int c, int fan_in, std::mt19937_64& rng) {
    Tensor<T> value(n, t, c);
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (std::size_t i = 0; i < value.size(); ++i) value[i] = static_cast<T>(dist(rng));
    return add(name, std::move(value));
  }

  Var<T> add_constant(const std::string& name, int n, int t, int c, T fill) {
    return add(name, Tensor<T>(n, t, c, fill));
  }

  Var<T> add(const std::string& name, Tensor<T> value) {
    Var<T> v = leaf(std::move(value), true);
    entries_.emplace_back(name, v);
    return v;
  }

  const std::vector<std::pair<std::string, Var<T>>>& entries() const { return entries_; }
  std::vector<std::pair<std::string, Var<T>>>& entries() { return entries_; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& [name, v] : entries_) n += v.value().size();
    return n;
  }

  void zero_grad() {
    for (auto& [name, v] : entries_) v.zero_grad();
  }

  void set_trainable(bool on) {
    for (auto& [name, v] : entries_) v.set_requires_grad(on);
  }

  /// Writes every tensor into `out` under `prefix + name`.
  void export_to(TensorMap& out, const std::string& prefix = "") const {
    for (const auto& [name, v] : entries_) out[prefix + name] = v.value().template cast<float>();
  }

  /// Loads every tensor from `in`; throws ShapeMismatch on missing names or shapes.
  void import_from(const TensorMap& in, const std::string& prefix = "");

  /// Copies values from another store with identical layout.
  template <typename U>
  void copy_from(const ParameterStore<U>& other) {
    TensorMap tmp;
    other.export_to(tmp);
    import_from(tmp);
  }

 private:
  std::vector<std::pair<std::string, Var<T>>> entries_;
};

extern template class ParameterStore<float>;
extern template class ParameterStore<double>;

}  // namespace motionstyle::nn
