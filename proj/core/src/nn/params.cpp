#include "motionstyle/nn/params.hpp"

#include "motionstyle/error.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace motionstyle::nn {

namespace {

constexpr char kMagic[4] = {'M', 'S', 'T', 'W'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "tensor blobs are little-endian; big-endian hosts need byte swapping");

template <typename V>
void put(std::ofstream& out, V v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(V));
}

template <typename V>
V get(std::ifstream& in, const std::filesystem::path& path) {
  V v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(V));
  if (!in) raise(ErrorCode::ShapeMismatch, "truncated tensor blob: " + path.string());
  return v;
}

}  // namespace

void write_tensor_blob(const std::filesystem::path& path, const TensorMap& tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::IoError, "cannot write " + path.string());
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<std::int32_t>(out, t.n());
    put<std::int32_t>(out, t.t());
    put<std::int32_t>(out, t.c());
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.size() * sizeof(float)));
  }
  if (!out) raise(ErrorCode::IoError, "write failed: " + path.string());
}

TensorMap read_tensor_blob(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    raise(ErrorCode::BadMagic, "not a tensor blob: " + path.string());
  const auto version = get<std::uint32_t>(in, path);
  if (version != kVersion) raise(ErrorCode::UnsupportedVersion, "tensor blob version");
  const auto count = get<std::uint32_t>(in, path);
  TensorMap out;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = get<std::uint32_t>(in, path);
    std::string name(len, '\0');
    in.read(name.data(), len);
    const int n = get<std::int32_t>(in, path);
    const int t = get<std::int32_t>(in, path);
    const int c = get<std::int32_t>(in, path);
    if (n < 0 || t < 0 || c < 0) raise(ErrorCode::ShapeMismatch, "negative tensor shape");
    Tensor<float> tensor(n, t, c);
    in.read(reinterpret_cast<char*>(tensor.data()),
            static_cast<std::streamsize>(tensor.size() * sizeof(float)));
    if (!in) raise(ErrorCode::ShapeMismatch, "truncated tensor payload: " + name);
    out.emplace(std::move(name), std::move(tensor));
  }
  return out;
}

template <typename T>
void ParameterStore<T>::import_from(const TensorMap& in, const std::string& prefix) {
  for (auto& [name, v] : entries_) {
    auto it = in.find(prefix + name);
    if (it == in.end()) raise(ErrorCode::ShapeMismatch, "missing tensor " + prefix + name);
    const auto& src = it->second;
    if (src.n() != v.n() || src.t() != v.t() || src.c() != v.c())
      raise(ErrorCode::ShapeMismatch, "shape mismatch for tensor " + prefix + name);
    v.mutable_value() = src.template cast<T>();
  }
}

template class ParameterStore<float>;
template class ParameterStore<double>;

}  // namespace motionstyle::nn
