#include "motionstyle/nn/ops.hpp"

#include "motionstyle/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

namespace motionstyle::nn {

namespace {

thread_local bool g_grad_enabled = true;

template <typename T>
void require_same(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  if (!a.same_shape(b)) {
    raise(ErrorCode::ShapeMismatch,
          std::string(op) + ": shape mismatch [" + std::to_string(a.n()) + "," +
              std::to_string(a.t()) + "," + std::to_string(a.c()) + "] vs [" +
              std::to_string(b.n()) + "," + std::to_string(b.t()) + "," +
              std::to_string(b.c()) + "]");
  }
}

template <typename T>
void accumulate(Node<T>* node, const Tensor<T>& g) {
  if (!node->requires_grad) return;
  auto& buf = node->grad_buffer();
  buf.mat() += g.mat();
}

template <typename T>
void require_bt(const Tensor<T>& x, const Tensor<T>& v, const char* op) {
  if (v.t() != 1 || v.c() != x.c() || (v.n() != x.n() && v.n() != 1)) {
    raise(ErrorCode::ShapeMismatch, std::string(op) + ": bad broadcast vector shape");
  }
}

}  // namespace

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }
bool grad_enabled() { return g_grad_enabled; }

template <typename T>
void backward(const Var<T>& root) {
  if (!root.requires_grad()) return;
  std::vector<Node<T>*> order;
  std::unordered_set<Node<T>*> visited;
  std::vector<std::pair<Node<T>*, std::size_t>> stack;
  stack.emplace_back(root.node(), 0);
  visited.insert(root.node());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node<T>* p = node->parents[next++].get();
      if (p->requires_grad && visited.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  root.node()->grad_buffer().fill(T(1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<T>* node = *it;
    if (node->backward && !node->grad.empty()) {
      node->backward(node->grad);
      // Interior gradients are not needed after propagation.
      node->grad = Tensor<T>();
    }
  }
}

template <typename T>
Var<T> conv1d(const Var<T>& x, const Var<T>& weight, const Var<T>& bias, int stride, int pad) {
  const auto& xv = x.value();
  const auto& wv = weight.value();
  const int kernel = wv.n();
  const int cin = wv.t();
  const int cout = wv.c();
  if (xv.c() != cin) raise(ErrorCode::ShapeMismatch, "conv1d: channel mismatch");
  if (bias.defined() && bias.value().c() != cout) raise(ErrorCode::ShapeMismatch, "conv1d: bias");
  const int batch = xv.n();
  const int tin = xv.t();
  const int tout = (tin + 2 * pad - kernel) / stride + 1;
  if (tout <= 0) raise(ErrorCode::TooShort, "conv1d: input shorter than kernel");

  using Mat = typename Tensor<T>::Matrix;
  const Eigen::Index rows = static_cast<Eigen::Index>(batch) * tout;
  Mat cols = Mat::Zero(rows, static_cast<Eigen::Index>(kernel) * cin);
  for (int b = 0; b < batch; ++b) {
    for (int to = 0; to < tout; ++to) {
      T* dst = cols.data() + (static_cast<Eigen::Index>(b) * tout + to) * kernel * cin;
      for (int k = 0; k < kernel; ++k) {
        const int ti = to * stride - pad + k;
        if (ti < 0 || ti >= tin) continue;
        std::copy_n(xv.row(b, ti), cin, dst + k * cin);
      }
    }
  }
  auto wmat = typename Tensor<T>::ConstMatrixMap(wv.data(), static_cast<Eigen::Index>(kernel) * cin, cout);
  Tensor<T> out(batch, tout, cout);
  out.mat().noalias() = cols * wmat;
  if (bias.defined()) out.mat().rowwise() += bias.value().mat().row(0);

  Node<T>* xn = x.node();
  Node<T>* wn = weight.node();
  Node<T>* bn = bias.defined() ? bias.node() : nullptr;
  std::vector<Var<T>> inputs{x, weight};
  if (bias.defined()) inputs.push_back(bias);
  return record<T>(std::move(out), std::move(inputs),
                   [xn, wn, bn, cols = std::move(cols), batch, tin, tout, kernel, cin, cout, stride,
                    pad](const Tensor<T>& g) {
                     auto gm = g.mat();
                     auto w = typename Tensor<T>::ConstMatrixMap(
                         wn->value.data(), static_cast<Eigen::Index>(kernel) * cin, cout);
                     if (wn->requires_grad) {
                       auto gw = typename Tensor<T>::MatrixMap(
                           wn->grad_buffer().data(), static_cast<Eigen::Index>(kernel) * cin, cout);
                       gw.noalias() += cols.transpose() * gm;
                     }
                     if (bn && bn->requires_grad) {
                       bn->grad_buffer().mat().row(0) += gm.colwise().sum();
                     }
                     if (xn->requires_grad) {
                       typename Tensor<T>::Matrix dcols = gm * w.transpose();
                       auto& gx = xn->grad_buffer();
                       for (int b = 0; b < batch; ++b) {
                         for (int to = 0; to < tout; ++to) {
                           const T* src = dcols.data() +
                                          (static_cast<Eigen::Index>(b) * tout + to) * kernel * cin;
                           for (int k = 0; k < kernel; ++k) {
                             const int ti = to * stride - pad + k;
                             if (ti < 0 || ti >= tin) continue;
                             T* dst = gx.row(b, ti);
                             for (int c = 0; c < cin; ++c) dst[c] += src[k * cin + c];
                           }
                         }
                       }
                     }
                   });
}

template <typename T>
Var<T> linear(const Var<T>& x, const Var<T>& weight, const Var<T>& bias) {
  const auto& xv = x.value();
  const auto& wv = weight.value();
  if (wv.n() != 1 || wv.t() != xv.c()) raise(ErrorCode::ShapeMismatch, "linear: weight shape");
  Tensor<T> out(xv.n(), xv.t(), wv.c());
  auto wmat = typename Tensor<T>::ConstMatrixMap(wv.data(), wv.t(), wv.c());
  out.mat().noalias() = xv.mat() * wmat;
  if (bias.defined()) out.mat().rowwise() += bias.value().mat().row(0);
  Node<T>* xn = x.node();
  Node<T>* wn = weight.node();
  Node<T>* bn = bias.defined() ? bias.node() : nullptr;
  std::vector<Var<T>> inputs{x, weight};
  if (bias.defined()) inputs.push_back(bias);
  return record<T>(std::move(out), std::move(inputs), [xn, wn, bn](const Tensor<T>& g) {
    const auto& wv = wn->value;
    auto w = typename Tensor<T>::ConstMatrixMap(wv.data(), wv.t(), wv.c());
    if (wn->requires_grad) {
      auto gw = typename Tensor<T>::MatrixMap(wn->grad_buffer().data(), wv.t(), wv.c());
      gw.noalias() += xn->value.mat().transpose() * g.mat();
    }
    if (bn && bn->requires_grad) bn->grad_buffer().mat().row(0) += g.mat().colwise().sum();
    if (xn->requires_grad) xn->grad_buffer().mat().noalias() += g.mat() * w.transpose();
  });
}

template <typename T>
Var<T> upsample(const Var<T>& x, int factor) {
  const auto& xv = x.value();
  Tensor<T> out(xv.n(), xv.t() * factor, xv.c());
  for (int b = 0; b < xv.n(); ++b)
    for (int t = 0; t < xv.t(); ++t)
      for (int r = 0; r < factor; ++r) std::copy_n(xv.row(b, t), xv.c(), out.row(b, t * factor + r));
  Node<T>* xn = x.node();
  return record<T>(std::move(out), {x}, [xn, factor](const Tensor<T>& g) {
    auto& gx = xn->grad_buffer();
    for (int b = 0; b < gx.n(); ++b)
      for (int t = 0; t < gx.t(); ++t)
        for (int r = 0; r < factor; ++r) {
          const T* src = g.row(b, t * factor + r);
          T* dst = gx.row(b, t);
          for (int c = 0; c < gx.c(); ++c) dst[c] += src[c];
        }
  });
}

template <typename T>
Var<T> leaky_relu(const Var<T>& x, T slope) {
  const auto& xv = x.value();
  Tensor<T> out = xv;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i] < T(0)) out[i] *= slope;
  Node<T>* xn = x.node();
  return record<T>(std::move(out), {x}, [xn, slope](const Tensor<T>& g) {
    auto& gx = xn->grad_buffer();
    const auto& xv = xn->value;
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += xv[i] < T(0) ? slope * g[i] : g[i];
  });
}

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  require_same(a.value(), b.value(), "add");
  Tensor<T> out = a.value();
  out.mat() += b.value().mat();
  Node<T>* an = a.node();
  Node<T>* bn = b.node();
  return record<T>(std::move(out), {a, b}, [an, bn](const Tensor<T>& g) {
    accumulate(an, g);
    accumulate(bn, g);
  });
}

template <typename T>
Var<T> sub(const Var<T>& a, const Var<T>& b) {
  require_same(a.value(), b.value(), "sub");
  Tensor<T> out = a.value();
  out.mat() -= b.value().mat();
  Node<T>* an = a.node();
  Node<T>* bn = b.node();
  return record<T>(std::move(out), {a, b}, [an, bn](const Tensor<T>& g) {
    accumulate(an, g);
    if (bn->requires_grad) bn->grad_buffer().mat() -= g.mat();
  });
}

template <typename T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
  require_same(a.value(), b.value(), "mul");
  Tensor<T> out = a.value();
  out.mat().array() *= b.value().mat().array();
  Node<T>* an = a.node();
  Node<T>* bn = b.node();
  return record<T>(std::move(out), {a, b}, [an, bn](const Tensor<T>& g) {
    if (an->requires_grad)
      an->grad_buffer().mat().array() += g.mat().array() * bn->value.mat().array();
    if (bn->requires_grad)
      bn->grad_buffer().mat().array() += g.mat().array() * an->value.mat().array();
  });
}

template <typename T>
Var<T> scale(const Var<T>& a, T s) {
  Tensor<T> out = a.value();
  out.mat() *= s;
  Node<T>* an = a.node();
  return record<T>(std::move(out), {a},
                   [an, s](const Tensor<T>& g) { an->grad_buffer().mat() += s * g.mat(); });
}

template <typename T>
Var<T> exp(const Var<T>& a) {
  Tensor<T> out = a.value();
  out.mat() = out.mat().array().exp().matrix();
  Node<T>* an = a.node();
  auto result = record<T>(std::move(out), {a}, nullptr);
  if (result.requires_grad()) {
    Node<T>* on = result.node();
    result.node()->backward = [an, on](const Tensor<T>& g) {
      an->grad_buffer().mat().array() += g.mat().array() * on->value.mat().array();
    };
  }
  return result;
}

template <typename T>
Var<T> add_over_time(const Var<T>& x, const Var<T>& v) {
  const auto& xv = x.value();
  require_bt(xv, v.value(), "add_over_time");
  Tensor<T> out = xv;
  const bool shared = v.value().n() == 1;
  for (int b = 0; b < xv.n(); ++b) {
    const T* vr = v.value().row(shared ? 0 : b, 0);
    for (int t = 0; t < xv.t(); ++t) {
      T* o = out.row(b, t);
      for (int c = 0; c < xv.c(); ++c) o[c] += vr[c];
    }
  }
  Node<T>* xn = x.node();
  Node<T>* vn = v.node();
  return record<T>(std::move(out), {x, v}, [xn, vn, shared](const Tensor<T>& g) {
    accumulate(xn, g);
    if (vn->requires_grad) {
      auto& gv = vn->grad_buffer();
      for (int b = 0; b < g.n(); ++b) {
        T* dst = gv.row(shared ? 0 : b, 0);
        for (int t = 0; t < g.t(); ++t) {
          const T* src = g.row(b, t);
          for (int c = 0; c < g.c(); ++c) dst[c] += src[c];
        }
      }
    }
  });
}

template <typename T>
Var<T> mul_over_time(const Var<T>& x, const Var<T>& v) {
  const auto& xv = x.value();
  require_bt(xv, v.value(), "mul_over_time");
  Tensor<T> out = xv;
  const bool shared = v.value().n() == 1;
  for (int b = 0; b < xv.n(); ++b) {
    const T* vr = v.value().row(shared ? 0 : b, 0);
    for (int t = 0; t < xv.t(); ++t) {
      T* o = out.row(b, t);
      for (int c = 0; c < xv.c(); ++c) o[c] *= vr[c];
    }
  }
  Node<T>* xn = x.node();
  Node<T>* vn = v.node();
  return record<T>(std::move(out), {x, v}, [xn, vn, shared](const Tensor<T>& g) {
    const auto& xv = xn->value;
    const auto& vv = vn->value;
    if (xn->requires_grad) {
      auto& gx = xn->grad_buffer();
      for (int b = 0; b < g.n(); ++b) {
        const T* vr = vv.row(shared ? 0 : b, 0);
        for (int t = 0; t < g.t(); ++t) {
          const T* src = g.row(b, t);
          T* dst = gx.row(b, t);
          for (int c = 0; c < g.c(); ++c) dst[c] += src[c] * vr[c];
        }
      }
    }
    if (vn->requires_grad) {
      auto& gv = vn->grad_buffer();
      for (int b = 0; b < g.n(); ++b) {
        T* dst = gv.row(shared ? 0 : b, 0);
        for (int t = 0; t < g.t(); ++t) {
          const T* src = g.row(b, t);
          const T* xr = xv.row(b, t);
          for (int c = 0; c < g.c(); ++c) dst[c] += src[c] * xr[c];
        }
      }
    }
  });
}

template <typename T>
Var<T> instance_norm(const Var<T>& x, T eps) {
  const auto& xv = x.value();
  const int batch = xv.n();
  const int steps = xv.t();
  const int chans = xv.c();
  Tensor<T> out(batch, steps, chans);
  Tensor<T> inv_std(batch, 1, chans);
  for (int b = 0; b < batch; ++b) {
    for (int c = 0; c < chans; ++c) {
      T mean = 0;
      for (int t = 0; t < steps; ++t) mean += xv.at(b, t, c);
      mean /= steps;
      T var = 0;
      for (int t = 0; t < steps; ++t) {
        const T d = xv.at(b, t, c) - mean;
        var += d * d;
      }
      var /= steps;
      const T is = T(1) / std::sqrt(var + eps);
      inv_std.at(b, 0, c) = is;
      for (int t = 0; t < steps; ++t) out.at(b, t, c) = (xv.at(b, t, c) - mean) * is;
    }
  }
  Node<T>* xn = x.node();
  auto result = record<T>(std::move(out), {x}, nullptr);
  if (result.requires_grad()) {
    Node<T>* on = result.node();
    on->backward = [xn, on, inv_std = std::move(inv_std)](const Tensor<T>& g) {
      const auto& y = on->value;
      auto& gx = xn->grad_buffer();
      const int steps = y.t();
      for (int b = 0; b < y.n(); ++b) {
        for (int c = 0; c < y.c(); ++c) {
          T mg = 0;
          T mgy = 0;
          for (int t = 0; t < steps; ++t) {
            mg += g.at(b, t, c);
            mgy += g.at(b, t, c) * y.at(b, t, c);
          }
          mg /= steps;
          mgy /= steps;
          const T is = inv_std.at(b, 0, c);
          for (int t = 0; t < steps; ++t)
            gx.at(b, t, c) += is * (g.at(b, t, c) - mg - y.at(b, t, c) * mgy);
        }
      }
    };
  }
  return result;
}

template <typename T>
Var<T> adain(const Var<T>& x, const Var<T>& gamma, const Var<T>& beta, T eps) {
  return add_over_time(mul_over_time(instance_norm(x, eps), gamma), beta);
}

template <typename T>
Var<T> mean_time(const Var<T>& x) {
  const auto& xv = x.value();
  Tensor<T> out(xv.n(), 1, xv.c());
  for (int b = 0; b < xv.n(); ++b) {
    T* o = out.row(b, 0);
    for (int t = 0; t < xv.t(); ++t) {
      const T* r = xv.row(b, t);
      for (int c = 0; c < xv.c(); ++c) o[c] += r[c];
    }
    for (int c = 0; c < xv.c(); ++c) o[c] /= xv.t();
  }
  Node<T>* xn = x.node();
  return record<T>(std::move(out), {x}, [xn](const Tensor<T>& g) {
    auto& gx = xn->grad_buffer();
    const T inv = T(1) / gx.t();
    for (int b = 0; b < gx.n(); ++b) {
      const T* src = g.row(b, 0);
      for (int t = 0; t < gx.t(); ++t) {
        T* dst = gx.row(b, t);
        for (int c = 0; c < gx.c(); ++c) dst[c] += src[c] * inv;
      }
    }
  });
}

template <typename T>
Var<T> concat_channels(const Var<T>& a, const Var<T>& b) {
  const auto& av = a.value();
  const auto& bv = b.value();
  if (av.n() != bv.n() || av.t() != bv.t()) raise(ErrorCode::ShapeMismatch, "concat_channels");
  const int ca = av.c();
  const int cb = bv.c();
  Tensor<T> out(av.n(), av.t(), ca + cb);
  for (int n = 0; n < av.n(); ++n)
    for (int t = 0; t < av.t(); ++t) {
      std::copy_n(av.row(n, t), ca, out.row(n, t));
      std::copy_n(bv.row(n, t), cb, out.row(n, t) + ca);
    }
  Node<T>* an = a.node();
  Node<T>* bn = b.node();
  return record<T>(std::move(out), {a, b}, [an, bn, ca, cb](const Tensor<T>& g) {
    for (int n = 0; n < g.n(); ++n)
      for (int t = 0; t < g.t(); ++t) {
        const T* src = g.row(n, t);
        if (an->requires_grad) {
          T* d = an->grad_buffer().row(n, t);
          for (int c = 0; c < ca; ++c) d[c] += src[c];
        }
        if (bn->requires_grad) {
          T* d = bn->grad_buffer().row(n, t);
          for (int c = 0; c < cb; ++c) d[c] += src[ca + c];
        }
      }
  });
}

template <typename T>
Var<T> embedding(const Var<T>& table, std::span<const int> labels) {
  const auto& tv = table.value();
  const int dim = tv.c();
  Tensor<T> out(static_cast<int>(labels.size()), 1, dim);
  std::vector<int> idx(labels.begin(), labels.end());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= tv.t()) raise(ErrorCode::OutOfRange, "embedding: label out of range");
    std::copy_n(tv.row(0, idx[i]), dim, out.row(static_cast<int>(i), 0));
  }
  Node<T>* tn = table.node();
  return record<T>(std::move(out), {table}, [tn, idx = std::move(idx), dim](const Tensor<T>& g) {
    auto& gt = tn->grad_buffer();
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const T* src = g.row(static_cast<int>(i), 0);
      T* dst = gt.row(0, idx[i]);
      for (int c = 0; c < dim; ++c) dst[c] += src[c];
    }
  });
}

template <typename T>
Var<T> crop_time(const Var<T>& x, int start, int length) {
  const auto& xv = x.value();
  if (start < 0 || length < 0 || start + length > xv.t())
    raise(ErrorCode::ShapeMismatch, "crop_time: window out of range");
  Tensor<T> out(xv.n(), length, xv.c());
  for (int b = 0; b < xv.n(); ++b)
    for (int t = 0; t < length; ++t) std::copy_n(xv.row(b, start + t), xv.c(), out.row(b, t));
  Node<T>* xn = x.node();
  return record<T>(std::move(out), {x}, [xn, start, length](const Tensor<T>& g) {
    auto& gx = xn->grad_buffer();
    for (int b = 0; b < g.n(); ++b)
      for (int t = 0; t < length; ++t) {
        const T* src = g.row(b, t);
        T* dst = gx.row(b, start + t);
        for (int c = 0; c < g.c(); ++c) dst[c] += src[c];
      }
  });
}

template <typename T>
Var<T> temporal_diff(const Var<T>& x) {
  const auto& xv = x.value();
  if (xv.t() < 2) raise(ErrorCode::TooShort, "temporal_diff: need two steps");
  Tensor<T> out(xv.n(), xv.t() - 1, xv.c());
  for (int b = 0; b < xv.n(); ++b)
    for (int t = 0; t + 1 < xv.t(); ++t) {
      const T* r0 = xv.row(b, t);
      const T* r1 = xv.row(b, t + 1);
      T* o = out.row(b, t);
      for (int c = 0; c < xv.c(); ++c) o[c] = r1[c] - r0[c];
    }
  Node<T>* xn = x.node();
  return record<T>(std::move(out), {x}, [xn](const Tensor<T>& g) {
    auto& gx = xn->grad_buffer();
    for (int b = 0; b < g.n(); ++b)
      for (int t = 0; t < g.t(); ++t) {
        const T* src = g.row(b, t);
        T* d0 = gx.row(b, t);
        T* d1 = gx.row(b, t + 1);
        for (int c = 0; c < g.c(); ++c) {
          d0[c] -= src[c];
          d1[c] += src[c];
        }
      }
  });
}

template <typename T>
Var<T> mean_abs(const Var<T>& x) {
  const auto& xv = x.value();
  const T inv = T(1) / static_cast<T>(xv.size());
  T acc = 0;
  for (std::size_t i = 0; i < xv.size(); ++i) acc += std::abs(xv[i]);
  Node<T>* xn = x.node();
  return record<T>(Tensor<T>::scalar(acc * inv), {x}, [xn, inv](const Tensor<T>& g) {
    auto& gx = xn->grad_buffer();
    const auto& xv = xn->value;
    const T s = g[0] * inv;
    for (std::size_t i = 0; i < xv.size(); ++i)
      gx[i] += xv[i] > T(0) ? s : (xv[i] < T(0) ? -s : T(0));
  });
}

template <typename T>
Var<T> l1_loss(const Var<T>& a, const Var<T>& b) {
  require_same(a.value(), b.value(), "l1_loss");
  const auto& av = a.value();
  const auto& bv = b.value();
  const T inv = T(1) / static_cast<T>(av.size());
  T acc = 0;
  for (std::size_t i = 0; i < av.size(); ++i) acc += std::abs(av[i] - bv[i]);
  Node<T>* an = a.node();
  Node<T>* bn = b.node();
  return record<T>(Tensor<T>::scalar(acc * inv), {a, b}, [an, bn, inv](const Tensor<T>& g) {
    const auto& av = an->value;
    const auto& bv = bn->value;
    const T s = g[0] * inv;
    for (std::size_t i = 0; i < av.size(); ++i) {
      const T d = av[i] - bv[i];
      const T sg = d > T(0) ? s : (d < T(0) ? -s : T(0));
      if (an->requires_grad) an->grad_buffer()[i] += sg;
      if (bn->requires_grad) bn->grad_buffer()[i] -= sg;
    }
  });
}

template <typename T>
Var<T> mse_loss(const Var<T>& a, const Var<T>& b) {
  require_same(a.value(), b.value(), "mse_loss");
  const auto& av = a.value();
  const auto& bv = b.value();
  const T inv = T(1) / static_cast<T>(av.size());
  T acc = 0;
  for (std::size_t i = 0; i < av.size(); ++i) acc += (av[i] - bv[i]) * (av[i] - bv[i]);
  Node<T>* an = a.node();
  Node<T>* bn = b.node();
  return record<T>(Tensor<T>::scalar(acc * inv), {a, b}, [an, bn, inv](const Tensor<T>& g) {
    const auto& av = an->value;
    const auto& bv = bn->value;
    const T s = T(2) * g[0] * inv;
    for (std::size_t i = 0; i < av.size(); ++i) {
      const T d = s * (av[i] - bv[i]);
      if (an->requires_grad) an->grad_buffer()[i] += d;
      if (bn->requires_grad) bn->grad_buffer()[i] -= d;
    }
  });
}

template <typename T>
Var<T> kl_diag(const Var<T>& mu1, const Var<T>& logvar1, const Var<T>& mu2, const Var<T>& logvar2,
               bool per_dim) {
  const auto& m1 = mu1.value();
  const auto& l1 = logvar1.value();
  const auto& m2 = mu2.value();
  const auto& l2 = logvar2.value();
  require_same(m1, l1, "kl_diag");
  require_same(m1, m2, "kl_diag");
  require_same(m1, l2, "kl_diag");
  T norm = T(1) / static_cast<T>(m1.n());
  if (per_dim) norm /= static_cast<T>(m1.c() * m1.t());
  T acc = 0;
  for (std::size_t i = 0; i < m1.size(); ++i) {
    const T d = m1[i] - m2[i];
    acc += T(0.5) * (l2[i] - l1[i] + (std::exp(l1[i]) + d * d) * std::exp(-l2[i]) - T(1));
  }
  Node<T>* n_m1 = mu1.node();
  Node<T>* n_l1 = logvar1.node();
  Node<T>* n_m2 = mu2.node();
  Node<T>* n_l2 = logvar2.node();
  return record<T>(Tensor<T>::scalar(acc * norm), {mu1, logvar1, mu2, logvar2},
                   [n_m1, n_l1, n_m2, n_l2, norm](const Tensor<T>& g) {
                     const T s = g[0] * norm;
                     const auto& m1 = n_m1->value;
                     const auto& l1 = n_l1->value;
                     const auto& m2 = n_m2->value;
                     const auto& l2 = n_l2->value;
                     for (std::size_t i = 0; i < m1.size(); ++i) {
                       const T d = m1[i] - m2[i];
                       const T inv2 = std::exp(-l2[i]);
                       if (n_m1->requires_grad) n_m1->grad_buffer()[i] += s * d * inv2;
                       if (n_m2->requires_grad) n_m2->grad_buffer()[i] -= s * d * inv2;
                       if (n_l1->requires_grad)
                         n_l1->grad_buffer()[i] += s * T(0.5) * (std::exp(l1[i]) * inv2 - T(1));
                       if (n_l2->requires_grad)
                         n_l2->grad_buffer()[i] +=
                             s * T(0.5) * (T(1) - (std::exp(l1[i]) + d * d) * inv2);
                     }
                   });
}

template <typename T>
Var<T> kl_standard(const Var<T>& mu, const Var<T>& logvar, bool per_dim) {
  const auto& m = mu.value();
  const auto& l = logvar.value();
  require_same(m, l, "kl_standard");
  T norm = T(1) / static_cast<T>(m.n());
  if (per_dim) norm /= static_cast<T>(m.c() * m.t());
  T acc = 0;
  for (std::size_t i = 0; i < m.size(); ++i)
    acc += T(0.5) * (std::exp(l[i]) + m[i] * m[i] - T(1) - l[i]);
  Node<T>* mn = mu.node();
  Node<T>* ln = logvar.node();
  return record<T>(Tensor<T>::scalar(acc * norm), {mu, logvar}, [mn, ln, norm](const Tensor<T>& g) {
    const T s = g[0] * norm;
    const auto& m = mn->value;
    const auto& l = ln->value;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (mn->requires_grad) mn->grad_buffer()[i] += s * m[i];
      if (ln->requires_grad) ln->grad_buffer()[i] += s * T(0.5) * (std::exp(l[i]) - T(1));
    }
  });
}

template <typename T>
Var<T> reparameterize(const Var<T>& mu, const Var<T>& logvar, const Tensor<T>& noise) {
  require_same(mu.value(), logvar.value(), "reparameterize");
  require_same(mu.value(), noise, "reparameterize");
  return add(mu, mul(exp(scale(logvar, T(0.5))), constant(noise)));
}

template <typename T>
Var<T> cross_entropy(const Var<T>& logits, std::span<const int> labels) {
  const auto& lv = logits.value();
  const int batch = lv.n();
  const int classes = lv.c();
  if (lv.t() != 1 || static_cast<int>(labels.size()) != batch)
    raise(ErrorCode::ShapeMismatch, "cross_entropy: logits must be [batch, 1, classes]");
  Tensor<T> prob(batch, 1, classes);
  std::vector<int> idx(labels.begin(), labels.end());
  T acc = 0;
  for (int b = 0; b < batch; ++b) {
    const T* r = lv.row(b, 0);
    const T mx = *std::max_element(r, r + classes);
    T z = 0;
    for (int c = 0; c < classes; ++c) z += std::exp(r[c] - mx);
    for (int c = 0; c < classes; ++c) prob.at(b, 0, c) = std::exp(r[c] - mx) / z;
    if (idx[b] < 0 || idx[b] >= classes) raise(ErrorCode::OutOfRange, "cross_entropy: label");
    acc -= r[idx[b]] - mx - std::log(z);
  }
  Node<T>* ln = logits.node();
  return record<T>(Tensor<T>::scalar(acc / batch), {logits},
                   [ln, prob = std::move(prob), idx = std::move(idx)](const Tensor<T>& g) {
                     auto& gl = ln->grad_buffer();
                     const T s = g[0] / static_cast<T>(prob.n());
                     for (int b = 0; b < prob.n(); ++b)
                       for (int c = 0; c < prob.c(); ++c)
                         gl.at(b, 0, c) += s * (prob.at(b, 0, c) - (c == idx[b] ? T(1) : T(0)));
                   });
}

template <typename T>
Var<T> weighted_sum(const std::vector<Var<T>>& terms, const std::vector<T>& weights) {
  if (terms.size() != weights.size()) raise(ErrorCode::ShapeMismatch, "weighted_sum");
  T acc = 0;
  std::vector<Node<T>*> nodes;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    acc += weights[i] * terms[i].item();
    nodes.push_back(terms[i].node());
  }
  return record<T>(Tensor<T>::scalar(acc), terms, [nodes, weights](const Tensor<T>& g) {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i]->requires_grad) nodes[i]->grad_buffer()[0] += weights[i] * g[0];
  });
}

#define MOTIONSTYLE_INSTANTIATE_OPS(T)                                                          \
  template void backward<T>(const Var<T>&);                                                     \
  template Var<T> conv1d<T>(const Var<T>&, const Var<T>&, const Var<T>&, int, int);             \
  template Var<T> linear<T>(const Var<T>&, const Var<T>&, const Var<T>&);                       \
  template Var<T> upsample<T>(const Var<T>&, int);                                              \
  template Var<T> leaky_relu<T>(const Var<T>&, T);                                              \
  template Var<T> add<T>(const Var<T>&, const Var<T>&);                                         \
  template Var<T> sub<T>(const Var<T>&, const Var<T>&);                                         \
  template Var<T> mul<T>(const Var<T>&, const Var<T>&);                                         \
  template Var<T> scale<T>(const Var<T>&, T);                                                   \
  template Var<T> exp<T>(const Var<T>&);                                                        \
  template Var<T> add_over_time<T>(const Var<T>&, const Var<T>&);                               \
  template Var<T> mul_over_time<T>(const Var<T>&, const Var<T>&);                               \
  template Var<T> instance_norm<T>(const Var<T>&, T);                                           \
  template Var<T> adain<T>(const Var<T>&, const Var<T>&, const Var<T>&, T);                     \
  template Var<T> mean_time<T>(const Var<T>&);                                                  \
  template Var<T> concat_channels<T>(const Var<T>&, const Var<T>&);                             \
  template Var<T> embedding<T>(const Var<T>&, std::span<const int>);                            \
  template Var<T> crop_time<T>(const Var<T>&, int, int);                                        \
  template Var<T> temporal_diff<T>(const Var<T>&);                                              \
  template Var<T> mean_abs<T>(const Var<T>&);                                                   \
  template Var<T> l1_loss<T>(const Var<T>&, const Var<T>&);                                     \
  template Var<T> mse_loss<T>(const Var<T>&, const Var<T>&);                                    \
  template Var<T> kl_diag<T>(const Var<T>&, const Var<T>&, const Var<T>&, const Var<T>&, bool); \
  template Var<T> kl_standard<T>(const Var<T>&, const Var<T>&, bool);                           \
  template Var<T> reparameterize<T>(const Var<T>&, const Var<T>&, const Tensor<T>&);            \
  template Var<T> cross_entropy<T>(const Var<T>&, std::span<const int>);                        \
  template Var<T> weighted_sum<T>(const std::vector<Var<T>>&, const std::vector<T>&);

MOTIONSTYLE_INSTANTIATE_OPS(float)
MOTIONSTYLE_INSTANTIATE_OPS(double)

}  // namespace motionstyle::nn
