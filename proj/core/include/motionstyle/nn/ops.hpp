#pragma once

#include "motionstyle/nn/autograd.hpp"

#include <span>
#include <vector>

namespace motionstyle::nn {

// Layout conventions: activations are [batch, time, channel]; conv weights are
// [kernel, in_channels, out_channels]; linear weights are [1, in, out]; biases
// and per-sample vectors are [1 or batch, 1, channel].

/// Temporal convolution with zero padding. Output length is
/// (t + 2*pad - kernel) / stride + 1.
template <typename T>
Var<T> conv1d(const Var<T>& x, const Var<T>& weight, const Var<T>& bias, int stride, int pad);

/// Dense layer applied to every time step.
template <typename T>
Var<T> linear(const Var<T>& x, const Var<T>& weight, const Var<T>& bias);

/// Nearest-neighbour temporal upsampling.
template <typename T>
Var<T> upsample(const Var<T>& x, int factor);

template <typename T>
Var<T> leaky_relu(const Var<T>& x, T slope);

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b);
template <typename T>
Var<T> sub(const Var<T>& a, const Var<T>& b);
template <typename T>
Var<T> mul(const Var<T>& a, const Var<T>& b);
template <typename T>
Var<T> scale(const Var<T>& a, T s);
template <typename T>
Var<T> exp(const Var<T>& a);

/// x[b,t,c] + v[b,0,c]; v may also have batch 1.
template <typename T>
Var<T> add_over_time(const Var<T>& x, const Var<T>& v);
/// x[b,t,c] * v[b,0,c]; v may also have batch 1.
template <typename T>
Var<T> mul_over_time(const Var<T>& x, const Var<T>& v);

/// Per (batch, channel) standardization over the time axis:
/// (x - mean) / sqrt(var + eps), biased variance.
template <typename T>
Var<T> instance_norm(const Var<T>& x, T eps);

/// gamma * instance_norm(x) + beta with gamma, beta shaped [batch, 1, channel].
template <typename T>
Var<T> adain(const Var<T>& x, const Var<T>& gamma, const Var<T>& beta, T eps);

/// Average over time: [b,t,c] -> [b,1,c].
template <typename T>
Var<T> mean_time(const Var<T>& x);

template <typename T>
Var<T> concat_channels(const Var<T>& a, const Var<T>& b);

/// Rows of `table` ([1, rows, dim]) gathered into [labels.size(), 1, dim].
template <typename T>
Var<T> embedding(const Var<T>& table, std::span<const int> labels);

template <typename T>
Var<T> crop_time(const Var<T>& x, int start, int length);

/// x[:, t+1] - x[:, t].
template <typename T>
Var<T> temporal_diff(const Var<T>& x);

/// mean |x|
template <typename T>
Var<T> mean_abs(const Var<T>& x);

/// mean |a - b| over all elements.
template <typename T>
Var<T> l1_loss(const Var<T>& a, const Var<T>& b);

/// mean (a - b)^2 over all elements.
template <typename T>
Var<T> mse_loss(const Var<T>& a, const Var<T>& b);

/// KL(N(mu1, exp(logvar1)) || N(mu2, exp(logvar2))) for diagonal Gaussians
/// shaped [batch, 1, dim]. Summed over dim, averaged over batch, then divided
/// by dim when `per_dim` is set.
template <typename T>
Var<T> kl_diag(const Var<T>& mu1, const Var<T>& logvar1, const Var<T>& mu2,
               const Var<T>& logvar2, bool per_dim);

/// KL(N(mu, exp(logvar)) || N(0, I)) with the same reduction as kl_diag.
template <typename T>
Var<T> kl_standard(const Var<T>& mu, const Var<T>& logvar, bool per_dim);

/// mu + exp(logvar / 2) * noise, with noise a constant tensor.
template <typename T>
Var<T> reparameterize(const Var<T>& mu, const Var<T>& logvar, const Tensor<T>& noise);

/// Softmax cross-entropy of logits [batch, 1, classes], averaged over batch.
template <typename T>
Var<T> cross_entropy(const Var<T>& logits, std::span<const int> labels);

/// sum_i w_i * s_i over scalar nodes.
template <typename T>
Var<T> weighted_sum(const std::vector<Var<T>>& terms, const std::vector<T>& weights);

}  // namespace motionstyle::nn
