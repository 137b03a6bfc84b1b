#include "gradcheck.hpp"

#include "motionstyle/nn/optim.hpp"
#include "motionstyle/nn/params.hpp"

#include <gtest/gtest.h>

#include "motionstyle/error.hpp"

#include <filesystem>
#include <fstream>

using namespace motionstyle;
using namespace motionstyle::nn;
using gradcheck::max_relative_error;
using gradcheck::random_tensor;
using Vars = std::vector<Var<double>>;

namespace {

constexpr double kTol = 1e-5;

Var<double> param(int n, int t, int c, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  return leaf(random_tensor(n, t, c, rng, lo, hi), true);
}

// Projects a tensor onto a scalar with fixed random weights so that every
// output element receives a distinct upstream gradient.
Var<double> project(const Var<double>& x) {
  std::mt19937_64 rng(77);
  auto w = constant(random_tensor(x.n(), x.t(), x.c(), rng));
  return mean_abs(add(mul(x, w), constant(Tensor<double>(x.n(), x.t(), x.c(), 3.0))));
}

}  // namespace

TEST(Gradients, Conv1dStrideAndPadding) {
  std::mt19937_64 rng(1);
  Vars in{param(2, 9, 3, rng), param(3, 3, 4, rng), param(1, 1, 4, rng)};
  for (int stride : {1, 2})
    EXPECT_LT(max_relative_error(in, [&](const Vars& v) { return project(conv1d(v[0], v[1], v[2], stride, 1)); }), kTol);
}

TEST(Gradients, LinearUpsampleLeakyRelu) {
  std::mt19937_64 rng(2);
  Vars in{param(2, 5, 3, rng), param(1, 3, 4, rng), param(1, 1, 4, rng)};
  EXPECT_LT(max_relative_error(in, [](const Vars& v) {
              return project(leaky_relu(upsample(linear(v[0], v[1], v[2]), 2), 0.2));
            }),
            kTol);
}

TEST(Gradients, ElementwiseAndBroadcast) {
  std::mt19937_64 rng(3);
  Vars in{param(2, 4, 3, rng), param(2, 4, 3, rng), param(2, 1, 3, rng), param(1, 1, 3, rng)};
  EXPECT_LT(max_relative_error(in, [](const Vars& v) {
              auto y = mul(sub(v[0], v[1]), exp(scale(v[0], 0.5)));
              return project(add_over_time(mul_over_time(add(y, v[1]), v[2]), v[3]));
            }),
            kTol);
}

TEST(Gradients, InstanceNormAndAdain) {
  std::mt19937_64 rng(4);
  Vars in{param(2, 6, 3, rng), param(2, 1, 3, rng), param(2, 1, 3, rng)};
  EXPECT_LT(max_relative_error(in, [](const Vars& v) { return project(adain(v[0], v[1], v[2], 1e-5)); }), kTol);
}

TEST(Gradients, ShapeOps) {
  std::mt19937_64 rng(5);
  Vars in{param(2, 6, 3, rng), param(2, 6, 2, rng), param(1, 4, 5, rng)};
  const std::vector<int> labels{3, 1};
  EXPECT_LT(max_relative_error(in, [&](const Vars& v) {
              auto cat = concat_channels(v[0], v[1]);
              auto e = embedding(v[2], labels);
              auto pooled = concat_channels(mean_time(crop_time(cat, 1, 4)), e);
              return add(project(pooled), project(temporal_diff(cat)));
            }),
            kTol);
}

TEST(Gradients, Losses) {
  std::mt19937_64 rng(6);
  Vars in{param(2, 1, 4, rng), param(2, 1, 4, rng), param(2, 1, 4, rng), param(2, 1, 4, rng)};
  const std::vector<int> labels{2, 0};
  const Tensor<double> noise = random_tensor(2, 1, 4, rng);
  EXPECT_LT(max_relative_error(in, [&](const Vars& v) {
              auto z = reparameterize(v[0], v[1], noise);
              return weighted_sum<double>({kl_diag(v[0], v[1], v[2], v[3], true), kl_standard(v[2], v[3], false),
                                           l1_loss(z, v[2]), mse_loss(v[0], v[3]), cross_entropy(v[1], labels)},
                                          {1.0, 0.5, 2.0, 0.3, 0.7});
            }),
            kTol);
}

TEST(Ops, InstanceNormStatistics) {
  std::mt19937_64 rng(7);
  auto x = constant(random_tensor(3, 40, 5, rng, -4.0, 9.0));
  const auto y = instance_norm(x, 0.0).value();
  for (int b = 0; b < 3; ++b)
    for (int c = 0; c < 5; ++c) {
      double m = 0.0, v = 0.0;
      for (int t = 0; t < 40; ++t) m += y.at(b, t, c);
      m /= 40;
      for (int t = 0; t < 40; ++t) v += (y.at(b, t, c) - m) * (y.at(b, t, c) - m);
      v /= 40;
      EXPECT_NEAR(m, 0.0, 1e-5);
      EXPECT_NEAR(v, 1.0, 1e-5);
    }
}

TEST(Ops, AdainWithInputStatisticsIsIdentity) {
  std::mt19937_64 rng(8);
  const auto xv = random_tensor(2, 30, 4, rng, -2.0, 5.0);
  Tensor<double> gamma(2, 1, 4), beta(2, 1, 4);
  for (int b = 0; b < 2; ++b)
    for (int c = 0; c < 4; ++c) {
      double m = 0.0, v = 0.0;
      for (int t = 0; t < 30; ++t) m += xv.at(b, t, c);
      m /= 30;
      for (int t = 0; t < 30; ++t) v += (xv.at(b, t, c) - m) * (xv.at(b, t, c) - m);
      gamma.at(b, 0, c) = std::sqrt(v / 30);
      beta.at(b, 0, c) = m;
    }
  const auto y = adain(constant(xv), constant(gamma), constant(beta), 0.0).value();
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(y[i], xv[i], 1e-5);
}

TEST(Ops, Conv1dMatchesDirectSum) {
  std::mt19937_64 rng(9);
  const auto x = random_tensor(1, 7, 2, rng);
  const auto w = random_tensor(3, 2, 3, rng);
  const auto b = random_tensor(1, 1, 3, rng);
  const auto y = conv1d(constant(x), constant(w), constant(b), 2, 1).value();
  ASSERT_EQ(y.t(), 4);
  for (int to = 0; to < 4; ++to)
    for (int co = 0; co < 3; ++co) {
      double ref = b[co];
      for (int k = 0; k < 3; ++k) {
        const int ti = to * 2 + k - 1;
        if (ti < 0 || ti >= 7) continue;
        for (int ci = 0; ci < 2; ++ci) ref += x.at(0, ti, ci) * w.at(k, ci, co);
      }
      EXPECT_NEAR(y.at(0, to, co), ref, 1e-12);
    }
}

TEST(Ops, KlClosedForms) {
  auto mu = constant(Tensor<double>(1, 1, 1, 1.0));
  auto zero = constant(Tensor<double>(1, 1, 1, 0.0));
  EXPECT_NEAR(kl_standard(mu, zero, false).item(), 0.5, 1e-12);
  EXPECT_NEAR(kl_diag(zero, zero, zero, zero, false).item(), 0.0, 1e-12);
}

TEST(Ops, NoGradGuardSkipsRecording) {
  auto w = leaf(Tensor<double>(1, 1, 1, 2.0), true);
  NoGradGuard guard;
  auto y = mul(w, w);
  EXPECT_FALSE(y.requires_grad());
}

TEST(Params, BlobRoundTripAndErrors) {
  const auto dir = std::filesystem::temp_directory_path() / "motionstyle_blob_test";
  std::filesystem::create_directories(dir);
  TensorMap m;
  m["a"] = Tensor<float>(2, 3, 4, 1.5f);
  m["b.c"] = Tensor<float>(1, 1, 7, -2.0f);
  write_tensor_blob(dir / "w.bin", m);
  const auto back = read_tensor_blob(dir / "w.bin");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.at("a").span()[5], 1.5f);
  EXPECT_EQ(back.at("b.c").c(), 7);
  {
    std::ofstream bad(dir / "bad.bin", std::ios::binary);
    bad << "NOPE";
  }
  try {
    read_tensor_blob(dir / "bad.bin");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadMagic);
  }
  std::filesystem::remove_all(dir);
}

TEST(Optim, AdamMinimizesQuadratic) {
  ParameterStore<double> store;
  std::mt19937_64 rng(3);
  auto w = store.add_uniform("w", 1, 1, 5, 1, rng);
  AdamOptions opt;
  opt.lr = 0.05;
  opt.warmup_steps = 10;
  Adam<double> adam(opt);
  adam.attach(store);
  auto target = constant(Tensor<double>(1, 1, 5, 0.3));
  for (int i = 0; i < 500; ++i) {
    adam.zero_grad();
    backward(mse_loss(w, target));
    adam.step();
  }
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(w.value()[i], 0.3, 1e-3);
}
