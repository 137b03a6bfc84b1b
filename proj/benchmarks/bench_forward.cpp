// Forward-pass latency of full-size (untrained) models on a 160-frame clip.
// BM_Stylize/latent against BM_Stylize/no_latent is the efficiency comparison.

#include "motionstyle/codec/codec.hpp"
#include "motionstyle/eval/metrics.hpp"
#include "motionstyle/infer/pipeline.hpp"
#include "motionstyle/synth/corpus.hpp"
#include "motionstyle/train/trainer.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <random>

using namespace motionstyle;

namespace {

struct Clips {
  motion::PoseSequence content, style;
  motion::NormStats stats;
};

const Clips& clips(int frames) {
  static std::map<int, Clips> cache;
  auto it = cache.find(frames);
  if (it != cache.end()) return it->second;
  const auto styles = synth::default_styles(2);
  const auto contents = synth::default_contents(1);
  Clips c;
  c.content = synth::generate_clip(contents[0], styles[0], frames, 1).sequence;
  c.style = synth::generate_clip(contents[0], styles[1], 160, 2).sequence;
  std::vector<motion::PoseSequence> both = {c.content, c.style};
  c.stats = motion::fit_norm_stats(both);
  return cache.emplace(frames, std::move(c)).first->second;
}

infer::ModelBundle bundle(bool no_latent, const motion::NormStats& stats) {
  stylizer::StylizerConfig sc;
  sc.ablations.no_latent = no_latent;
  codec::Codec codec = no_latent ? train::identity_codec(stats.dim(), sc.code_dim) : codec::Codec(codec::CodecConfig{}, 1);
  return {stats, codec, stylizer::Stylizer(sc, 2), gmp::GlobalMotionPredictor(gmp::GmpConfig{}, 3)};
}

void BM_Stylize(benchmark::State& state, bool no_latent) {
  const auto& c = clips(static_cast<int>(state.range(0)));
  const auto b = bundle(no_latent, c.stats);
  for (auto _ : state) benchmark::DoNotOptimize(infer::stylize_motion_based(c.content, c.style, 0, b));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK_CAPTURE(BM_Stylize, latent, false)->Arg(160)->Arg(480)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Stylize, no_latent, true)->Arg(160)->Unit(benchmark::kMillisecond);

void BM_CodecRoundTrip(benchmark::State& state) {
  const auto& c = clips(160);
  const codec::Codec codec(codec::CodecConfig{}, 1);
  const auto x = motion::znormalize(c.content, c.stats);
  for (auto _ : state) benchmark::DoNotOptimize(codec.decode(codec.encode(x)));
}
BENCHMARK(BM_CodecRoundTrip)->Unit(benchmark::kMillisecond);

void BM_Fid(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  const int d = static_cast<int>(state.range(0));
  Eigen::MatrixXd a(400, d), b(400, d);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = n(rng), b.data()[i] = 0.5 + n(rng);
  for (auto _ : state) benchmark::DoNotOptimize(eval::fid(a, b));
}
BENCHMARK(BM_Fid)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
