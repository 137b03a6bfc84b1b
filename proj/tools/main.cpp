// motionstyle: corpus generation, training, stylization and evaluation.

#include "commands.hpp"

#include "motionstyle/error.hpp"

#include <Eigen/Core>

#include <iostream>
#include <memory>
#include <utility>
#include <vector>

using namespace motionstyle;

namespace {

std::string quoted(const std::string& s) { return nlohmann::json(s).dump(); }

// One line on stderr, e.g.  error category=ModeMismatch exit=4 message="..."
int fail(std::string_view category, int code, const std::string& message) {
  std::cerr << "error category=" << category << " exit=" << code << " message=" << quoted(message) << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Motion style transfer in a pretrained latent space"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "worker cap; 1 keeps every command bit-deterministic")->check(CLI::PositiveNumber);

  std::vector<std::pair<CLI::App*, std::unique_ptr<cli::Command>>> commands;
  auto add = [&](const char* name, const char* help, std::unique_ptr<cli::Command> cmd) {
    auto* sub = app.add_subcommand(name, help);
    cmd->setup(sub);
    commands.emplace_back(sub, std::move(cmd));
  };
  add("gen-corpus", "generate the synthetic style x content corpus", std::make_unique<cli::GenCorpus>());
  add("train-codec", "train the motion autoencoder and fit normalization", std::make_unique<cli::TrainCodec>());
  add("train-gmp", "train the global-motion predictor", std::make_unique<cli::TrainGmp>());
  add("train-stylizer", "train the latent stylizer against a frozen codec", std::make_unique<cli::TrainStylizer>());
  add("stylize", "stylize a motion (motion, label or prior mode)", std::make_unique<cli::Stylize>());
  add("interpolate", "blend two style codes", std::make_unique<cli::Interpolate>());
  add("evaluate", "run the repeated evaluation protocol", std::make_unique<cli::Evaluate>());
  add("bench", "time the stylization forward pass", std::make_unique<cli::Bench>());
  add("inspect", "print metadata of a corpus, model, checkpoint or motion file", std::make_unique<cli::Inspect>());

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(to_string(ErrorCode::Usage), exit_code(ErrorCode::Usage), e.what());
  }
  Eigen::setNbThreads(threads);

  try {
    for (auto& [sub, cmd] : commands)
      if (sub->parsed()) cmd->run();
  } catch (const Error& e) {
    return fail(to_string(e.code()), exit_code(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail("Internal", 3, e.what());
  }
  return 0;
}
