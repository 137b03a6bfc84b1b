#pragma once

#include "params.hpp"

#include <optional>
#include <string>

namespace motionstyle::cli {

/// One subcommand: registers its options, then runs after parsing.
class Command {
 public:
  virtual ~Command() = default;
  virtual void setup(CLI::App* app) = 0;
  virtual void run() = 0;
};

#define MOTIONSTYLE_COMMAND(Name)          \
  class Name : public Command {            \
   public:                                 \
    void setup(CLI::App* app) override;    \
    void run() override;                   \
                                           \
   private:                                \
    std::optional<Params> params_;         \
  };

MOTIONSTYLE_COMMAND(GenCorpus)
MOTIONSTYLE_COMMAND(TrainCodec)
MOTIONSTYLE_COMMAND(TrainGmp)
MOTIONSTYLE_COMMAND(TrainStylizer)
MOTIONSTYLE_COMMAND(Stylize)
MOTIONSTYLE_COMMAND(Interpolate)
MOTIONSTYLE_COMMAND(Evaluate)
MOTIONSTYLE_COMMAND(Bench)

#undef MOTIONSTYLE_COMMAND

class Inspect : public Command {
 public:
  void setup(CLI::App* app) override;
  void run() override;

 private:
  std::string path_;
};

}  // namespace motionstyle::cli
