#pragma once

#include "motionstyle/nn/optim.hpp"

#include <cstdint>
#include <functional>
#include <string>

namespace motionstyle::train {

/// Optimisation loop settings shared by every trainable component.
struct Schedule {
  int steps = 2000;
  int batch = 32;
  int window = 64;  // frames per training window
  nn::AdamOptions adam;
  std::uint64_t seed = 1;
  int log_every = 100;
  /// Called every `log_every` steps with a one-line progress message.
  std::function<void(const std::string&)> log;
};

}  // namespace motionstyle::train
