#pragma once

#include <cstdint>
#include <stdexcept>

namespace gemd {

// Random-walk estimator and pipeline parameters. Defaults are the one-click
// settings: L = 7, m = 50, K = 64, p = q = 1, c = 100.
struct WalkConfig {
  int walk_length = 7;   // L
  int trials = 50;       // m, per start node
  int splits = 1;        // T; must divide trials
  double p = 1.0;        // return factor
  double q = 1.0;        // in-out factor
  double clip_c = 100.0; // replacement magnitude for log(0)
  std::uint64_t seed = 42;
  int dim = 64;          // K
};

inline void validate(const WalkConfig& cfg) {
  if (cfg.walk_length < 1) throw std::invalid_argument("walk_length must be >= 1");
  if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (cfg.splits < 1) throw std::invalid_argument("splits must be >= 1");
  if (cfg.trials % cfg.splits != 0)
    throw std::invalid_argument("splits must divide trials");
  if (!(cfg.p > 0.0) || !(cfg.q > 0.0))
    throw std::invalid_argument("memory factors p, q must be positive");
  if (!(cfg.clip_c > 0.0)) throw std::invalid_argument("clip_c must be positive");
  if (cfg.dim < 1) throw std::invalid_argument("dim must be >= 1");
}

}  // namespace gemd
