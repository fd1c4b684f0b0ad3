#pragma once

#include "polydg/solver.hpp"

#include <filesystem>
#include <iosfwd>

namespace polydg {

// Text checkpoint, values in C99 hex-float notation so restarts are bitwise:
//
//   polydg-checkpoint 1
//   step <n>
//   t0 <hex>
//   dt <hex>
//   dofs <N> state <S> history <0|1>
//   U <N hex values>
//   Y<j> <N hex values>        (S lines)
//   I_prev <N hex values>      (when history is 1)

struct Checkpoint {
  SimState state;
  double dt = 0.0;
};

void write_checkpoint(std::ostream& out, const SimState& s, double dt);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const SimState& s, double dt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace polydg
