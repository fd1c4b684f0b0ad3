#pragma once

#include "polydg/ionic.hpp"

#include <string>
#include <vector>

namespace polydg {

/// Sampled trajectory of a single cell.
struct CellTrace {
  std::vector<std::string> columns;  // "u", then the state names
  std::vector<double> t;
  std::vector<std::vector<double>> values;

  std::vector<double> column(std::size_t j) const;
};

struct CellRun {
  double u0 = -50.0;
  double C_m = 1.0;
  double dt = 0.01;
  double T = 500.0;
  int sample_every = 10;

  void validate() const;  // std::invalid_argument
};

/// Forward Euler on C_m du/dt = -f(u, y), dy/dt = -m(u, y), with the model
/// clamp after every step. Throws BlowUpError when |u| exceeds the solver limit.
CellTrace simulate_cell(const IonicModel& model, const CellRun& run);

enum class BurstClass { Quiescent, SingleBurst, RecurrentBursting };

std::string to_string(BurstClass c);

struct BurstSummary {
  std::vector<double> crossings;  // upward crossings of the threshold
  int tail_crossings = 0;         // crossings inside the final window
  BurstClass kind = BurstClass::Quiescent;
};

/// No crossings: quiescent. Crossings still present in the final `tail` ms
/// and at least three overall: recurrent bursting. Otherwise a single burst.
BurstSummary classify_bursting(const CellTrace& trace, double threshold = -20.0, double tail = 100.0);

}  // namespace polydg
