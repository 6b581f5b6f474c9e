#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mining/frame.hpp"
#include "mining/matrix.hpp"

namespace mining {

struct SynthSpec {
  std::size_t n_rows = 1000;  // per split
  std::size_t n_numeric = 10;
  std::size_t n_categorical = 2;
  double class_sep = 1.0;      // mean shift, in sigma units, on informative features
  double positive_rate = 0.1;
  int drift_feature = -1;      // numeric feature index shifted in train only
  double drift_shift = 0.0;    // in sigma units
  double censor_c = 1.0;       // label frequency for the observed PU labels
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthData {
  Frame train;  // id + num* + cat* columns
  Frame test;
  std::vector<int> train_true;
  std::vector<int> train_observed;  // SCAR-censored PU labels
  std::vector<int> test_true;
};

// Class-conditional Gaussians on the first half of the numeric features
// (the rest is noise), class-dependent categorical tables, SCAR censoring.
// Byte-identical output for a given spec.
SynthData generate(const SynthSpec& spec);

// Numeric design matrix over the frame's num* columns.
DesignMatrix synth_matrix(const Frame& frame);

}  // namespace mining
