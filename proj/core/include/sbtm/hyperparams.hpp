#pragma once

#include "sbtm/matrix.hpp"

namespace sbtm {

/// Conjugate prior hyperparameters: Dirichlet concentrations for the label
/// transition rows (states 0..k_up) and Beta parameters for the three edge
/// regimes. All entries must be strictly positive. The default is the
/// non-informative value 0.5 everywhere.
struct Hyperparameters {
  int k_up = 0;
  Matrix<double> delta;      // (k_up+1) x (k_up+1)
  BlockPairs<double> eta0;   // Beta prior on new-dyad probabilities
  BlockPairs<double> zeta0;
  BlockPairs<double> a_p;    // Beta prior on edge creation
  BlockPairs<double> b_p;
  BlockPairs<double> a_q;    // Beta prior on edge destruction
  BlockPairs<double> b_q;

  static Hyperparameters uniform(int k_up, double value);
  static Hyperparameters jeffreys(int k_up) { return uniform(k_up, 0.5); }

  /// Throws ArgumentError if any entry is not strictly positive.
  void check() const;
};

}  // namespace sbtm
