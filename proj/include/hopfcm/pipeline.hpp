#pragma once

#include <optional>
#include <vector>

#include "hopfcm/perturbation.hpp"

namespace hopfcm {

struct PipelineOptions {
  Tolerances tol;
  // < 0 means: take the initial frequency from the pseudospectral scan.
  double omega_guess = -1.0;
  bool run_oracle = false;
  std::vector<double> eps_schedule = {1e-2, 5e-3, 2.5e-3, 1.25e-3};
};

struct PipelineResult {
  HopfPair hopf;
  HypothesisReport hypothesis;
  SpectralData data;
  ReducedCoefficients rc;
  SecondOrderCoefficients so;
  ThirdOrderSolution third;
  std::optional<PerturbationPath> path;      // set when the oracle ran
  std::optional<ConvergenceReport> oracle;   // pass/fail left to the caller
};

// Full chain: locate the critical pair, certify the hypothesis, build the
// eigendata, the reduced coefficients, the order-2 solves, the regularized
// order-(2,1) solve, and optionally the eps-path oracle. The solvability
// defect is checked against tol_fredholm (relative to ||B|| ||R1|| + ||R2||)
// before the endpoint system is solved; SolvabilityExceeded carries the
// measured value. An oracle failure does not throw here — the report in
// `oracle` says so and the front end decides.
PipelineResult run_pipeline(const DDESystem& sys, const PipelineOptions& opts = {});

}  // namespace hopfcm
