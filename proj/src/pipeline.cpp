#include "hopfcm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "hopfcm/numerics.hpp"

namespace hopfcm {

PipelineResult run_pipeline(const DDESystem& sys, const PipelineOptions& opts) {
  const Tolerances& tol = opts.tol;

  const double guess =
      opts.omega_guess > 0.0 ? opts.omega_guess : scan_hopf_guess(sys, tol);
  HopfPair hopf = find_hopf(sys, guess, tol);
  const HypothesisReport hyp = verify_hypothesis_H(sys, hopf, tol, true);
  hopf.rightmost_other_root = hyp.rightmost_other_root;

  const SpectralData data = build_spectral_data(sys, hopf, tol);
  CoefficientChain chain = coefficient_chain(sys, data, tol);

  // Solvability gate: the endpoint system is only meaningful when the
  // Fredholm condition holds to within roundoff of its ingredients.
  {
    const CVec R1 = assemble_R1(sys, data, chain.rc, chain.so);
    const CVec R2 = assemble_R2(sys, data, chain.rc, chain.so);
    const double defect = solvability_defect(data, sys, R1, R2);
    const double scale =
        singular_extrema(sys.B.cast<cplx>()).sigma_max * R1.norm() + R2.norm();
    if (defect > tol.tol_fredholm * std::max(scale, 1e-300)) {
      throw SolvabilityExceeded(
          "solvability defect " + std::to_string(defect) + " above " +
          std::to_string(tol.tol_fredholm) + " relative to scale " +
          std::to_string(scale));
    }
  }

  ThirdOrderSolution third = solve_w21(sys, data, chain.rc, chain.so, tol);

  std::optional<PerturbationPath> path;
  std::optional<ConvergenceReport> oracle;
  if (opts.run_oracle) {
    path = build_path(sys, data, opts.eps_schedule, tol, hyp.margin);
    oracle = converge_study(*path, third.w21.at0, tol.tol_oracle,
                            /*throw_on_fail=*/false);
  }

  return PipelineResult{hopf,
                        hyp,
                        data,
                        std::move(chain.rc),
                        std::move(chain.so),
                        std::move(third),
                        std::move(path),
                        std::move(oracle)};
}

}  // namespace hopfcm
