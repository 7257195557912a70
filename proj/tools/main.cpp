#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hopfcm/io.hpp"

namespace {

int fail(const char* kind, const std::exception& e, int code) {
  std::cerr << "error: " << kind << ": " << e.what() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"center-manifold coefficients of a one-delay DDE at a Hopf point"};
  std::string input_path, output_path, format = "json";
  std::vector<double> eps;
  bool oracle = false, validate = false, seed_basis = false;
  double tol_root = -1.0, tol_fredholm = -1.0;
  int scan_nodes = 0;

  app.add_option("--input", input_path, "problem description (JSON)")
      ->required();
  app.add_option("--output", output_path, "report path (default: stdout)");
  app.add_option("--format", format, "report format")
      ->check(CLI::IsMember({"json", "text"}));
  app.add_flag("--oracle", oracle, "run the eps-path convergence study");
  app.add_option("--eps", eps, "eps schedule override (implies --oracle)")
      ->delimiter(',');
  app.add_option("--tol-root", tol_root, "characteristic root residual bound");
  app.add_option("--tol-fredholm", tol_fredholm, "solvability defect bound");
  app.add_option("--scan-nodes", scan_nodes, "Chebyshev nodes in the scan");
  app.add_flag("--seed-basis", seed_basis, "include the orthonormal basis");
  app.add_flag("--validate", validate, "parse and check the input, then stop");
  CLI11_PARSE(app, argc, argv);

  std::string text;
  {
    std::ifstream in(input_path);
    if (!in) {
      std::cerr << "error: InputError: cannot read " << input_path << "\n";
      return 5;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }

  try {
    hopfcm::ProblemInput problem = hopfcm::parse_problem(text);
    for (const std::string& w : problem.warnings)
      std::cerr << "warning: " << w << "\n";
    if (validate) {
      std::cerr << "input ok: n = " << problem.sys.n << ", r = " << problem.sys.r
                << "\n";
      return 0;
    }

    if (oracle) problem.opts.run_oracle = true;
    if (!eps.empty()) {
      problem.opts.run_oracle = true;
      problem.opts.eps_schedule = eps;
    }
    if (tol_root > 0.0) problem.opts.tol.tol_root = tol_root;
    if (tol_fredholm > 0.0) problem.opts.tol.tol_fredholm = tol_fredholm;
    if (scan_nodes > 0) problem.opts.tol.scan_nodes = scan_nodes;

    const hopfcm::PipelineResult result =
        hopfcm::run_pipeline(problem.sys, problem.opts);

    const std::string report =
        format == "json"
            ? hopfcm::render_report_json(problem.sys, result, seed_basis)
            : hopfcm::render_report_text(problem.sys, result);
    if (output_path.empty()) {
      std::cout << report;
    } else {
      std::ofstream out(output_path);
      if (!out) {
        std::cerr << "error: InputError: cannot write " << output_path << "\n";
        return 5;
      }
      out << report;
    }

    if (result.oracle && !result.oracle->pass) {
      std::cerr << "error: OracleMismatch: rate " << result.oracle->rate
                << ", extrapolated " << result.oracle->extrapolated << "\n";
      return 4;
    }
    return 0;
  } catch (const hopfcm::InputError& e) {
    return fail("InputError", e, 5);
  } catch (const hopfcm::OracleMismatch& e) {
    return fail("OracleMismatch", e, 4);
  } catch (const hopfcm::SolvabilityExceeded& e) {
    return fail("SolvabilityExceeded", e, 3);
  } catch (const hopfcm::EpsTooLarge& e) {
    return fail("EpsTooLarge", e, 4);
  } catch (const hopfcm::HypothesisViolated& e) {
    return fail("HypothesisViolated", e, 2);
  } catch (const hopfcm::NoConvergence& e) {
    return fail("NoConvergence", e, 2);
  } catch (const hopfcm::NotOnAxis& e) {
    return fail("NotOnAxis", e, 2);
  } catch (const hopfcm::NotSimple& e) {
    return fail("NotSimple", e, 2);
  } catch (const hopfcm::NormalizationDegenerate& e) {
    return fail("NormalizationDegenerate", e, 2);
  } catch (const std::exception& e) {
    return fail("internal", e, 1);
  }
}
