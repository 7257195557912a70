#pragma once

#include <string>
#include <vector>

#include "hopfcm/pipeline.hpp"

namespace hopfcm {

struct ProblemInput {
  DDESystem sys;
  PipelineOptions opts;
  std::vector<std::string> warnings;  // symmetry repairs and the like
};

// Parses and validates a JSON problem description. Shape, type, finiteness
// and unknown-key violations all throw InputError with a one-line reason;
// multilinear data that is asymmetric beyond 1e-12 is symmetrized and noted
// in `warnings`.
ProblemInput parse_problem(const std::string& text);

// Structured report with a fixed key order: identical results serialize to
// identical bytes. The basis vectors are bulky and only emitted on request.
std::string render_report_json(const DDESystem& sys, const PipelineResult& res,
                               bool dump_basis = false);

// Human-readable summary of the same data.
std::string render_report_text(const DDESystem& sys, const PipelineResult& res);

}  // namespace hopfcm
