#include "hopfcm/io.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace hopfcm {

namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw InputError(where + ": expected a number");
  return j.get<double>();
}

RMat as_matrix(const json& j, Eigen::Index rows, Eigen::Index cols,
               const std::string& where) {
  if (!j.is_array() || Eigen::Index(j.size()) != rows)
    throw InputError(where + ": expected " + std::to_string(rows) + " rows");
  RMat M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[std::size_t(i)];
    if (!row.is_array() || Eigen::Index(row.size()) != cols)
      throw InputError(where + ": row " + std::to_string(i) + ": expected " +
                       std::to_string(cols) + " entries");
    for (Eigen::Index k = 0; k < cols; ++k)
      M(i, k) = as_number(row[std::size_t(k)], where);
  }
  return M;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& item : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) {
          return item.key() == k;
        }))
      throw InputError(where + ": unknown key \"" + item.key() + "\"");
  }
}

double d2_asymmetry(const RMat& S) {
  return (S - S.transpose()).cwiseAbs().maxCoeff();
}

double d3_asymmetry(const std::vector<double>& d, Eigen::Index m) {
  const auto at = [&](Eigen::Index p, Eigen::Index q, Eigen::Index s) {
    return d[std::size_t((p * m + q) * m + s)];
  };
  double worst = 0.0;
  for (Eigen::Index p = 0; p < m; ++p)
    for (Eigen::Index q = p; q < m; ++q)
      for (Eigen::Index s = q; s < m; ++s) {
        const double v[6] = {at(p, q, s), at(p, s, q), at(q, p, s),
                             at(q, s, p), at(s, p, q), at(s, q, p)};
        const auto [lo, hi] = std::minmax_element(v, v + 6);
        worst = std::max(worst, *hi - *lo);
      }
  return worst;
}

ojson jc(cplx z) { return ojson{{"re", z.real()}, {"im", z.imag()}}; }

ojson jv(const CVec& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(jc(v(i)));
  return a;
}

ojson jrow(const CRow& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(jc(v(i)));
  return a;
}

ojson jcoef(const ManifoldCoefficient& w) {
  ojson terms = ojson::array();
  for (const ExpPolyTerm& t : w.w.terms()) {
    ojson coef = ojson::array();
    for (const CVec& c : t.coef) coef.push_back(jv(c));
    terms.push_back(ojson{{"mu", jc(t.mu)}, {"coef", coef}});
  }
  return ojson{{"j", w.j},
               {"k", w.k},
               {"domain", ojson::array({w.w.lo(), w.w.hi()})},
               {"at0", jv(w.at0)},
               {"at_mr", jv(w.at_mr)},
               {"terms", terms}};
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

std::string fmt(cplx z) {
  std::ostringstream os;
  os << std::setprecision(12) << z.real() << (z.imag() < 0 ? " - " : " + ")
     << std::abs(z.imag()) << "i";
  return os.str();
}

std::string fmt(const CVec& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt(v(i));
  }
  return out + "]";
}

}  // namespace

ProblemInput parse_problem(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("JSON parse failure: ") + e.what());
  }
  if (!j.is_object()) throw InputError("top level: expected an object");
  check_keys(j,
             {"n", "r", "A", "B", "D2", "D3", "omega_guess", "tolerances",
              "oracle"},
             "top level");
  for (const char* key : {"n", "r", "A", "B", "D2"})
    if (!j.contains(key))
      throw InputError(std::string("missing required key \"") + key + "\"");

  if (!j["n"].is_number_integer() || j["n"].get<long>() < 1)
    throw InputError("n: expected a positive integer");
  const Eigen::Index n = j["n"].get<Eigen::Index>();
  const Eigen::Index m = 2 * n;
  const double r = as_number(j["r"], "r");
  if (!(r > 0.0)) throw InputError("r: expected r > 0");

  RMat A = as_matrix(j["A"], n, n, "A");
  RMat B = as_matrix(j["B"], n, n, "B");

  std::vector<std::string> warnings;
  if (!j["D2"].is_array() || Eigen::Index(j["D2"].size()) != n)
    throw InputError("D2: expected " + std::to_string(n) + " slices");
  std::vector<RMat> D2;
  for (Eigen::Index i = 0; i < n; ++i) {
    D2.push_back(as_matrix(j["D2"][std::size_t(i)], m, m,
                           "D2[" + std::to_string(i) + "]"));
    const double asym = d2_asymmetry(D2.back());
    if (asym > 1e-12)
      warnings.push_back("D2[" + std::to_string(i) + "] asymmetric by " +
                         fmt(asym) + "; symmetrized");
  }

  std::vector<std::vector<double>> D3;
  if (j.contains("D3")) {
    if (!j["D3"].is_array() || Eigen::Index(j["D3"].size()) != n)
      throw InputError("D3: expected " + std::to_string(n) + " slices");
    for (Eigen::Index i = 0; i < n; ++i) {
      const json& slice = j["D3"][std::size_t(i)];
      const std::string where = "D3[" + std::to_string(i) + "]";
      if (!slice.is_array() || Eigen::Index(slice.size()) != m)
        throw InputError(where + ": expected " + std::to_string(m) + " blocks");
      std::vector<double> flat(std::size_t(m * m * m));
      for (Eigen::Index p = 0; p < m; ++p) {
        const RMat block = as_matrix(slice[std::size_t(p)], m, m,
                                     where + "[" + std::to_string(p) + "]");
        for (Eigen::Index q = 0; q < m; ++q)
          for (Eigen::Index s = 0; s < m; ++s)
            flat[std::size_t((p * m + q) * m + s)] = block(q, s);
      }
      const double asym = d3_asymmetry(flat, m);
      if (asym > 1e-12)
        warnings.push_back(where + " asymmetric by " + fmt(asym) +
                           "; symmetrized");
      D3.push_back(std::move(flat));
    }
  }

  ProblemInput input{make_system(n, r, std::move(A), std::move(B),
                                 std::move(D2), std::move(D3)),
                     PipelineOptions{}, std::move(warnings)};

  if (j.contains("omega_guess")) {
    input.opts.omega_guess = as_number(j["omega_guess"], "omega_guess");
    if (!(input.opts.omega_guess > 0.0))
      throw InputError("omega_guess: expected a positive number");
  }

  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    if (!t.is_object()) throw InputError("tolerances: expected an object");
    check_keys(t,
               {"tol_solve", "tol_rank", "tol_root", "tol_imaginary",
                "tol_resonance", "tol_fredholm", "tol_resid", "tol_oracle",
                "delta_spectrum", "scan_nodes", "scan_report"},
               "tolerances");
    Tolerances& tol = input.opts.tol;
    const auto opt = [&](const char* key, double& slot) {
      if (t.contains(key)) slot = as_number(t[key], std::string("tolerances.") + key);
    };
    opt("tol_solve", tol.tol_solve);
    opt("tol_rank", tol.tol_rank);
    opt("tol_root", tol.tol_root);
    opt("tol_imaginary", tol.tol_imaginary);
    opt("tol_resonance", tol.tol_resonance);
    opt("tol_fredholm", tol.tol_fredholm);
    opt("tol_resid", tol.tol_resid);
    opt("tol_oracle", tol.tol_oracle);
    opt("delta_spectrum", tol.delta_spectrum);
    if (t.contains("scan_nodes")) tol.scan_nodes = t["scan_nodes"].get<int>();
    if (t.contains("scan_report")) tol.scan_report = t["scan_report"].get<int>();
  }

  if (j.contains("oracle")) {
    const json& o = j["oracle"];
    if (!o.is_object()) throw InputError("oracle: expected an object");
    check_keys(o, {"eps"}, "oracle");
    input.opts.run_oracle = true;
    if (o.contains("eps")) {
      if (!o["eps"].is_array() || o["eps"].empty())
        throw InputError("oracle.eps: expected a non-empty array");
      input.opts.eps_schedule.clear();
      for (const json& e : o["eps"])
        input.opts.eps_schedule.push_back(as_number(e, "oracle.eps"));
    }
  }

  return input;
}

std::string render_report_json(const DDESystem& sys, const PipelineResult& res,
                               bool dump_basis) {
  ojson rep;
  rep["input"] = ojson{{"n", sys.n}, {"r", sys.r}};

  ojson rightmost = ojson::array();
  for (cplx z : res.hypothesis.rightmost) rightmost.push_back(jc(z));
  rep["hopf"] = ojson{
      {"omega", res.hopf.omega},
      {"lambda", jc(res.hopf.lambda)},
      {"root_residual", res.hopf.root_residual},
      {"simplicity_margin", res.hopf.simplicity_margin},
      {"hypothesis",
       ojson{{"pass", res.hypothesis.pass},
             {"margin", res.hypothesis.margin},
             {"simplicity_margin", res.hypothesis.simplicity_margin},
             {"char_deriv_scaled", res.hypothesis.char_deriv_scaled},
             {"rightmost_other_root", jc(res.hypothesis.rightmost_other_root)},
             {"rightmost", rightmost},
             {"note", res.hypothesis.note}}}};

  rep["spectral"] = ojson{{"phi1_0", jv(res.data.phi1_0)},
                          {"psi1_0", jrow(res.data.psi1_0)},
                          {"e11", jc(res.data.e11)},
                          {"e22", jc(res.data.e22)},
                          {"Psi1_0", jrow(res.data.Psi1_0)}};

  rep["coefficients"] = ojson{
      {"f20", jv(res.rc.f20)}, {"f11", jv(res.rc.f11)}, {"f02", jv(res.rc.f02)},
      {"f21", jv(res.rc.f21)}, {"f12", jv(res.rc.f12)}, {"g20", jc(res.rc.g20)},
      {"g11", jc(res.rc.g11)}, {"g02", jc(res.rc.g02)}, {"g21", jc(res.rc.g21)},
      {"g12", jc(res.rc.g12)}};

  rep["manifold"] = ojson{{"w20", jcoef(res.so.w20)},
                          {"w11", jcoef(res.so.w11)},
                          {"w02", jcoef(res.so.w02)},
                          {"w21", jcoef(res.third.w21)},
                          {"R1", jv(res.third.R1)},
                          {"R2", jv(res.third.R2)},
                          {"Rtilde", jc(res.third.Rtilde)}};

  rep["diagnostics"] =
      ojson{{"solvability_defect", res.third.solvability_defect},
            {"defect_scale", res.third.defect_scale},
            {"reduced_residual", res.third.reduced_residual},
            {"first_row_annihilation", res.third.first_row_annihilation},
            {"cond_regularized", res.third.cond_regularized},
            {"fredholm", ojson{{"r1a", jc(res.third.fredholm.r1a)},
                               {"r1b", jc(res.third.fredholm.r1b)},
                               {"r2", jc(res.third.fredholm.r2)},
                               {"r3", jc(res.third.fredholm.r3)},
                               {"r4", jc(res.third.fredholm.r4)}}}};

  if (res.oracle) {
    const ConvergenceReport& cr = *res.oracle;
    ojson table = ojson::array();
    for (std::size_t i = 0; i < res.path->records.size(); ++i) {
      const PerturbedRecord& rec = res.path->records[i];
      table.push_back(
          ojson{{"eps", rec.eps},
                {"lambda", jc(rec.lambda)},
                {"cond_M", rec.cond_M},
                {"dist", cr.dist[i]},
                {"h1_err", (rec.h1 - res.path->h1_limit).norm()},
                {"h2_err", std::abs(rec.h2 - res.path->h2_limit)},
                {"w21_0", jv(rec.w21_0)}});
    }
    rep["oracle"] = ojson{{"enabled", true},
                          {"pass", cr.pass},
                          {"rate", cr.rate},
                          {"extrapolated", cr.extrapolated},
                          {"reference_scale", cr.reference_scale},
                          {"note", cr.note},
                          {"table", table}};
  } else {
    rep["oracle"] = ojson{{"enabled", false}};
  }

  if (dump_basis) {
    ojson basis = ojson::array();
    for (const CVec& v : res.third.basis) basis.push_back(jv(v));
    rep["basis"] = basis;
    rep["coords"] = jv(res.third.coords);
  }

  return rep.dump(2) + "\n";
}

std::string render_report_text(const DDESystem& sys, const PipelineResult& res) {
  std::ostringstream os;
  os << "system: n = " << sys.n << ", r = " << fmt(sys.r) << "\n";
  os << "hopf: omega = " << fmt(res.hopf.omega)
     << " (root residual " << fmt(res.hopf.root_residual)
     << ", simplicity " << fmt(res.hopf.simplicity_margin) << ")\n";
  os << "hypothesis H: " << (res.hypothesis.pass ? "pass" : "FAIL")
     << " (spectral margin " << fmt(res.hypothesis.margin) << ")\n";
  os << "g20 = " << fmt(res.rc.g20) << "\n";
  os << "g11 = " << fmt(res.rc.g11) << "\n";
  os << "g02 = " << fmt(res.rc.g02) << "\n";
  os << "g21 = " << fmt(res.rc.g21) << "\n";
  os << "g12 = " << fmt(res.rc.g12) << "\n";
  os << "w20(0)  = " << fmt(res.so.w20.at0) << "\n";
  os << "w11(0)  = " << fmt(res.so.w11.at0) << "\n";
  os << "w21(0)  = " << fmt(res.third.w21.at0) << "\n";
  os << "w21(-r) = " << fmt(res.third.w21.at_mr) << "\n";
  os << "solvability defect " << fmt(res.third.solvability_defect)
     << " (scale " << fmt(res.third.defect_scale) << "), reduced residual "
     << fmt(res.third.reduced_residual) << "\n";
  os << "fredholm |r1a| " << fmt(std::abs(res.third.fredholm.r1a)) << ", |r1b| "
     << fmt(std::abs(res.third.fredholm.r1b)) << ", |r2| "
     << fmt(std::abs(res.third.fredholm.r2)) << ", |r3| "
     << fmt(std::abs(res.third.fredholm.r3)) << ", |r4| "
     << fmt(std::abs(res.third.fredholm.r4)) << "\n";
  if (res.oracle) {
    os << "oracle: " << (res.oracle->pass ? "PASS" : "FAIL") << " (rate "
       << fmt(res.oracle->rate) << ", extrapolated "
       << fmt(res.oracle->extrapolated) << ")\n";
    for (std::size_t i = 0; i < res.oracle->eps.size(); ++i)
      os << "  eps " << fmt(res.oracle->eps[i]) << ": dist "
         << fmt(res.oracle->dist[i]) << "\n";
  }
  return os.str();
}

}  // namespace hopfcm
