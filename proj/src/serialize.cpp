#include "flqr/serialize.hpp"

#include <cmath>

#include <json.hpp>

#include "flqr/error.hpp"
#include "flqr/io.hpp"

namespace flqr {

namespace {

using json = nlohmann::ordered_json;

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector to_vector(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json matrix_json(const Matrix& m) {
  auto rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) rows.push_back(to_std(m.row(i).transpose()));
  return rows;
}

Matrix matrix_from(const json& j) {
  const Index rows = static_cast<Index>(j.size());
  const Index cols = rows ? static_cast<Index>(j.at(0).size()) : 0;
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Vector r = to_vector(j.at(static_cast<std::size_t>(i)));
    if (r.size() != cols) fail(ErrorKind::ParseError, "ragged matrix in fit file");
    m.row(i) = r.transpose();
  }
  return m;
}

}  // namespace

std::string fit_to_json(const FitBundle& bundle) {
  const FitResult& f = bundle.fit;
  json j;
  j["version"] = kVersion;
  j["tau"] = f.tau;
  j["lambda"] = f.lambda;
  j["h"] = f.h;
  j["alpha_hat"] = f.alpha_hat;
  j["b_hat"] = f.b_hat;
  j["n"] = f.n();
  j["grid"] = to_std(f.beta_hat.grid.points());
  j["beta_hat"] = to_std(f.beta_hat.values);
  j["theta"] = {{"alpha", f.theta.alpha}, {"d", to_std(f.theta.d)}, {"c", to_std(f.theta.c)}};
  j["residuals"] = to_std(f.residuals);
  j["trace"] = {{"iterations", f.trace.iterations},
                {"status", f.trace.status == FitStatus::Converged ? "converged" : "max_iter_reached"},
                {"final_grad_norm", f.trace.final_grad_norm},
                {"safeguard_hits", f.trace.safeguard_hits},
                {"objective_path", f.trace.objective_path}};
  auto cv = json::array();
  for (const auto& row : f.cv_table) {
    cv.push_back({{"lambda", row.lambda},
                  {"mean_risk", number_or_null(row.mean_risk)},
                  {"se_risk", number_or_null(row.se_risk)},
                  {"failed_folds", row.failed_folds},
                  {"failure", row.failure}});
  }
  j["cv_table"] = cv;
  if (bundle.eigensystem) {
    const EigenSystem& es = *bundle.eigensystem;
    j["eigensystem"] = {{"basis_dim", es.basis.dim()},
                        {"n", es.n},
                        {"b_hat", es.b_hat},
                        {"regularized", es.regularized},
                        {"rho", to_std(es.rho)},
                        {"score_moments", to_std(es.score_moments)},
                        {"coeffs", matrix_json(es.coeffs)}};
  }
  if (bundle.diagnostics) {
    j["diagnostics"] = {{"bias_proxy", bundle.diagnostics->bias_proxy},
                        {"truncation_share", bundle.diagnostics->truncation_share},
                        {"truncation_flag", bundle.diagnostics->truncation_flag}};
  }
  return j.dump(2) + '\n';
}

FitBundle fit_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    const Grid grid(to_vector(j.at("grid")));
    const Vector beta = to_vector(j.at("beta_hat"));
    if (beta.size() != grid.size()) fail(ErrorKind::ParseError, "beta_hat length does not match grid");
    const auto& th = j.at("theta");
    FitResult f{j.at("tau").get<double>(),
                {th.at("alpha").get<double>(), to_vector(th.at("d")), to_vector(th.at("c"))},
                j.at("lambda").get<double>(),
                j.at("h").get<double>(),
                {grid, beta},
                j.at("alpha_hat").get<double>(),
                to_vector(j.at("residuals")),
                j.at("b_hat").get<double>(),
                {},
                {}};
    const auto& tr = j.at("trace");
    f.trace.iterations = tr.at("iterations").get<int>();
    f.trace.status = tr.at("status").get<std::string>() == "converged" ? FitStatus::Converged
                                                                        : FitStatus::MaxIterReached;
    f.trace.final_grad_norm = tr.at("final_grad_norm").get<double>();
    f.trace.safeguard_hits = tr.at("safeguard_hits").get<int>();
    f.trace.objective_path = tr.at("objective_path").get<std::vector<double>>();
    for (const auto& row : j.at("cv_table")) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      f.cv_table.push_back({row.at("lambda").get<double>(),
                            row.at("mean_risk").is_null() ? nan : row.at("mean_risk").get<double>(),
                            row.at("se_risk").is_null() ? nan : row.at("se_risk").get<double>(),
                            row.at("failed_folds").get<int>(), row.at("failure").get<std::string>()});
    }
    FitBundle out{std::move(f), std::nullopt, std::nullopt};
    if (j.contains("eigensystem")) {
      const auto& e = j.at("eigensystem");
      BSplineBasis basis(e.at("basis_dim").get<Index>());
      EigenSystem es{grid,
                     basis,
                     to_vector(e.at("rho")),
                     matrix_from(e.at("coeffs")),
                     {},
                     {},
                     to_vector(e.at("score_moments")),
                     e.at("b_hat").get<double>(),
                     e.at("n").get<Index>(),
                     e.at("regularized").get<bool>(),
                     {},
                     {}};
      if (es.coeffs.rows() != basis.dim() || es.coeffs.cols() != es.rho.size() ||
          es.score_moments.size() != es.rho.size()) {
        fail(ErrorKind::ParseError, "eigensystem block has inconsistent sizes");
      }
      es.phis = basis.evaluate(grid.points()) * es.coeffs;
      out.eigensystem = std::move(es);
    }
    if (j.contains("diagnostics")) {
      const auto& d = j.at("diagnostics");
      out.diagnostics = InferenceDiagnostics{d.at("bias_proxy").get<double>(), d.at("truncation_share").get<double>(),
                                             d.at("truncation_flag").get<bool>()};
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, std::string("fit file: ") + e.what());
  }
}

std::string beta_csv(const FitResult& fit) {
  std::string out = "t,beta_hat\n";
  const Vector& pts = fit.beta_hat.grid.points();
  for (Index j = 0; j < pts.size(); ++j) {
    out += io::format_double(pts[j]) + ',' + io::format_double(fit.beta_hat.values[j]) + '\n';
  }
  return out;
}

std::string eigensystem_csv(const EigenSystem& es) {
  std::string out = "nu,rho";
  for (Index j = 0; j < es.grid.size(); ++j) out += ",t=" + io::format_double(es.grid[j]);
  out += '\n';
  for (Index v = 0; v < es.n_eig(); ++v) {
    out += std::to_string(v + 1) + ',' + io::format_double(es.rho[v]);
    for (Index j = 0; j < es.phis.rows(); ++j) out += ',' + io::format_double(es.phis(j, v));
    out += '\n';
  }
  return out;
}

}  // namespace flqr
