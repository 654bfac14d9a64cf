#include "dpbc/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "dpbc/error.hpp"
#include "dpbc/parallel.hpp"
#include "dpbc/sdp_problem.hpp"

namespace dpbc {

namespace {

double min_eigenvalue(const Eigen::MatrixXd& Q) {
  if (Q.size() == 0) return 0.0;
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Q, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

double coef_norm(const Polynomial& p) {
  double s = 0.0;
  for (const auto& kv : p.terms()) s += kv.second * kv.second;
  return std::sqrt(s);
}

}  // namespace

SynthesisResult synthesize(const SystemModel& model, CertificateKind kind, double alpha,
                           const SynthesisOptions& options) {
  const SosProgram prog = build_program(kind, model, alpha, options.degrees);
  const CompiledSos compiled = compile(prog);

  InteriorPointSolver default_backend(options.ipm);
  const SdpBackend& backend = options.backend ? *options.backend : default_backend;
  const SdpSolution sol = backend.solve(compiled.sdp);

  SynthesisResult r;
  r.kind = kind;
  r.alpha = alpha;
  r.v_degree = options.degrees.certificate;
  r.status = sol.status;
  r.iterations = sol.iterations;
  r.primal_residual = sol.primal_residual;
  r.dual_residual = sol.dual_residual;
  r.gap = sol.gap;
  r.solver_message = sol.message;
  if (sol.status != SdpStatus::Optimal) return r;

  const std::vector<double> u(sol.u.data(), sol.u.data() + sol.u.size());
  r.beta = u[prog.beta_index];
  r.delta = u[prog.delta_index];
  r.gamma = gamma_of(alpha, r.beta);
  r.objective = prog.objective.eval(u);
  Polynomial v = prog.v_template().evaluate(u);
  r.certificate = BarrierCertificate::make(kind, std::move(v), alpha, r.beta, r.delta);
  r.bound = evaluate_bound_over_x0(*r.certificate, prog.horizon);

  // Reconstruct every SOS identity from the returned Gram matrices.
  const SosLayout& lay = compiled.layout;
  r.min_gram_eigenvalue = std::numeric_limits<double>::infinity();
  for (int b = 0; b < compiled.sdp.num_blocks(); ++b) {
    r.min_gram_eigenvalue = std::min(r.min_gram_eigenvalue, min_eigenvalue(sol.X[b]));
  }
  if (compiled.sdp.num_blocks() == 0) r.min_gram_eigenvalue = 0.0;
  std::vector<Polynomial> xi;
  for (std::size_t k = 0; k < prog.multipliers.size(); ++k) {
    xi.push_back(gram_polynomial(prog.space, prog.multipliers[k].basis, sol.X[lay.multiplier_block[k]]));
  }
  for (std::size_t c = 0; c < prog.constraints.size(); ++c) {
    const SosConstraint& con = prog.constraints[c];
    const Eigen::MatrixXd& Q = sol.X[lay.constraint_block[c]];
    Polynomial expr = con.affine.evaluate(u);
    for (const auto& t : con.terms) expr = expr + t.factor * xi[t.multiplier];
    const Polynomial res = expr - gram_polynomial(prog.space, con.gram_basis, Q);
    r.residuals.push_back({con.label, coef_norm(res), min_eigenvalue(Q)});
  }
  for (std::size_t q = 0; q < prog.inequalities.size(); ++q) {
    const double slack = sol.X[lay.inequality_block[q]](0, 0);
    r.residuals.push_back({prog.inequalities[q].label, std::abs(prog.inequalities[q].expr.eval(u) - slack), slack});
  }
  for (std::size_t k = 0; k < prog.multipliers.size(); ++k) {
    r.residuals.push_back({prog.multipliers[k].name, 0.0, min_eigenvalue(sol.X[lay.multiplier_block[k]])});
  }
  r.max_residual = 0.0;
  for (const auto& s : r.residuals) r.max_residual = std::max(r.max_residual, s.coefficient_norm);

  if (options.run_check) r.check = check_certificate(*r.certificate, model, options.check);
  r.valid = r.min_gram_eigenvalue >= -kValidEigenvalueTolerance && r.max_residual <= kValidResidualTolerance &&
            (!r.check || r.check->passed(kValidMarginTolerance));
  return r;
}

SweepTable alpha_sweep(const SystemModel& model, CertificateKind kind, const std::vector<double>& alphas,
                       const SynthesisOptions& options) {
  if (alphas.empty()) throw InvalidInputError("alpha sweep needs at least one alpha");
  SweepTable table;
  table.kind = kind;
  table.rows.resize(alphas.size());
  parallel_for(static_cast<int>(alphas.size()), [&](int i) {
    SweepRow& row = table.rows[i];
    row.alpha = alphas[i];
    row.applicable = alpha_in_domain(kind, alphas[i]);
    if (!row.applicable) return;
    try {
      row.result = synthesize(model, kind, alphas[i], options);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  const bool safety = is_safety_kind(kind);
  for (int i = 0; i < static_cast<int>(table.rows.size()); ++i) {
    const auto& res = table.rows[i].result;
    if (!res || !res->valid || !res->bound) continue;
    if (!table.best_index) {
      table.best_index = i;
      continue;
    }
    const double cur = table.rows[*table.best_index].result->bound->clamped;
    const double b = res->bound->clamped;
    if (safety ? b < cur : b > cur) table.best_index = i;
  }
  return table;
}

}  // namespace dpbc
