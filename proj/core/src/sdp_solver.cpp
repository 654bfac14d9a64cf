#include "dpbc/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "dpbc/error.hpp"
#include "dpbc/sdpa_io.hpp"

namespace dpbc {

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::Unbounded: return "unbounded";
    case SdpStatus::NumericalFailure: return "numerical-failure";
    case SdpStatus::NotSolved: return "not-solved";
  }
  return "?";
}

namespace {

template <class T>
struct Ipm {
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
  using Blocks = std::vector<Mat>;

  static Mat sym(const Mat& a) { return T(0.5) * (a + a.transpose()); }

  static T inner(const Blocks& a, const Blocks& b) {
    T s = 0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
    return s;
  }

  static T fro(const Blocks& a) {
    T s = 0;
    for (const auto& m : a) s += m.squaredNorm();
    return std::sqrt(s);
  }

  // Original problem, dense: row r is the list of symmetric block matrices A[r].
  int m0 = 0;
  int nfree = 0;
  std::vector<int> sizes;
  std::vector<Blocks> A0;
  Mat B;
  Vec b0;
  Blocks C0;
  Vec c;

  // Standard-form reduction. u is eliminated through B P = Q R:
  //   u_basic = R^-1 Q1^T (b - A(X)),  remaining free columns fixed at 0;
  //   rows T A(X) = T b with T spanning the kept part of null(B^T);
  //   objective <C - A^T w, X> + w^T b with w = Q1 R^-T c_basic.
  std::vector<Blocks> A;
  Vec b;
  Blocks C;
  T constant = 0;
  Mat Trows;
  Vec w;
  Mat Q1, R;
  std::vector<int> basic_cols;
  bool unbounded_direction = false;
  bool inconsistent = false;

  Vec apply_rows(const std::vector<Blocks>& rows, const Blocks& X) const {
    Vec out(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) out[r] = inner(rows[r], X);
    return out;
  }

  Blocks combine_rows(const std::vector<Blocks>& rows, const Vec& y) const {
    Blocks out;
    for (int s : sizes) out.push_back(Mat::Zero(s, s));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (y[r] == T(0)) continue;
      for (std::size_t k = 0; k < sizes.size(); ++k) out[k] += y[r] * rows[r][k];
    }
    return out;
  }

  explicit Ipm(const SdpProblem& p) {
    m0 = p.num_rows;
    nfree = p.num_free;
    sizes = p.block_sizes;
    b0 = Eigen::Map<const Eigen::VectorXd>(p.rhs.data(), p.num_rows).cast<T>();
    c = Eigen::Map<const Eigen::VectorXd>(p.free_objective.data(), p.num_free).cast<T>();
    B = Mat::Zero(m0, nfree);
    for (const auto& e : p.free_entries) B(e.row, e.col) += T(e.value);
    A0.assign(m0, Blocks{});
    for (auto& row : A0) {
      for (int s : sizes) row.push_back(Mat::Zero(s, s));
    }
    for (int blk = 0; blk < p.num_blocks(); ++blk) {
      Mat cm = Mat::Zero(sizes[blk], sizes[blk]);
      for (const auto& e : p.objective_entries[blk]) {
        cm(e.i, e.j) += T(e.value);
        if (e.i != e.j) cm(e.j, e.i) += T(e.value);
      }
      C0.push_back(cm);
      for (const auto& e : p.constraint_entries[blk]) {
        Mat& a = A0[e.row][blk];
        a(e.i, e.j) += T(e.value);
        if (e.i != e.j) a(e.j, e.i) += T(e.value);
      }
    }
    reduce();
  }

  void reduce() {
    Mat Q2 = Mat::Identity(m0, m0);
    w = Vec::Zero(m0);
    if (nfree > 0 && m0 > 0) {
      Eigen::ColPivHouseholderQR<Mat> qr(B);
      qr.setThreshold(T(1e-12));
      const int rank = static_cast<int>(qr.rank());
      const Mat Q = qr.householderQ() * Mat::Identity(m0, m0);
      Q1 = Q.leftCols(rank);
      Q2 = Q.rightCols(m0 - rank);
      R = qr.matrixR().topLeftCorner(rank, rank).template triangularView<Eigen::Upper>();
      const auto& perm = qr.colsPermutation().indices();
      Vec cb(rank);
      for (int k = 0; k < rank; ++k) {
        basic_cols.push_back(perm[k]);
        cb[k] = c[perm[k]];
      }
      w = Q1 * Vec(R.transpose().template triangularView<Eigen::Lower>().solve(cb));
      // c must lie in range(B^T); otherwise the objective is unbounded along null(B).
      if ((c - B.transpose() * w).norm() > T(1e-9) * (T(1) + c.norm())) unbounded_direction = true;
    } else if (nfree > 0 && c.norm() > T(0)) {
      unbounded_direction = true;
    }
    const int m2 = static_cast<int>(Q2.cols());
    std::vector<Blocks> A2(m2);
    const Vec b2 = Q2.transpose() * b0;
    for (int k = 0; k < m2; ++k) A2[k] = combine_rows(A0, Q2.col(k));
    int N = 0;
    for (int s : sizes) N += s * (s + 1) / 2;
    Mat G(N, m2);
    for (int k = 0; k < m2; ++k) {
      int pos = 0;
      for (std::size_t blk = 0; blk < sizes.size(); ++blk) {
        for (int j = 0; j < sizes[blk]; ++j) {
          for (int i = 0; i <= j; ++i) G(pos++, k) = (i == j ? T(1) : std::sqrt(T(2))) * A2[k][blk](i, j);
        }
      }
    }
    std::vector<int> keep;
    if (m2 > 0 && N > 0) {
      Eigen::ColPivHouseholderQR<Mat> qr(G);
      qr.setThreshold(T(1e-10));
      const int rank = static_cast<int>(qr.rank());
      const auto& perm = qr.colsPermutation().indices();
      for (int k = 0; k < rank; ++k) keep.push_back(perm[k]);
      std::sort(keep.begin(), keep.end());
      if (rank < m2) {
        // Dropped rows must be implied by the kept ones.
        const Mat Gk = G(Eigen::all, keep);
        Eigen::ColPivHouseholderQR<Mat> ls(Gk);
        for (int k = 0; k < m2; ++k) {
          if (std::binary_search(keep.begin(), keep.end(), k)) continue;
          const Vec coef = ls.solve(Vec(G.col(k)));
          T implied = 0;
          for (std::size_t q = 0; q < keep.size(); ++q) implied += coef[q] * b2[keep[q]];
          if (std::abs(implied - b2[k]) > T(1e-8) * (T(1) + std::abs(b2[k]))) inconsistent = true;
        }
      }
    } else {
      for (int k = 0; k < m2; ++k) {
        if (std::abs(b2[k]) > T(1e-12)) inconsistent = true;
      }
    }
    Trows.resize(keep.size(), m0);
    b.resize(keep.size());
    for (std::size_t q = 0; q < keep.size(); ++q) {
      Blocks row = A2[keep[q]];
      T scale = std::sqrt(inner(row, row));
      if (!(scale > T(0))) scale = 1;
      for (auto& blk : row) blk /= scale;
      A.push_back(std::move(row));
      b[q] = b2[keep[q]] / scale;
      Trows.row(q) = Q2.col(keep[q]).transpose() / scale;
    }
    const Blocks Atw = combine_rows(A0, w);
    for (std::size_t k = 0; k < sizes.size(); ++k) C.push_back(C0[k] - Atw[k]);
    constant = w.dot(b0);
  }

  // Largest t (capped at 1e30) with M + t dM PSD, for M positive definite.
  static T max_step(const Blocks& M, const Blocks& dM) {
    T t = T(1e30);
    for (std::size_t k = 0; k < M.size(); ++k) {
      Eigen::LLT<Mat> llt(M[k]);
      if (llt.info() != Eigen::Success) return 0;
      const Mat Linv = llt.matrixL().solve(Mat::Identity(M[k].rows(), M[k].cols()));
      const Mat S = sym(Linv * dM[k] * Linv.transpose());
      const T lmin = Eigen::SelfAdjointEigenSolver<Mat>(S, Eigen::EigenvaluesOnly).eigenvalues()(0);
      if (lmin < T(0)) t = std::min(t, T(-1) / lmin);
    }
    return t;
  }

  static bool positive_definite(const Blocks& M) {
    for (const auto& m : M) {
      Eigen::LLT<Mat> llt(m);
      if (llt.info() != Eigen::Success) return false;
    }
    return true;
  }

  Vec recover_u(const Blocks& X) const {
    Vec u = Vec::Zero(nfree);
    if (basic_cols.empty()) return u;
    const Vec rhs = Q1.transpose() * (b0 - apply_rows(A0, X));
    const Vec ub = R.template triangularView<Eigen::Upper>().solve(rhs);
    for (std::size_t k = 0; k < basic_cols.size(); ++k) u[basic_cols[k]] = ub[k];
    return u;
  }

  SdpSolution run(const SdpProblem& problem, const IpmSettings& st) {
    const int nb = static_cast<int>(sizes.size());
    const int m = static_cast<int>(b.size());
    SdpSolution sol;
    Blocks X, Z;
    for (int s : sizes) {
      X.push_back(Mat::Identity(s, s));
      Z.push_back(Mat::Identity(s, s));
    }
    Vec y = Vec::Zero(m);

    const double sign = problem.sense == Sense::Maximize ? -1.0 : 1.0;
    const T norm_b0 = b0.norm();
    const T norm_c0 = std::sqrt(fro(C0) * fro(C0) + c.squaredNorm());
    auto finish = [&](SdpStatus status, std::string msg) {
      sol.status = status;
      sol.message = std::move(msg);
      const Vec u = recover_u(X);
      const Vec yo = Trows.transpose() * y + w;
      // Residuals and objectives on the original problem.
      const Vec rp = b0 - apply_rows(A0, X) - B * u;
      const Blocks Aty = combine_rows(A0, yo);
      T rd2 = (c - B.transpose() * yo).squaredNorm();
      for (int k = 0; k < nb; ++k) rd2 += (C0[k] - Aty[k] - Z[k]).squaredNorm();
      const T pobj = inner(C0, X) + c.dot(u);
      const T dobj = b0.dot(yo);
      sol.primal_objective = static_cast<double>(pobj);
      sol.dual_objective = static_cast<double>(dobj);
      sol.primal_residual = static_cast<double>(rp.norm() / (T(1) + norm_b0));
      sol.dual_residual = static_cast<double>(std::sqrt(rd2) / (T(1) + norm_c0));
      sol.gap = static_cast<double>(std::abs(pobj - dobj) / (T(1) + std::abs(pobj) + std::abs(dobj)));
      sol.objective = sign * (sol.primal_objective + problem.objective_constant);
      for (int k = 0; k < nb; ++k) {
        sol.X.push_back(X[k].template cast<double>());
        sol.Z.push_back(Z[k].template cast<double>());
      }
      sol.u = u.template cast<double>();
      sol.y = yo.template cast<double>();
      return sol;
    };

    if (inconsistent) return finish(SdpStatus::Infeasible, "equality constraints are inconsistent");
    if (unbounded_direction) return finish(SdpStatus::Unbounded, "objective is unbounded along the free variables");
    if (nb == 0) return finish(SdpStatus::Optimal, "no conic variables");

    int n_total = 0;
    for (int s : sizes) n_total += s;
    const T norm_b = b.norm();
    const T norm_C = fro(C);
    T max_a = 0;
    for (const auto& row : A) max_a = std::max(max_a, std::sqrt(inner(row, row)));
    const T nt = T(n_total);
    const T xi = std::max({T(10), std::sqrt(nt), nt * (T(1) + norm_b) / (T(1) + max_a)});
    const T eta = std::max({T(10), std::sqrt(nt), max_a, norm_C});
    for (int k = 0; k < nb; ++k) {
      X[k] *= xi;
      Z[k] *= eta;
    }

    // Row Gram matrix, for projecting primal directions back onto A(dX) = rp.
    Mat AAt(m, m);
    for (int p = 0; p < m; ++p) {
      for (int q = p; q < m; ++q) AAt(p, q) = AAt(q, p) = inner(A[p], A[q]);
    }
    const Eigen::LDLT<Mat> aat(AAt);
    int g_rows = 0;
    for (int s : sizes) g_rows += s * s;
    const T tol = T(st.tolerance);
    // Stall detection: the worst of the three measures must halve every
    // kStallWindow iterations once it is small.
    constexpr int kStallWindow = 8;
    T best = std::numeric_limits<T>::infinity();
    int best_it = 0;

    for (int it = 0; it <= st.max_iterations; ++it) {
      sol.iterations = it;
      const Vec rp = b - apply_rows(A, X);
      const Blocks Aty = combine_rows(A, y);
      Blocks Rd(nb);
      for (int k = 0; k < nb; ++k) Rd[k] = C[k] - Aty[k] - Z[k];
      const T pobj = inner(C, X);
      const T dobj = b.dot(y);
      const T mu = inner(X, Z) / nt;
      const T relp = rp.norm() / (T(1) + norm_b);
      const T reld = fro(Rd) / (T(1) + norm_C);
      const T gap = std::abs(pobj - dobj) / (T(1) + std::abs(pobj + constant) + std::abs(dobj + constant));
      if (st.verbose) {
        std::fprintf(stderr, "%3d  p %+.12Le  d %+.12Le  rp %.2Le  rd %.2Le  gap %.2Le  mu %.2Le\n", it,
                     (long double)(pobj + constant), (long double)(dobj + constant), (long double)relp,
                     (long double)reld, (long double)gap, (long double)mu);
      }
      if (relp <= tol && reld <= tol && gap <= tol) return finish(SdpStatus::Optimal, "converged");
      const T merit = std::max({relp, reld, gap});
      if (merit < T(0.5) * best) {
        best = merit;
        best_it = it;
      } else if (it - best_it >= kStallWindow) {
        return finish(SdpStatus::NumericalFailure, "progress stalled");
      }
      if (dobj > T(0)) {
        Blocks t(nb);
        for (int k = 0; k < nb; ++k) t[k] = Aty[k] + Z[k];
        if (fro(t) / dobj < T(st.infeasibility_tolerance)) {
          return finish(SdpStatus::Infeasible, "primal infeasibility certificate found");
        }
      }
      if (pobj < T(0) && apply_rows(A, X).norm() / -pobj < T(st.infeasibility_tolerance)) {
        return finish(SdpStatus::Unbounded, "dual infeasibility certificate found");
      }
      if (it == st.max_iterations) break;

      // M_ik = <Lz^-1 A_i Lx, Lz^-1 A_k Lx> with X = Lx Lx^T, Z = Lz Lz^T, so
      // M = G^T G. Factoring G by QR avoids squaring its condition number.
      Blocks Zinv(nb);
      Mat G = Mat::Zero(g_rows, m);
      int offset = 0;
      for (int k = 0; k < nb; ++k) {
        Eigen::LLT<Mat> lz(Z[k]);
        Eigen::LLT<Mat> lx(X[k]);
        if (lz.info() != Eigen::Success || lx.info() != Eigen::Success) {
          return finish(SdpStatus::NumericalFailure, "iterate lost definiteness");
        }
        const int s = sizes[k];
        Zinv[k] = sym(lz.solve(Mat::Identity(s, s)));
        const Mat Lx = lx.matrixL();
        for (int q = 0; q < m; ++q) {
          if (A[q][k].squaredNorm() == T(0)) continue;
          const Mat Gq = lz.matrixL().solve(A[q][k] * Lx);
          G.block(offset, q, s * s, 1) = Eigen::Map<const Vec>(Gq.data(), s * s);
        }
        offset += s * s;
      }
      Eigen::HouseholderQR<Mat> qrG(G);
      const Mat Rg = qrG.matrixQR().topRows(m).template triangularView<Eigen::Upper>();
      for (int q = 0; q < m; ++q) {
        if (Rg(q, q) == T(0)) return finish(SdpStatus::NumericalFailure, "Schur complement is singular");
      }
      auto solveM = [&](const Vec& rhs) {
        auto once = [&](const Vec& r) {
          const Vec t = Rg.transpose().template triangularView<Eigen::Lower>().solve(r);
          return Vec(Rg.template triangularView<Eigen::Upper>().solve(t));
        };
        Vec x = once(rhs);
        for (int ref = 0; ref < 2; ++ref) x += once(rhs - G.transpose() * (G * x));
        return x;
      };

      struct Direction {
        Blocks dX, dZ;
        Vec dy;
      };
      auto direction = [&](T sigma_mu, const Blocks* corr) {
        Blocks W(nb);
        for (int k = 0; k < nb; ++k) {
          Mat wk = sigma_mu * Zinv[k] - X[k] - X[k] * Rd[k] * Zinv[k];
          if (corr) wk -= (*corr)[k] * Zinv[k];
          W[k] = sym(wk);
        }
        Direction d;
        d.dy = solveM(rp - apply_rows(A, W));
        const Blocks Atdy = combine_rows(A, d.dy);
        d.dZ.resize(nb);
        d.dX.resize(nb);
        for (int k = 0; k < nb; ++k) {
          d.dZ[k] = sym(Rd[k] - Atdy[k]);
          Mat dx = sigma_mu * Zinv[k] - X[k] - X[k] * d.dZ[k] * Zinv[k];
          if (corr) dx -= (*corr)[k] * Zinv[k];
          d.dX[k] = sym(dx);
        }
        const Vec miss = rp - apply_rows(A, d.dX);
        const Blocks fix = combine_rows(A, Vec(aat.solve(miss)));
        for (int k = 0; k < nb; ++k) d.dX[k] += fix[k];
        return d;
      };

      const Direction pred = direction(T(0), nullptr);
      const T ap = std::min(T(1), max_step(X, pred.dX));
      const T ad = std::min(T(1), max_step(Z, pred.dZ));
      T mu_aff = 0;
      for (int k = 0; k < nb; ++k) mu_aff += (X[k] + ap * pred.dX[k]).cwiseProduct(Z[k] + ad * pred.dZ[k]).sum();
      mu_aff /= nt;
      const T sigma = std::clamp(T(std::pow(std::max(mu_aff, T(0)) / mu, T(3))), T(0), T(1));
      Blocks corr(nb);
      for (int k = 0; k < nb; ++k) corr[k] = pred.dX[k] * pred.dZ[k];
      const Direction dir = direction(sigma * mu, &corr);

      const T factor = T(0.98);
      T sp = std::min(T(1), factor * max_step(X, dir.dX));
      T sd = std::min(T(1), factor * max_step(Z, dir.dZ));
      if (!(sp > T(1e-14)) || !(sd > T(1e-14))) return finish(SdpStatus::NumericalFailure, "step length collapsed");
      // Rounding can push a full-length step onto the boundary; back off.
      Blocks Xn(nb), Zn(nb);
      for (int tries = 0;; ++tries) {
        for (int k = 0; k < nb; ++k) {
          Xn[k] = sym(X[k] + sp * dir.dX[k]);
          Zn[k] = sym(Z[k] + sd * dir.dZ[k]);
        }
        if (positive_definite(Xn) && positive_definite(Zn)) break;
        if (tries == 30) return finish(SdpStatus::NumericalFailure, "iterate left the cone interior");
        sp *= T(0.5);
        sd *= T(0.5);
      }
      X = std::move(Xn);
      Z = std::move(Zn);
      y += sd * dir.dy;
      if (!y.allFinite()) return finish(SdpStatus::NumericalFailure, "non-finite dual iterate");
    }
    return finish(SdpStatus::NumericalFailure, "iteration limit reached");
  }
};

}  // namespace

SdpSolution InteriorPointSolver::solve(const SdpProblem& problem) const {
  problem.validate();
  SdpSolution s = Ipm<double>(problem).run(problem, settings_);
  if (s.status == SdpStatus::NumericalFailure && settings_.extended_precision_fallback) {
    if (settings_.verbose) std::fprintf(stderr, "retrying in extended precision\n");
    SdpSolution e = Ipm<long double>(problem).run(problem, settings_);
    e.extended_precision = true;
    e.iterations += s.iterations;
    if (e.status != SdpStatus::NumericalFailure || e.gap < s.gap) return e;
  }
  return s;
}

SdpSolution SdpaExportBackend::solve(const SdpProblem& problem) const {
  write_sdpa(problem, path_);
  SdpSolution s;
  s.status = SdpStatus::NotSolved;
  s.message = "problem written to " + path_;
  return s;
}

std::unique_ptr<SdpBackend> make_backend(const std::string& name, const IpmSettings& settings,
                                         const std::string& export_path) {
  if (name == "ipm") return std::make_unique<InteriorPointSolver>(settings);
  if (name == "sdpa-export") return std::make_unique<SdpaExportBackend>(export_path);
  throw ConfigError("unknown SDP backend '" + name + "' (expected ipm or sdpa-export)");
}

}  // namespace dpbc
