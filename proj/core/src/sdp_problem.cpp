#include "dpbc/sdp_problem.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <type_traits>

#include "dpbc/error.hpp"

namespace dpbc {

namespace {

template <class E>
std::vector<E> sorted(std::vector<E> v) {
  std::sort(v.begin(), v.end(), [](const E& a, const E& b) {
    if constexpr (std::is_same_v<E, SymEntry>) {
      return std::tie(a.row, a.i, a.j, a.value) < std::tie(b.row, b.i, b.j, b.value);
    } else {
      return std::tie(a.row, a.col, a.value) < std::tie(b.row, b.col, b.value);
    }
  });
  return v;
}

bool same_blocks(const std::vector<std::vector<SymEntry>>& a, const std::vector<std::vector<SymEntry>>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (sorted(a[k]) != sorted(b[k])) return false;
  }
  return true;
}

}  // namespace

// Entry order within a block is irrelevant.
bool SdpProblem::same_data(const SdpProblem& o) const {
  return block_sizes == o.block_sizes && num_free == o.num_free && num_rows == o.num_rows &&
         rhs == o.rhs && same_blocks(constraint_entries, o.constraint_entries) &&
         sorted(free_entries) == sorted(o.free_entries) && same_blocks(objective_entries, o.objective_entries) &&
         free_objective == o.free_objective && objective_constant == o.objective_constant && sense == o.sense;
}

void SdpProblem::validate() const {
  const auto nb = block_sizes.size();
  if (constraint_entries.size() != nb || objective_entries.size() != nb) {
    throw InvalidInputError("per-block entry lists do not match the block count");
  }
  if (static_cast<int>(rhs.size()) != num_rows) throw InvalidInputError("rhs length != row count");
  if (static_cast<int>(free_objective.size()) != num_free) {
    throw InvalidInputError("free objective length != free variable count");
  }
  for (std::size_t b = 0; b < nb; ++b) {
    if (block_sizes[b] < 1) throw InvalidInputError("block sizes must be positive");
    auto check = [&](const SymEntry& e, bool row_used) {
      if (e.i < 0 || e.j < e.i || e.j >= block_sizes[b]) throw InvalidInputError("block entry out of range");
      if (row_used && (e.row < 0 || e.row >= num_rows)) throw InvalidInputError("row index out of range");
    };
    for (const auto& e : constraint_entries[b]) check(e, true);
    for (const auto& e : objective_entries[b]) check(e, false);
  }
  for (const auto& e : free_entries) {
    if (e.row < 0 || e.row >= num_rows || e.col < 0 || e.col >= num_free) {
      throw InvalidInputError("free entry out of range");
    }
  }
}

namespace {

// Coefficient of monomial mu in m^T Q m lands on Q_ij for every ordered pair
// with m_i m_j = mu; stored once per unordered pair.
std::map<Monomial, std::vector<std::pair<int, int>>> gram_products(const std::vector<Monomial>& basis) {
  std::map<Monomial, std::vector<std::pair<int, int>>> out;
  for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
    for (int j = i; j < static_cast<int>(basis.size()); ++j) out[basis[i] * basis[j]].push_back({i, j});
  }
  return out;
}

}  // namespace

CompiledSos compile(const SosProgram& program) {
  CompiledSos out;
  SdpProblem& p = out.sdp;
  SosLayout& lay = out.layout;

  p.num_free = program.decision_count();
  p.free_labels = program.decision_names;
  p.free_objective.assign(p.num_free, 0.0);
  const double sign = program.sense == Sense::Maximize ? -1.0 : 1.0;
  for (const auto& [k, c] : program.objective.coefs) p.free_objective[k] = sign * c;
  p.objective_constant = sign * program.objective.constant;
  p.sense = program.sense;

  auto new_block = [&](int size, std::string label) {
    p.block_sizes.push_back(size);
    p.block_labels.push_back(std::move(label));
    p.constraint_entries.emplace_back();
    p.objective_entries.emplace_back();
    return p.num_blocks() - 1;
  };
  for (const auto& c : program.constraints) {
    lay.constraint_block.push_back(new_block(static_cast<int>(c.gram_basis.size()), "gram_" + c.label));
  }
  for (const auto& m : program.multipliers) {
    lay.multiplier_block.push_back(new_block(static_cast<int>(m.basis.size()), m.name));
  }
  for (const auto& q : program.inequalities) lay.inequality_block.push_back(new_block(1, "slack_" + q.label));

  // Multiplier products are shared by every constraint that uses them.
  std::vector<std::map<Monomial, std::vector<std::pair<int, int>>>> mult_products;
  for (const auto& m : program.multipliers) mult_products.push_back(gram_products(m.basis));

  for (std::size_t ci = 0; ci < program.constraints.size(); ++ci) {
    const SosConstraint& c = program.constraints[ci];
    // row monomial -> (block, i, j, value) contributions, affine part
    std::map<Monomial, std::vector<SymEntry>> block_terms;  // row field holds block index
    std::map<Monomial, AffineExpr> affine;
    for (const auto& [m, e] : c.affine.terms()) affine[m] += e;
    const int gb = lay.constraint_block[ci];
    for (const auto& [mu, pairs] : gram_products(c.gram_basis)) {
      for (auto [i, j] : pairs) block_terms[mu].push_back({gb, i, j, -1.0});
    }
    for (const auto& t : c.terms) {
      const int mb = lay.multiplier_block[t.multiplier];
      for (const auto& [mu, pairs] : mult_products[t.multiplier]) {
        for (const auto& [fm, fc] : t.factor.terms()) {
          for (auto [i, j] : pairs) block_terms[mu * fm].push_back({mb, i, j, fc});
        }
      }
    }
    std::set<Monomial> rows;
    for (const auto& kv : affine) rows.insert(kv.first);
    for (const auto& kv : block_terms) rows.insert(kv.first);

    lay.constraint_first_row.push_back(p.num_rows);
    lay.constraint_rows.emplace_back(rows.begin(), rows.end());
    for (const auto& mu : rows) {
      const int r = p.num_rows++;
      // affine(u) + sum <blocks> = 0  ->  sum <blocks> + B u = -constant
      double rhs = 0.0;
      if (auto it = affine.find(mu); it != affine.end()) {
        rhs = -it->second.constant;
        for (const auto& [k, v] : it->second.coefs) p.free_entries.push_back({r, k, v});
      }
      p.rhs.push_back(rhs);
      if (auto it = block_terms.find(mu); it != block_terms.end()) {
        // merge duplicates (same block and cell) so the data is canonical
        std::map<std::tuple<int, int, int>, double> merged;
        for (const auto& e : it->second) merged[{e.row, e.i, e.j}] += e.value;
        for (const auto& [key, v] : merged) {
          if (v == 0.0) continue;
          const auto [b, i, j] = key;
          p.constraint_entries[b].push_back({r, i, j, v});
        }
      }
    }
  }

  for (std::size_t qi = 0; qi < program.inequalities.size(); ++qi) {
    // expr(u) - t = 0, t >= 0
    const AffineExpr& e = program.inequalities[qi].expr;
    const int r = p.num_rows++;
    p.rhs.push_back(-e.constant);
    for (const auto& [k, v] : e.coefs) p.free_entries.push_back({r, k, v});
    p.constraint_entries[lay.inequality_block[qi]].push_back({r, 0, 0, -1.0});
  }
  p.validate();
  return out;
}

Eigen::VectorXd apply_constraints(const SdpProblem& p, const std::vector<Eigen::MatrixXd>& X,
                                  const Eigen::VectorXd& u) {
  if (static_cast<int>(X.size()) != p.num_blocks() || u.size() != p.num_free) {
    throw DimensionError("solution shape does not match the problem");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(p.num_rows);
  for (int b = 0; b < p.num_blocks(); ++b) {
    for (const auto& e : p.constraint_entries[b]) {
      out[e.row] += e.value * (e.i == e.j ? X[b](e.i, e.i) : X[b](e.i, e.j) + X[b](e.j, e.i));
    }
  }
  for (const auto& e : p.free_entries) out[e.row] += e.value * u[e.col];
  return out;
}

Polynomial gram_polynomial(const VarSpace& space, const std::vector<Monomial>& basis,
                           const Eigen::MatrixXd& Q) {
  Polynomial::TermMap t;
  for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
    for (int j = 0; j < static_cast<int>(basis.size()); ++j) t[basis[i] * basis[j]] += Q(i, j);
  }
  return Polynomial(space, std::move(t));
}

}  // namespace dpbc
