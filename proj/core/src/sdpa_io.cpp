#include "dpbc/sdpa_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dpbc/error.hpp"

namespace dpbc {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string strip_punctuation(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
  }
  return s;
}

}  // namespace

void write_sdpa(const SdpProblem& p, std::ostream& out) {
  p.validate();
  const int nb = p.num_blocks() + (p.num_free > 0 ? 1 : 0);
  out << "\"dpbc semidefinite program\n";
  out << "\"free_pairs " << p.num_free << "\n";
  out << "\"objective_constant " << num(p.objective_constant) << "\n";
  out << "\"sense " << (p.sense == Sense::Maximize ? "max" : "min") << "\n";
  out << p.num_rows << "\n" << nb << "\n";
  for (int b = 0; b < p.num_blocks(); ++b) out << (b ? " " : "") << p.block_sizes[b];
  if (p.num_free > 0) out << (p.num_blocks() ? " " : "") << -2 * p.num_free;
  out << "\n";
  for (int r = 0; r < p.num_rows; ++r) out << (r ? " " : "") << num(p.rhs[r]);
  out << "\n";

  const int free_block = p.num_blocks() + 1;  // 1-based
  // F0
  for (int b = 0; b < p.num_blocks(); ++b) {
    for (const auto& e : p.objective_entries[b]) {
      out << 0 << ' ' << b + 1 << ' ' << e.i + 1 << ' ' << e.j + 1 << ' ' << num(-e.value) << "\n";
    }
  }
  for (int k = 0; k < p.num_free; ++k) {
    const double c = p.free_objective[k];
    if (c == 0.0) continue;
    out << "0 " << free_block << ' ' << k + 1 << ' ' << k + 1 << ' ' << num(-c) << "\n";
    out << "0 " << free_block << ' ' << p.num_free + k + 1 << ' ' << p.num_free + k + 1 << ' ' << num(c)
        << "\n";
  }
  // F_r, grouped by row to keep the file in canonical order.
  std::vector<std::vector<std::string>> lines(p.num_rows);
  for (int b = 0; b < p.num_blocks(); ++b) {
    for (const auto& e : p.constraint_entries[b]) {
      lines[e.row].push_back(std::to_string(e.row + 1) + ' ' + std::to_string(b + 1) + ' ' +
                             std::to_string(e.i + 1) + ' ' + std::to_string(e.j + 1) + ' ' + num(e.value));
    }
  }
  for (const auto& e : p.free_entries) {
    const std::string head = std::to_string(e.row + 1) + ' ' + std::to_string(free_block) + ' ';
    lines[e.row].push_back(head + std::to_string(e.col + 1) + ' ' + std::to_string(e.col + 1) + ' ' +
                           num(e.value));
    const int mcol = p.num_free + e.col + 1;
    lines[e.row].push_back(head + std::to_string(mcol) + ' ' + std::to_string(mcol) + ' ' + num(-e.value));
  }
  for (const auto& row : lines) {
    for (const auto& l : row) out << l << "\n";
  }
}

void write_sdpa(const SdpProblem& p, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  write_sdpa(p, f);
  if (!f) throw Error("write to '" + path + "' failed");
}

SdpProblem read_sdpa(std::istream& in) {
  SdpProblem p;
  int free_pairs = 0;
  std::string line;
  std::vector<std::string> body;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && (line[0] == '"' || line[0] == '*')) {
      std::istringstream c(line.substr(1));
      std::string key;
      c >> key;
      if (key == "free_pairs") c >> free_pairs;
      if (key == "objective_constant") {
        std::string v;
        c >> v;
        p.objective_constant = std::stod(v);
      }
      if (key == "sense") {
        std::string v;
        c >> v;
        p.sense = v == "max" ? Sense::Maximize : Sense::Minimize;
      }
      continue;
    }
    body.push_back(strip_punctuation(line));
  }
  // Header: m, nblocks, block structure, c vector; the block structure and
  // c vector may span whitespace freely, so read them as a token stream.
  std::string joined;
  for (const auto& l : body) joined += l + "\n";
  std::istringstream tok(joined);
  int m = 0, nb = 0;
  if (!(tok >> m >> nb) || m < 0 || nb < 0) throw InvalidInputError("malformed SDPA header");
  std::vector<int> sizes(nb);
  for (int& s : sizes) {
    if (!(tok >> s) || s == 0) throw InvalidInputError("malformed SDPA block structure");
  }
  std::vector<double> cvec(m);
  for (double& v : cvec) {
    std::string t;
    if (!(tok >> t)) throw InvalidInputError("malformed SDPA objective vector");
    v = std::stod(t);
  }
  const bool has_free = free_pairs > 0;
  if (has_free && (nb == 0 || sizes.back() != -2 * free_pairs)) {
    throw InvalidInputError("free-variable block does not match the header comment");
  }
  const int ndense = has_free ? nb - 1 : nb;
  p.num_rows = m;
  p.rhs = cvec;
  p.num_free = free_pairs;
  p.free_objective.assign(free_pairs, 0.0);
  for (int b = 0; b < ndense; ++b) {
    p.block_sizes.push_back(std::abs(sizes[b]));
    p.block_labels.push_back("block" + std::to_string(b + 1));
  }
  for (int k = 0; k < free_pairs; ++k) p.free_labels.push_back("u" + std::to_string(k + 1));
  p.constraint_entries.resize(ndense);
  p.objective_entries.resize(ndense);

  int mat = 0, blk = 0, i = 0, j = 0;
  std::string vs;
  while (tok >> mat >> blk >> i >> j >> vs) {
    const double v = std::stod(vs);
    if (mat < 0 || mat > m || blk < 1 || blk > nb) throw InvalidInputError("SDPA entry index out of range");
    if (i > j) std::swap(i, j);
    if (has_free && blk == nb) {
      if (i != j || i < 1 || i > 2 * free_pairs) throw InvalidInputError("bad free-block entry");
      if (i > free_pairs) continue;  // mirror of the u+ entry
      if (mat == 0) {
        p.free_objective[i - 1] = -v;
      } else {
        p.free_entries.push_back({mat - 1, i - 1, v});
      }
      continue;
    }
    if (i < 1 || j > p.block_sizes[blk - 1]) throw InvalidInputError("SDPA entry outside its block");
    if (mat == 0) {
      p.objective_entries[blk - 1].push_back({0, i - 1, j - 1, -v});
    } else {
      p.constraint_entries[blk - 1].push_back({mat - 1, i - 1, j - 1, v});
    }
  }
  if (!tok.eof()) throw InvalidInputError("trailing garbage in SDPA entries");
  p.validate();
  return p;
}

SdpProblem read_sdpa_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open '" + path + "'");
  return read_sdpa(f);
}

}  // namespace dpbc
