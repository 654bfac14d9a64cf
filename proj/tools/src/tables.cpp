#include "dpbc/cli/tables.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <ostream>

#include "dpbc/error.hpp"
#include "dpbc/model_io.hpp"
#include "dpbc/parallel.hpp"

namespace dpbc::cli {

namespace {

constexpr double kNa = std::numeric_limits<double>::quiet_NaN();

// Published values; NaN marks the "\" (not applicable) cells.
const std::vector<double> kAlphaEx1 = {0.99, 0.992, 0.994, 0.996, 0.998, 1.0, 1.002, 1.004, 1.006, 1.008, 1.01};
const std::vector<std::string> kAlphaEx1Labels = {"0.99", "0.992", "0.994", "0.996", "0.998", "1",
                                                  "1.002", "1.004", "1.006", "1.008", "1.01"};
const std::vector<double> kTable1Dbc = {0.9681, 0.8759, 0.793, 0.7178, 0.65, 0.5896,
                                        0.5891, 0.5895, 0.59,  0.5906, 0.5915};
const std::vector<double> kTable1Mbc = {kNa, kNa, kNa, kNa, kNa, 0.5903, 0.6225, 0.6565, 0.6881, 0.7167, 0.7428};
const std::vector<double> kTable1Sbc = {0.9681, 0.8759, 0.793, 0.7177, 0.65, 0.5907, kNa, kNa, kNa, kNa, kNa};

const std::vector<double> kAlphaEx2 = {0.9, 0.92, 0.94, 0.96, 0.98, 1.0, 1.02, 1.04, 1.06, 1.08, 1.1};
const std::vector<std::string> kAlphaEx2Labels = {"0.9", "0.92", "0.94", "0.96", "0.98", "1",
                                                  "1.02", "1.04", "1.06", "1.08", "1.1"};
const std::vector<double> kTable2Dbc = {0.249, 0.2176, 0.1984, 0.19, 0.1929, 0.21, 0.5, 0.69, 0.8129, 0.8936, 0.9465};
const std::vector<double> kTable2Mbc = {kNa, kNa, kNa, kNa, kNa, 0.21, 0.5, 0.69, 0.8129, 0.8936, 0.9465};
const std::vector<double> kTable2Sbc = {0.2491, 0.2176, 0.1984, 0.19, 0.1929, 0.21, kNa, kNa, kNa, kNa, kNa};

const std::vector<double> kTable3Ex1 = {0.01, 0.008, 0.006, 0.004, 0.002, 8e-6, -0.002, -0.004, -0.006, -0.008, -0.01};
const std::vector<double> kTable3Ex2 = {0.1031, 0.0837, 0.0644, 0.0456, 0.0273, 0.01,
                                        0.0102, 0.0104, 0.0106, 0.0108, 0.011};

const std::vector<int> kDegrees = {2, 4, 6, 8, 10, 12, 14};
constexpr double kTable4Alpha = 1.06;
const std::vector<double> kTable4Rabc = {0.2027, 0.3689, 0.3995, 0.4136, 0.4953, 0.5547, 0.6080};
const std::vector<double> kTable4Baseline = {0.1591, 0.2824, 0.3453, 0.3669, 0.4606, 0.5218, 0.5732};

std::optional<double> ref(const std::vector<double>& v, std::size_t i) {
  return std::isnan(v[i]) ? std::nullopt : std::optional<double>(v[i]);
}

TableCell cell_from(const SweepRow& row, bool gamma) {
  TableCell c;
  if (!row.applicable) {
    c.state = CellState::NotApplicable;
    return c;
  }
  c.result = row.result;
  if (!row.result) {
    c.note = row.error.empty() ? "no result" : row.error;
    return c;
  }
  const SynthesisResult& r = *row.result;
  if (!r.valid || !r.bound) {
    c.note = "status " + to_string(r.status) + (r.valid ? "" : ", not valid");
    return c;
  }
  c.state = CellState::Value;
  c.value = gamma ? r.gamma : r.bound->clamped;
  return c;
}

TableRow sweep_row(const std::string& label, const std::string& model_name, CertificateKind kind,
                   const std::vector<double>& alphas, const std::vector<double>& published, int degree,
                   const TableOptions& opt, bool gamma = false) {
  TableRow row{label, model_name, kind, {}};
  SynthesisOptions so = opt.synthesis;
  so.degrees.certificate = degree;
  const SweepTable sweep = alpha_sweep(resolve_model(model_name), kind, alphas, so);
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    TableCell c = cell_from(sweep.rows[i], gamma);
    c.reference = ref(published, i);
    row.cells.push_back(std::move(c));
  }
  return row;
}

std::string csv_cell(const TableCell& c) {
  switch (c.state) {
    case CellState::NotApplicable: return kNotApplicable;
    case CellState::Failed: return kFailed;
    case CellState::Value: break;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", c.value);
  return buf;
}

void write_comments(std::ostream& out, const std::vector<std::string>& lines) {
  for (const auto& l : lines) out << "# " << l << "\n";
}

void write_header(const TableRun& t, std::ostream& out) {
  out << t.column_header;
  for (const auto& c : t.columns) out << "," << c;
  out << "\n";
}

std::string quoted(const std::string& s) {
  return s.find(',') == std::string::npos ? s : "\"" + s + "\"";
}

}  // namespace

std::string to_string(TableId id) {
  switch (id) {
    case TableId::I: return "I";
    case TableId::II: return "II";
    case TableId::III: return "III";
    case TableId::IV: return "IV";
  }
  return "?";
}

TableId table_from_string(const std::string& s) {
  if (s == "I" || s == "i" || s == "1") return TableId::I;
  if (s == "II" || s == "ii" || s == "2") return TableId::II;
  if (s == "III" || s == "iii" || s == "3") return TableId::III;
  if (s == "IV" || s == "iv" || s == "4") return TableId::IV;
  throw ConfigError("unknown table '" + s + "' (expected I, II, III or IV)");
}

bool TableRun::any_failure() const {
  for (const auto& r : rows) {
    for (const auto& c : r.cells) {
      if (c.state == CellState::Failed) return true;
    }
  }
  return false;
}

TableRun run_table(TableId id, const TableOptions& opt) {
  TableRun t;
  t.id = id;
  const int d1 = opt.degree.value_or(6);
  const int d2 = opt.degree.value_or(4);
  switch (id) {
    case TableId::I:
      t.title = "Upper bound of unsafe probability 1 - SA_x0(S), Example 1, degree " + std::to_string(d1);
      t.column_header = "alpha value";
      t.columns = kAlphaEx1Labels;
      t.rows.push_back(sweep_row("DBC (Ours)", "example1", CertificateKind::DSBC, kAlphaEx1, kTable1Dbc, d1, opt));
      t.rows.push_back(sweep_row("MBC", "example1", CertificateKind::MSBC, kAlphaEx1, kTable1Mbc, d1, opt));
      t.rows.push_back(sweep_row("SBC", "example1", CertificateKind::SSBC, kAlphaEx1, kTable1Sbc, d1, opt));
      break;
    case TableId::II:
      t.title = "Upper bound of unsafe probability 1 - SA_x0(S), Example 2, degree " + std::to_string(d2);
      t.column_header = "alpha value";
      t.columns = kAlphaEx2Labels;
      t.rows.push_back(sweep_row("DBC (Ours)", "example2", CertificateKind::DSBC, kAlphaEx2, kTable2Dbc, d2, opt));
      t.rows.push_back(sweep_row("MBC", "example2", CertificateKind::MSBC, kAlphaEx2, kTable2Mbc, d2, opt));
      t.rows.push_back(sweep_row("SBC", "example2", CertificateKind::SSBC, kAlphaEx2, kTable2Sbc, d2, opt));
      break;
    case TableId::III:
      t.title = "gamma = alpha beta - alpha + 1 of the DSBC at each alpha column of Tables I and II";
      t.column_header = "Value index";
      for (int i = 1; i <= 11; ++i) t.columns.push_back(std::to_string(i));
      t.rows.push_back(
          sweep_row("Example 1", "example1", CertificateKind::DSBC, kAlphaEx1, kTable3Ex1, d1, opt, true));
      t.rows.push_back(
          sweep_row("Example 2", "example2", CertificateKind::DSBC, kAlphaEx2, kTable3Ex2, d2, opt, true));
      break;
    case TableId::IV: {
      t.title = "Lower bound of reach-avoid probability RA_x0(G, S), Example 1, alpha = 1.06";
      t.column_header = "Degree of polynomials";
      for (int d : kDegrees) t.columns.push_back(std::to_string(d));
      TableRow row{"RABC (Ours)", "example1", CertificateKind::RABC, {}};
      row.cells.resize(kDegrees.size());
      const SystemModel model = example1_model();
      parallel_for(static_cast<int>(kDegrees.size()), [&](int i) {
        SynthesisOptions so = opt.synthesis;
        so.degrees.certificate = kDegrees[i];
        SweepRow sr;
        sr.alpha = kTable4Alpha;
        try {
          sr.result = synthesize(model, CertificateKind::RABC, kTable4Alpha, so);
        } catch (const std::exception& e) {
          sr.error = e.what();
        }
        row.cells[i] = cell_from(sr, false);
        row.cells[i].reference = kTable4Rabc[i];
      });
      t.rows.push_back(std::move(row));
      t.extra_references.emplace_back("Switched-system baseline", kTable4Baseline);
      break;
    }
  }
  return t;
}

SignCheck gamma_sign_check(const TableRun& t, double threshold) {
  SignCheck s;
  for (const auto& row : t.rows) {
    for (const auto& c : row.cells) {
      if (!c.reference || std::abs(*c.reference) < threshold) {
        ++s.skipped;
        continue;
      }
      ++s.compared;
      if (c.state != CellState::Value || (c.value > 0) != (*c.reference > 0) || c.value == 0.0) ++s.mismatches;
    }
  }
  return s;
}

void write_values_csv(const TableRun& t, std::ostream& out, const std::vector<std::string>& comments) {
  write_comments(out, comments);
  write_header(t, out);
  for (const auto& r : t.rows) {
    out << quoted(r.label);
    for (const auto& c : r.cells) out << "," << csv_cell(c);
    out << "\n";
  }
}

void write_reference_csv(const TableRun& t, std::ostream& out, const std::vector<std::string>& comments) {
  write_comments(out, comments);
  write_header(t, out);
  char buf[64];
  for (const auto& r : t.rows) {
    out << quoted(r.label);
    for (const auto& c : r.cells) {
      if (c.reference) {
        std::snprintf(buf, sizeof buf, "%.6g", *c.reference);
        out << "," << buf;
      } else {
        out << "," << kNotApplicable;
      }
    }
    out << "\n";
  }
  for (const auto& [label, vals] : t.extra_references) {
    out << quoted(label);
    for (double v : vals) {
      std::snprintf(buf, sizeof buf, "%.6g", v);
      out << "," << buf;
    }
    out << "\n";
  }
}

void write_deviation_csv(const TableRun& t, std::ostream& out, const std::vector<std::string>& comments) {
  write_comments(out, comments);
  write_header(t, out);
  char buf[64];
  for (const auto& r : t.rows) {
    out << quoted(r.label);
    for (const auto& c : r.cells) {
      if (c.state == CellState::Failed) {
        out << "," << kFailed;
      } else if (c.state == CellState::NotApplicable || !c.reference) {
        out << "," << kNotApplicable;
      } else {
        std::snprintf(buf, sizeof buf, "%.6g", std::abs(c.value - *c.reference));
        out << "," << buf;
      }
    }
    out << "\n";
  }
}

std::string format_number(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void print_table(const TableRun& t, std::ostream& out) {
  const bool gamma = t.id == TableId::III;
  std::size_t label_w = t.column_header.size();
  for (const auto& r : t.rows) label_w = std::max(label_w, r.label.size() + 11);
  for (const auto& e : t.extra_references) label_w = std::max(label_w, e.first.size() + 1);
  const int w = 10;
  out << "Table " << to_string(t.id) << ": " << t.title << "\n";
  out << std::left << std::setw(static_cast<int>(label_w)) << t.column_header << std::right;
  for (const auto& c : t.columns) out << std::setw(w) << c;
  out << "\n";
  auto fmt = [&](double v) {
    if (!gamma) return format_number(v, 4);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return std::string(buf);
  };
  for (const auto& r : t.rows) {
    out << std::left << std::setw(static_cast<int>(label_w)) << r.label << std::right;
    for (const auto& c : r.cells) {
      out << std::setw(w)
          << (c.state == CellState::Value ? fmt(c.value) : c.state == CellState::Failed ? kFailed : kNotApplicable);
    }
    out << "\n";
    out << std::left << std::setw(static_cast<int>(label_w)) << (r.label + " published") << std::right;
    for (const auto& c : r.cells) out << std::setw(w) << (c.reference ? fmt(*c.reference) : kNotApplicable);
    out << "\n";
  }
  for (const auto& [label, vals] : t.extra_references) {
    out << std::left << std::setw(static_cast<int>(label_w)) << label << std::right;
    for (double v : vals) out << std::setw(w) << fmt(v);
    out << "\n";
  }
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.cells.size(); ++i) {
      if (r.cells[i].state == CellState::Failed) {
        out << "  failed: " << r.label << " @ " << t.columns[i] << ": " << r.cells[i].note << "\n";
      }
    }
  }
}

}  // namespace dpbc::cli
