#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dpbc/synthesis.hpp"

namespace dpbc::cli {

enum class TableId { I, II, III, IV };

std::string to_string(TableId id);
/// "I".."IV" (also "1".."4"); throws ConfigError otherwise.
TableId table_from_string(const std::string& s);

enum class CellState { Value, NotApplicable, Failed };

struct TableCell {
  CellState state = CellState::Failed;
  double value = 0.0;
  std::optional<double> reference;    // published value, when there is one
  std::optional<SynthesisResult> result;
  std::string note;                   // failure reason
};

struct TableRow {
  std::string label;
  std::string model;                  // "example1" / "example2"
  CertificateKind kind = CertificateKind::DSBC;
  std::vector<TableCell> cells;
};

/// One regenerated table: rows are methods (or examples for Table III),
/// columns are alpha values, value indices or degrees.
struct TableRun {
  TableId id = TableId::I;
  std::string title;
  std::string column_header;          // top-left header cell
  std::vector<std::string> columns;
  std::vector<TableRow> rows;
  /// Published rows that are not recomputed (Table IV baseline).
  std::vector<std::pair<std::string, std::vector<double>>> extra_references;

  bool any_failure() const;
};

struct TableOptions {
  /// Certificate degree; defaults to 6 for Example 1 and 4 for Example 2.
  /// Ignored by Table IV, whose columns are the degrees.
  std::optional<int> degree;
  SynthesisOptions synthesis;
};

TableRun run_table(TableId id, const TableOptions& options = {});

/// Published sign of gamma matches for every entry with |gamma| >= threshold.
struct SignCheck {
  int compared = 0;
  int mismatches = 0;
  int skipped = 0;                    // near-zero published entries
  bool ok() const { return mismatches == 0 && compared > 0; }
};
SignCheck gamma_sign_check(const TableRun& table_iii, double threshold = 1e-3);

/// Values, published values and |deviation| as three CSV documents. Each
/// starts with `#` comment lines carrying `header_comments`.
void write_values_csv(const TableRun& t, std::ostream& out, const std::vector<std::string>& header_comments = {});
void write_reference_csv(const TableRun& t, std::ostream& out,
                         const std::vector<std::string>& header_comments = {});
void write_deviation_csv(const TableRun& t, std::ostream& out,
                         const std::vector<std::string>& header_comments = {});

/// Human-readable rendering for the terminal.
void print_table(const TableRun& t, std::ostream& out);

/// Formatting shared with the synthesize command.
std::string format_number(double v, int digits = 4);
inline constexpr const char* kNotApplicable = "\\";
inline constexpr const char* kFailed = "FAILED";

}  // namespace dpbc::cli
