#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cocte::exec {

// One canonicalized result cell. Reals are rounded to 6 decimal places; a
// rounded real with an integral value collapses to the integer form so that
// e.g. SUM() returning 2.0 matches a gold query returning 2. NULL is its own
// token, distinct from any text.
struct Cell {
  enum class Type { Null, Int, Real, Text, Blob };
  Type type = Type::Null;
  long long i = 0;
  double r = 0.0;
  std::string t;

  static Cell null() { return Cell{}; }
  static Cell integer(long long v) { return Cell{Type::Int, v, 0.0, {}}; }
  static Cell real(double v) { return Cell{Type::Real, 0, v, {}}; }
  static Cell text(std::string v) { return Cell{Type::Text, 0, 0.0, std::move(v)}; }
  static Cell blob(std::string hex) { return Cell{Type::Blob, 0, 0.0, std::move(hex)}; }

  // Stable canonical token used for comparisons and artifacts.
  std::string canonical() const;
};

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  // Sorted canonical row encodings; multiset comparison reduces to equality
  // of these vectors.
  std::vector<std::string> canonical_rows() const;
};

enum class ExecStatus { Ok, DbError, Timeout };

const char* to_string(ExecStatus s);

struct ExecOutcome {
  ExecStatus status = ExecStatus::DbError;
  ResultTable table;       // populated iff status == Ok
  std::string error_text;  // populated iff status == DbError
  long long elapsed_ms = 0;

  bool ok() const { return status == ExecStatus::Ok; }
};

// Execution-accuracy comparison: row multisets equal under cell
// canonicalization; row order ignored, column order respected, column names
// ignored.
bool results_match(const ResultTable& a, const ResultTable& b);

}  // namespace cocte::exec
