#include "cocte/exec/database.hpp"

#include <sqlite3.h>

#include <cctype>
#include <cmath>
#include <cstdio>

#include "cocte/errors.hpp"
#include "cocte/util/util.hpp"

namespace cocte::exec {

namespace {

struct Rounded {
  bool integral;
  long long as_int;
  double value;
};

Rounded round_real(double v) {
  double r = std::round(v * 1e6) / 1e6;
  if (r == 0.0) r = 0.0;
  if (std::isfinite(r) && std::abs(r) < 9.0e15 && r == std::floor(r))
    return {true, static_cast<long long>(r), r};
  return {false, 0, r};
}

// First word of the statement, skipping whitespace and comments.
std::string leading_word(const std::string& sql) {
  size_t i = 0, n = sql.size();
  while (i < n) {
    char c = sql[i];
    if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
    if (c == '-' && i + 1 < n && sql[i + 1] == '-') {
      while (i < n && sql[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && sql[i + 1] == '*') {
      i += 2;
      while (i + 1 < n && !(sql[i] == '*' && sql[i + 1] == '/')) ++i;
      i = i + 2 <= n ? i + 2 : n;
      continue;
    }
    break;
  }
  size_t start = i;
  while (i < n && (std::isalpha(static_cast<unsigned char>(sql[i])) || sql[i] == '_')) ++i;
  return util::lower(sql.substr(start, i - start));
}

struct Deadline {
  std::chrono::steady_clock::time_point at;
  bool expired = false;
};

int progress_callback(void* ctx) {
  auto* d = static_cast<Deadline*>(ctx);
  if (std::chrono::steady_clock::now() >= d->at) {
    d->expired = true;
    return 1;  // interrupt
  }
  return 0;
}

std::string hex_encode(const unsigned char* data, int len) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(static_cast<size_t>(len) * 2);
  for (int i = 0; i < len; ++i) {
    out.push_back(digits[data[i] >> 4]);
    out.push_back(digits[data[i] & 0xf]);
  }
  return out;
}

}  // namespace

std::string Cell::canonical() const {
  switch (type) {
    case Type::Null: return "n|";
    case Type::Int: return "i|" + std::to_string(i);
    case Type::Real: {
      Rounded rr = round_real(r);
      if (rr.integral) return "i|" + std::to_string(rr.as_int);
      return "r|" + util::format_double(rr.value);
    }
    case Type::Text: return "t|" + t;
    case Type::Blob: return "b|" + t;
  }
  return "n|";
}

std::vector<std::string> ResultTable::canonical_rows() const {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    std::string enc;
    for (const Cell& c : row) {
      enc += c.canonical();
      enc.push_back('\x1f');
    }
    out.push_back(std::move(enc));
  }
  std::sort(out.begin(), out.end());
  return out;
}

const char* to_string(ExecStatus s) {
  switch (s) {
    case ExecStatus::Ok: return "ok";
    case ExecStatus::DbError: return "db-error";
    case ExecStatus::Timeout: return "timeout";
  }
  return "db-error";
}

bool results_match(const ResultTable& a, const ResultTable& b) {
  return a.canonical_rows() == b.canonical_rows();
}

Registry::Registry(std::filesystem::path root, std::filesystem::path cache_dir)
    : root_(std::move(root)), cache_dir_(std::move(cache_dir)) {
  if (cache_dir_.empty())
    cache_dir_ = std::filesystem::temp_directory_path() / "cocte-dbcache";
}

std::filesystem::path Registry::resolve(const std::string& db_id) const {
  namespace fs = std::filesystem;
  fs::path flat = root_ / (db_id + ".sqlite");
  if (fs::exists(flat)) return flat;
  fs::path nested = root_ / db_id / (db_id + ".sqlite");
  if (fs::exists(nested)) return nested;
  fs::path seed = root_ / (db_id + ".sql");
  if (fs::exists(seed)) {
    std::string script = util::read_file(seed);
    fs::path cached = cache_dir_ / (db_id + "-" + util::fnv1a_hex(script) + ".sqlite");
    if (!fs::exists(cached)) {
      fs::create_directories(cache_dir_);
      fs::path tmp = cached;
      tmp += ".tmp";
      materialize(tmp, script);
      fs::rename(tmp, cached);
    }
    return cached;
  }
  throw UnknownDatabase(db_id);
}

Connection::Connection(const std::filesystem::path& file) {
  int rc = sqlite3_open_v2(file.c_str(), &db_, SQLITE_OPEN_READONLY, nullptr);
  if (rc != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "open failed";
    if (db_) sqlite3_close(db_);
    db_ = nullptr;
    throw UnknownDatabase(file.string() + ": " + msg);
  }
}

Connection::~Connection() {
  if (db_) sqlite3_close(db_);
}

Connection::Connection(Connection&& other) noexcept : db_(other.db_) {
  other.db_ = nullptr;
}

Connection& Connection::operator=(Connection&& other) noexcept {
  if (this != &other) {
    if (db_) sqlite3_close(db_);
    db_ = other.db_;
    other.db_ = nullptr;
  }
  return *this;
}

ExecOutcome Connection::run(const std::string& sql,
                            std::chrono::milliseconds timeout) const {
  std::string word = leading_word(sql);
  if (word != "select" && word != "with")
    throw WriteRejected("only single SELECT / WITH-SELECT statements are executed");

  auto start = std::chrono::steady_clock::now();
  ExecOutcome out;

  sqlite3_stmt* stmt = nullptr;
  const char* tail = nullptr;
  int rc = sqlite3_prepare_v2(db_, sql.c_str(), -1, &stmt, &tail);
  if (rc != SQLITE_OK) {
    out.status = ExecStatus::DbError;
    out.error_text = sqlite3_errmsg(db_);
    out.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    if (stmt) sqlite3_finalize(stmt);
    return out;
  }
  // trailing content beyond the first statement
  if (tail) {
    for (const char* p = tail; *p; ++p) {
      if (!std::isspace(static_cast<unsigned char>(*p)) && *p != ';') {
        sqlite3_finalize(stmt);
        throw WriteRejected("multiple statements are not allowed");
      }
    }
  }
  if (!sqlite3_stmt_readonly(stmt)) {
    sqlite3_finalize(stmt);
    throw WriteRejected("statement is not read-only");
  }

  Deadline deadline{start + timeout};
  sqlite3_progress_handler(db_, 256, progress_callback, &deadline);

  int ncol = sqlite3_column_count(stmt);
  for (int c = 0; c < ncol; ++c) {
    const char* name = sqlite3_column_name(stmt, c);
    out.table.columns.push_back(name ? name : "");
  }
  while (true) {
    rc = sqlite3_step(stmt);
    if (rc == SQLITE_ROW) {
      std::vector<Cell> row;
      row.reserve(static_cast<size_t>(ncol));
      for (int c = 0; c < ncol; ++c) {
        switch (sqlite3_column_type(stmt, c)) {
          case SQLITE_INTEGER:
            row.push_back(Cell::integer(sqlite3_column_int64(stmt, c)));
            break;
          case SQLITE_FLOAT:
            row.push_back(Cell::real(sqlite3_column_double(stmt, c)));
            break;
          case SQLITE_TEXT: {
            const unsigned char* txt = sqlite3_column_text(stmt, c);
            int len = sqlite3_column_bytes(stmt, c);
            row.push_back(Cell::text(std::string(reinterpret_cast<const char*>(txt),
                                                 static_cast<size_t>(len))));
            break;
          }
          case SQLITE_BLOB: {
            const auto* blob =
                static_cast<const unsigned char*>(sqlite3_column_blob(stmt, c));
            int len = sqlite3_column_bytes(stmt, c);
            row.push_back(Cell::blob(hex_encode(blob, len)));
            break;
          }
          default:
            row.push_back(Cell::null());
        }
      }
      out.table.rows.push_back(std::move(row));
      continue;
    }
    if (rc == SQLITE_DONE) {
      out.status = ExecStatus::Ok;
      break;
    }
    out.status = deadline.expired ? ExecStatus::Timeout : ExecStatus::DbError;
    if (out.status == ExecStatus::DbError) out.error_text = sqlite3_errmsg(db_);
    out.table = {};
    break;
  }
  sqlite3_progress_handler(db_, 0, nullptr, nullptr);
  sqlite3_finalize(stmt);
  out.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return out;
}

sql::DbSchema Connection::schema() const {
  sql::DbSchema out;
  sqlite3_stmt* stmt = nullptr;
  int rc = sqlite3_prepare_v2(
      db_, "SELECT name FROM sqlite_master WHERE type IN ('table','view') ORDER BY name",
      -1, &stmt, nullptr);
  if (rc != SQLITE_OK) throw Error("SchemaError", sqlite3_errmsg(db_));
  std::vector<std::string> tables;
  while (sqlite3_step(stmt) == SQLITE_ROW) {
    const unsigned char* name = sqlite3_column_text(stmt, 0);
    if (name) tables.push_back(util::lower(reinterpret_cast<const char*>(name)));
  }
  sqlite3_finalize(stmt);
  for (const std::string& t : tables) {
    std::string q = "PRAGMA table_info(\"" + t + "\")";
    rc = sqlite3_prepare_v2(db_, q.c_str(), -1, &stmt, nullptr);
    if (rc != SQLITE_OK) throw Error("SchemaError", sqlite3_errmsg(db_));
    std::vector<std::string> cols;
    while (sqlite3_step(stmt) == SQLITE_ROW) {
      const unsigned char* col = sqlite3_column_text(stmt, 1);
      if (col) cols.push_back(util::lower(reinterpret_cast<const char*>(col)));
    }
    sqlite3_finalize(stmt);
    out.tables[t] = std::move(cols);
  }
  return out;
}

void materialize(const std::filesystem::path& file, const std::string& script) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  sqlite3* db = nullptr;
  int rc = sqlite3_open_v2(file.c_str(), &db,
                           SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE, nullptr);
  if (rc != SQLITE_OK) {
    std::string msg = db ? sqlite3_errmsg(db) : "open failed";
    if (db) sqlite3_close(db);
    throw Error("MaterializeError", file.string() + ": " + msg);
  }
  char* err = nullptr;
  rc = sqlite3_exec(db, script.c_str(), nullptr, nullptr, &err);
  std::string msg = err ? err : "";
  if (err) sqlite3_free(err);
  sqlite3_close(db);
  if (rc != SQLITE_OK) {
    std::filesystem::remove(file);
    throw Error("MaterializeError", "seed script failed: " + msg);
  }
}

}  // namespace cocte::exec
