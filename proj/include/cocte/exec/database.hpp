#pragma once

#include <chrono>
#include <filesystem>
#include <string>

#include "cocte/exec/result.hpp"
#include "cocte/sql/chain.hpp"

struct sqlite3;

namespace cocte::exec {

// Maps db ids to SQLite files under a root directory. Accepted layouts:
//   <root>/<id>.sqlite
//   <root>/<id>/<id>.sqlite
//   <root>/<id>.sql      (seed script, materialized once into cache_dir)
class Registry {
public:
  explicit Registry(std::filesystem::path root,
                    std::filesystem::path cache_dir = {});

  // Throws UnknownDatabase if the id resolves to nothing.
  std::filesystem::path resolve(const std::string& db_id) const;

  const std::filesystem::path& root() const { return root_; }

private:
  std::filesystem::path root_;
  std::filesystem::path cache_dir_;
};

// Read-only connection to one SQLite file.
class Connection {
public:
  explicit Connection(const std::filesystem::path& file);
  ~Connection();
  Connection(Connection&&) noexcept;
  Connection& operator=(Connection&&) noexcept;
  Connection(const Connection&) = delete;
  Connection& operator=(const Connection&) = delete;

  // Runs a single SELECT / WITH-SELECT statement. Anything else throws
  // WriteRejected. Runaway queries are interrupted after `timeout`.
  ExecOutcome run(const std::string& sql, std::chrono::milliseconds timeout) const;

  // Table and column names, lowercased.
  sql::DbSchema schema() const;

private:
  sqlite3* db_ = nullptr;
};

// Creates a database file from a SQL script (used for seeds and tests).
void materialize(const std::filesystem::path& file, const std::string& script);

}  // namespace cocte::exec
