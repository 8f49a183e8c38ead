#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "cocte/exec/database.hpp"

namespace fixtures {

class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("cocte-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

inline const char* toy_schema_sql() {
  return R"SQL(
CREATE TABLE stores (id INTEGER PRIMARY KEY, name TEXT, region TEXT);
CREATE TABLE products (id INTEGER PRIMARY KEY, name TEXT, category TEXT, price REAL);
CREATE TABLE sales (id INTEGER PRIMARY KEY, store_id INTEGER, product_id INTEGER, qty INTEGER, sold_on TEXT);
INSERT INTO stores VALUES (1,'alpha','north'),(2,'beta','south'),(3,'gamma','east'),(4,'delta','west');
INSERT INTO products VALUES
 (1,'cocoa','snack',2.5),(2,'chips','snack',1.75),(3,'cola','drink',1.2),
 (4,'juice','drink',3.0),(5,'hammer','tool',11.5),(6,'wrench','tool',9.25);
INSERT INTO sales VALUES
 (1,1,1,4,'2024-01-02'),(2,1,3,2,'2024-01-03'),(3,1,5,1,'2024-01-05'),
 (4,2,2,7,'2024-01-02'),(5,2,4,3,'2024-01-04'),(6,2,6,2,'2024-01-06'),
 (7,3,1,5,'2024-01-03'),(8,3,3,8,'2024-01-07'),(9,3,5,2,'2024-01-08'),
 (10,4,2,6,'2024-01-04'),(11,4,4,1,'2024-01-09'),(12,4,6,3,'2024-01-10'),
 (13,1,2,2,'2024-01-11'),(14,2,1,9,'2024-01-12'),(15,3,4,4,'2024-01-13'),
 (16,4,3,5,'2024-01-14'),(17,1,6,1,'2024-01-15'),(18,2,5,2,'2024-01-16');
)SQL";
}

// Registry directory with a single database "toy".
class ToyDb {
public:
  ToyDb() : dir_("toydb") {
    cocte::exec::materialize(dir_.path() / "toy.sqlite", toy_schema_sql());
    registry_ = std::make_unique<cocte::exec::Registry>(dir_.path());
  }
  const cocte::exec::Registry& registry() const { return *registry_; }

private:
  TempDir dir_;
  std::unique_ptr<cocte::exec::Registry> registry_;
};

// Random but always-parseable chain text, used for round-trip and dedup
// corpus tests.
inline std::string random_chain_sql(std::mt19937_64& rng) {
  auto pick = [&](const std::vector<std::string>& v) {
    return v[rng() % v.size()];
  };
  std::vector<std::string> tables = {"stores", "products", "sales"};
  std::vector<std::string> cols = {"id", "name", "region", "category", "price", "qty"};
  std::vector<std::string> aggs = {"count", "sum", "avg", "max", "min"};
  std::vector<std::string> cmps = {"<", "<=", ">", ">=", "=", "!="};

  int k = 1 + static_cast<int>(rng() % 3);
  std::string out = "WITH ";
  std::string prev;
  for (int i = 0; i < k; ++i) {
    std::string name = "s" + std::to_string(i + 1);
    if (i) out += ", ";
    out += name + " AS (SELECT " + pick(cols) + " AS c0, " + pick(cols) + " AS c1 FROM " +
           (prev.empty() || rng() % 2 == 0 ? pick(tables) : prev);
    if (rng() % 2 == 0)
      out += " WHERE " + (prev.empty() ? pick(cols) : std::string("c0")) + " " +
             pick(cmps) + " " + std::to_string(rng() % 50);
    out += ")";
    prev = name;
  }
  out += " SELECT ";
  if (rng() % 3 == 0) {
    out += pick(aggs) + "(c1) AS v FROM " + prev;
  } else {
    out += "c0, c1 FROM " + prev;
    if (rng() % 2 == 0) out += " ORDER BY c0";
    if (rng() % 3 == 0) out += " LIMIT " + std::to_string(1 + rng() % 9);
  }
  return out;
}

}  // namespace fixtures
