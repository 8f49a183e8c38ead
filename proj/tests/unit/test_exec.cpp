#include <doctest.h>

#include <random>

#include "cocte/errors.hpp"
#include "cocte/exec/executor.hpp"
#include "cocte/util/util.hpp"
#include "support/fixtures.hpp"

using namespace cocte;
using namespace cocte::exec;

namespace {

fixtures::ToyDb& toy() {
  static fixtures::ToyDb db;
  return db;
}

Executor executor(std::chrono::milliseconds t = std::chrono::milliseconds(30000)) {
  return Executor(&toy().registry(), t);
}

}  // namespace

TEST_SUITE("exec") {

TEST_CASE("simple select") {
  ExecOutcome out = executor().execute_sql("toy", "SELECT 1 AS x");
  REQUIRE(out.ok());
  CHECK(out.table.columns == std::vector<std::string>{"x"});
  REQUIRE(out.table.rows.size() == 1);
  CHECK(out.table.rows[0][0].canonical() == "i|1");
}

TEST_CASE("db error surfaces as outcome") {
  ExecOutcome out = executor().execute_sql("toy", "SELECT * FROM no_such_table");
  CHECK(out.status == ExecStatus::DbError);
  CHECK(!out.error_text.empty());
}

TEST_CASE("unknown database") {
  CHECK_THROWS_AS(executor().execute_sql("nope", "SELECT 1"), UnknownDatabase);
}

TEST_CASE("write statements rejected") {
  CHECK_THROWS_AS(executor().execute_sql("toy", "DELETE FROM sales"), WriteRejected);
  CHECK_THROWS_AS(executor().execute_sql("toy", "INSERT INTO sales VALUES (99,1,1,1,'x')"),
                  WriteRejected);
  CHECK_THROWS_AS(executor().execute_sql("toy", "PRAGMA user_version"), WriteRejected);
  CHECK_THROWS_AS(executor().execute_sql("toy", "SELECT 1; SELECT 2"), WriteRejected);
}

TEST_CASE("combinatorial join exceeds timeout") {
  // 18^7 ~ 6e8 candidate rows: far beyond what 40ms allows
  ExecOutcome out = executor(std::chrono::milliseconds(40))
                        .execute_sql("toy",
                                     "SELECT COUNT(*) FROM sales a, sales b, sales c, "
                                     "sales d, sales e, sales f, sales g");
  CHECK(out.status == ExecStatus::Timeout);
}

TEST_CASE("results_match: row order insensitive") {
  ExecOutcome a = executor().execute_sql("toy", "SELECT id FROM stores ORDER BY id");
  ExecOutcome b = executor().execute_sql("toy", "SELECT id FROM stores ORDER BY id DESC");
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  CHECK(results_match(a.table, b.table));
}

TEST_CASE("results_match: multiset semantics") {
  ExecOutcome a = executor().execute_sql("toy", "SELECT 1 UNION ALL SELECT 1");
  ExecOutcome b = executor().execute_sql("toy", "SELECT 1");
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  CHECK_FALSE(results_match(a.table, b.table));
}

TEST_CASE("results_match: float rounding to 1e-6") {
  ExecOutcome a = executor().execute_sql("toy", "SELECT 0.3333333");
  ExecOutcome b = executor().execute_sql("toy", "SELECT 1.0/3.0");
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  CHECK(results_match(a.table, b.table));
}

TEST_CASE("results_match: column names ignored, order respected") {
  ExecOutcome a = executor().execute_sql("toy", "SELECT 1 AS x, 2 AS y");
  ExecOutcome b = executor().execute_sql("toy", "SELECT 1 AS p, 2 AS q");
  ExecOutcome c = executor().execute_sql("toy", "SELECT 2 AS x, 1 AS y");
  REQUIRE(a.ok());
  CHECK(results_match(a.table, b.table));
  CHECK_FALSE(results_match(a.table, c.table));
}

TEST_CASE("results_match: NULL is its own token") {
  ExecOutcome n = executor().execute_sql("toy", "SELECT NULL");
  ExecOutcome z = executor().execute_sql("toy", "SELECT 0");
  ExecOutcome s = executor().execute_sql("toy", "SELECT ''");
  REQUIRE(n.ok());
  CHECK_FALSE(results_match(n.table, z.table));
  CHECK_FALSE(results_match(n.table, s.table));
  ExecOutcome n2 = executor().execute_sql("toy", "SELECT NULL WHERE 1=1");
  CHECK(results_match(n.table, n2.table));
}

TEST_CASE("integral reals collapse to integers") {
  ExecOutcome a = executor().execute_sql("toy", "SELECT 2.0");
  ExecOutcome b = executor().execute_sql("toy", "SELECT 2");
  REQUIRE(a.ok());
  CHECK(results_match(a.table, b.table));
}

TEST_CASE("execute_steps runs every prefix and keeps going") {
  auto chain = sql::parse_cocte(
      "WITH t AS (SELECT 1 AS x) SELECT x FROM t");
  auto outs = executor().execute_steps("toy", chain);
  REQUIRE(outs.size() == 1);
  REQUIRE(outs[0].ok());
  CHECK(outs[0].table.rows.size() == 1);
  CHECK(outs[0].table.rows[0][0].canonical() == "i|1");

  auto bad = sql::parse_cocte(
      "WITH a AS (SELECT id FROM stores), b AS (SELECT wrongcol FROM a) "
      "SELECT * FROM b");
  auto outs2 = executor().execute_steps("toy", bad);
  REQUIRE(outs2.size() == 2);
  CHECK(outs2[0].ok());
  CHECK(outs2[1].status == ExecStatus::DbError);
}

TEST_CASE("prefix K equals full execution when final is SELECT * FROM last") {
  std::mt19937_64 rng(31);
  int checked = 0;
  for (int i = 0; i < 40 && checked < 10; ++i) {
    auto chain = sql::parse_cocte(fixtures::random_chain_sql(rng));
    if (chain.size() == 0) continue;
    // force the equivalence precondition
    auto forced = sql::parse_cocte(sql::prefix_query(chain, chain.size()));
    ExecOutcome via_prefix =
        executor().execute_sql("toy", sql::prefix_query(forced, forced.size()));
    ExecOutcome via_serialize = executor().execute_sql("toy", sql::serialize(forced));
    if (!via_prefix.ok() || !via_serialize.ok()) continue;  // random col/table mismatch
    CHECK(results_match(via_prefix.table, via_serialize.table));
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("determinism of repeated execution") {
  const std::string q =
      "SELECT region, COUNT(*) FROM stores JOIN sales ON stores.id = sales.store_id "
      "GROUP BY region";
  ExecOutcome a = executor().execute_sql("toy", q);
  ExecOutcome b = executor().execute_sql("toy", q);
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  CHECK(a.table.canonical_rows() == b.table.canonical_rows());
}

TEST_CASE("results_match is an equivalence relation on ok outcomes") {
  std::vector<std::string> queries = {
      "SELECT id FROM stores",
      "SELECT id FROM stores ORDER BY id DESC",
      "SELECT qty FROM sales WHERE qty > 5",
      "SELECT 1.0*id FROM stores",
      "SELECT region FROM stores",
  };
  std::vector<ResultTable> tables;
  for (const auto& q : queries) {
    ExecOutcome o = executor().execute_sql("toy", q);
    REQUIRE(o.ok());
    tables.push_back(o.table);
  }
  std::mt19937_64 rng(404);
  for (int t = 0; t < 100; ++t) {
    const ResultTable& x = tables[rng() % tables.size()];
    const ResultTable& y = tables[rng() % tables.size()];
    const ResultTable& z = tables[rng() % tables.size()];
    CHECK(results_match(x, x));
    CHECK(results_match(x, y) == results_match(y, x));
    if (results_match(x, y) && results_match(y, z)) CHECK(results_match(x, z));
  }
}

TEST_CASE("outcome_reward") {
  QuestionInstance inst{"q1", "ids of stores", "toy", "SELECT id FROM stores"};

  // formatting-only difference
  auto same = sql::parse_cocte(
      "WITH s AS (SELECT id FROM stores ORDER BY id DESC) SELECT * FROM s");
  CHECK(executor().outcome_reward(inst, same) == 1);

  // db error
  auto broken = sql::parse_cocte("WITH s AS (SELECT nosuch FROM stores) SELECT * FROM s");
  CHECK(executor().outcome_reward(inst, broken) == 0);

  // superset of gold rows
  QuestionInstance small{"q2", "small ids", "toy", "SELECT id FROM stores WHERE id <= 2"};
  auto superset = sql::parse_cocte("WITH s AS (SELECT id FROM stores) SELECT * FROM s");
  CHECK(executor().outcome_reward(small, superset) == 0);

  // gold itself broken
  QuestionInstance badgold{"q3", "broken", "toy", "SELECT zap FROM stores"};
  CHECK_THROWS_AS(executor().outcome_reward(badgold, same), GoldExecutionFailed);
}

TEST_CASE("schema extraction") {
  auto schema = executor().schema("toy");
  REQUIRE(schema.has_table("sales"));
  CHECK(schema.tables.at("sales") ==
        std::vector<std::string>{"id", "store_id", "product_id", "qty", "sold_on"});
}

TEST_CASE("registry resolves .sql seeds via cache") {
  fixtures::TempDir dir("seedreg");
  cocte::util::write_file(dir.path() / "mini.sql",
                          "CREATE TABLE t (a INTEGER); INSERT INTO t VALUES (42);");
  Registry reg(dir.path(), dir.path() / "cache");
  Executor ex(&reg);
  ExecOutcome out = ex.execute_sql("mini", "SELECT a FROM t");
  REQUIRE(out.ok());
  CHECK(out.table.rows[0][0].canonical() == "i|42");
}

}  // TEST_SUITE
