#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "cocte/sql/ast.hpp"

namespace cocte::sql {

// One WITH-clause step: `name AS (body)`.
struct CteStep {
  std::string name;       // normalized identifier
  SqlAst body;            // a `query` node
  std::string raw_text;   // source slice of the defining query
  size_t raw_begin = 0;   // offset of raw_text in the chain's raw_text
};

// An ordered chain of CTE steps followed by a final query. K = 0 degenerates
// to a plain query. Step i may reference base tables and earlier steps only.
struct CocteChain {
  std::vector<CteStep> steps;
  SqlAst final_query;       // a `query` node
  std::string final_raw;
  std::string raw_text;

  size_t size() const { return steps.size(); }

  // Assembles the full statement node (ctes..., final query).
  SqlAst to_ast() const;

  bool structurally_equal(const CocteChain& other) const;
};

// Parses a single SQLite-dialect statement in the supported grammar subset.
// Throws SyntaxError / UnsupportedConstruct.
CocteChain parse_cocte(const std::string& sql_text);

// Canonical executable text: "WITH c1 AS (...), ... <final query>".
std::string serialize(const CocteChain& chain);

// "WITH c_1 AS (q_1), ..., c_i AS (q_i) SELECT * FROM c_i", 1 <= i <= K.
// Throws IndexOutOfRange.
std::string prefix_query(const CocteChain& chain, size_t i);

// The WITH-clause prefix alone ("WITH c_1 AS (q_1), ..., c_i AS (q_i)");
// i = 0 yields "". Used as the completion-protocol prefix text.
std::string prefix_with_clause(const CocteChain& chain, size_t i);

// Table and column names of a target database, all lowercased.
struct DbSchema {
  std::map<std::string, std::vector<std::string>> tables;

  bool has_table(const std::string& name) const { return tables.count(name) > 0; }
};

struct Diagnostic {
  int step = 0;  // 1-based step index; K+1 denotes the final query
  std::string code;
  std::string message;
  size_t span_begin = 0;
  size_t span_len = 0;
};

// Relation names (base tables / CTE references) appearing in FROM clauses
// anywhere under `query_node`, in source order with multiplicity.
std::vector<std::string> referenced_relations(const SqlAst& query_node);

// Checks every relation reference against the schema and the chain order.
// Returns diagnostics (ForwardReference, UnknownRelation); empty means valid.
std::vector<Diagnostic> validate_chain(const CocteChain& chain, const DbSchema& schema);

}  // namespace cocte::sql
