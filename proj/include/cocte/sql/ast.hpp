#pragma once

#include <string>
#include <vector>

namespace cocte::sql {

// One node of a parsed SQL tree.
//
// Inner nodes carry only a `kind`; every text-bearing token (identifiers,
// literals, operators, function names, join/set-op variants, aliases) lives
// in a leaf. A pre-order walk of the labels therefore preserves the full
// normalized content of the statement.
struct SqlAst {
  std::string kind;
  std::string text;  // normalized token text; leaves only
  std::vector<SqlAst> children;

  bool is_leaf() const { return children.empty(); }
  bool operator==(const SqlAst& other) const = default;
};

// Node kinds. String constants rather than an enum so that "..." kinds can
// be added without touching a switch in every consumer.
namespace node {
inline constexpr const char* statement = "statement";
inline constexpr const char* cte = "cte";
inline constexpr const char* query = "query";
inline constexpr const char* set_op = "set-op";
inline constexpr const char* set_kind = "set-kind";
inline constexpr const char* select_core = "select-core";
inline constexpr const char* distinct = "distinct";
inline constexpr const char* select_list = "select-list";
inline constexpr const char* select_item = "select-item";
inline constexpr const char* alias = "alias";
inline constexpr const char* from = "from";
inline constexpr const char* table = "table";
inline constexpr const char* subquery = "subquery";
inline constexpr const char* join = "join";
inline constexpr const char* join_kind = "join-kind";
inline constexpr const char* on = "on";
inline constexpr const char* where = "where";
inline constexpr const char* group_by = "group-by";
inline constexpr const char* having = "having";
inline constexpr const char* order_limit = "order-limit";
inline constexpr const char* order_by = "order-by";
inline constexpr const char* ordering = "ordering";
inline constexpr const char* direction = "direction";
inline constexpr const char* limit = "limit";
inline constexpr const char* offset = "offset";
inline constexpr const char* expr_binary = "expr-binary";
inline constexpr const char* expr_unary = "expr-unary";
inline constexpr const char* expr_in = "expr-in";
inline constexpr const char* in_list = "in-list";
inline constexpr const char* expr_between = "expr-between";
inline constexpr const char* expr_is = "expr-is";
inline constexpr const char* op = "op";
inline constexpr const char* function_call = "function-call";
inline constexpr const char* fn_name = "fn-name";
inline constexpr const char* case_expr = "case";
inline constexpr const char* case_operand = "case-operand";
inline constexpr const char* when = "when";
inline constexpr const char* else_clause = "else";
inline constexpr const char* cast_expr = "cast";
inline constexpr const char* type_name = "type";
inline constexpr const char* subquery_expr = "subquery-expr";
inline constexpr const char* exists_expr = "exists";
inline constexpr const char* identifier = "identifier";
inline constexpr const char* literal = "literal";
inline constexpr const char* star = "star";
}  // namespace node

inline SqlAst leaf(const char* kind, std::string text) {
  return SqlAst{kind, std::move(text), {}};
}

inline SqlAst inner(const char* kind, std::vector<SqlAst> children) {
  return SqlAst{kind, {}, std::move(children)};
}

// Depth-first pre-order node labels. Leaf labels are "kind:text", inner
// labels are the kind alone.
std::vector<std::string> preorder_labels(const SqlAst& ast);

size_t node_count(const SqlAst& ast);

// Renders a node back to executable SQL text. Deterministic: rendering the
// parse of any supported statement and re-parsing yields a structurally
// equal tree.
std::string render(const SqlAst& ast);

}  // namespace cocte::sql
