#include <charconv>
#include <cstdlib>
#include <optional>
#include <set>
#include <string>

#include "cocte/errors.hpp"
#include "cocte/sql/chain.hpp"
#include "cocte/sql/lexer.hpp"
#include "cocte/util/util.hpp"

namespace cocte::sql {

namespace {

// "1.50" -> "1.5", "007" -> "7", "0x1A" -> "26". Non-integral values render
// with shortest round-trip digits.
std::string canonical_number(const std::string& raw) {
  if (raw.size() > 2 && raw[0] == '0' && (raw[1] == 'x' || raw[1] == 'X')) {
    unsigned long long v = std::strtoull(raw.c_str() + 2, nullptr, 16);
    return std::to_string(static_cast<long long>(v));
  }
  bool integral = raw.find('.') == std::string::npos &&
                  raw.find('e') == std::string::npos &&
                  raw.find('E') == std::string::npos;
  if (integral) {
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(raw.c_str(), &end, 10);
    if (errno == 0 && end == raw.c_str() + raw.size()) return std::to_string(v);
    // too large for int64: keep digits with leading zeros stripped
    size_t i = 0;
    while (i + 1 < raw.size() && raw[i] == '0') ++i;
    return raw.substr(i);
  }
  double d = std::strtod(raw.c_str(), nullptr);
  return util::format_double(d);
}

std::string escape_single_quotes(const std::string& s) {
  std::string out;
  for (char c : s) {
    out.push_back(c);
    if (c == '\'') out.push_back('\'');
  }
  return out;
}

bool plain_lower_ident(const std::string& s) {
  if (s.empty()) return false;
  if (!(std::islower(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::islower(static_cast<unsigned char>(c)) ||
          std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
      return false;
  }
  return !is_keyword(s);
}

// Canonical rendering of one identifier part. Unquoted parts were lowercased
// by the lexer; quoted parts keep their case and re-quote unless they are
// indistinguishable from a plain identifier.
std::string render_ident_part(const Token& t) {
  if (t.type == TokType::Ident) return t.text;
  if (plain_lower_ident(t.text)) return t.text;
  std::string out = "\"";
  for (char c : t.text) {
    out.push_back(c);
    if (c == '"') out.push_back('"');
  }
  out.push_back('"');
  return out;
}

class Parser {
public:
  explicit Parser(const std::string& sql) : src_(sql), toks_(lex(sql)) {}

  CocteChain parse_statement() {
    CocteChain chain;
    chain.raw_text = src_;
    if (at_kw("with")) {
      advance();
      if (at_kw("recursive"))
        throw UnsupportedConstruct(peek().pos, "recursive WITH is not supported");
      std::set<std::string> names;
      while (true) {
        CteStep step = parse_cte();
        if (!names.insert(step.name).second)
          throw SyntaxError(peek().pos, "duplicate CTE name '" + step.name + "'");
        chain.steps.push_back(std::move(step));
        if (at_punct(",")) {
          advance();
          continue;
        }
        break;
      }
    }
    size_t final_begin = peek().pos;
    if (!at_kw("select"))
      fail("expected SELECT");
    chain.final_query = parse_query();
    size_t final_end = peek().pos;
    chain.final_raw = util::trim(src_.substr(final_begin, final_end - final_begin));
    if (at_punct(";")) advance();
    if (peek().type != TokType::End) fail("unexpected trailing input");
    return chain;
  }

private:
  const std::string& src_;
  std::vector<Token> toks_;
  size_t i_ = 0;

  const Token& peek(size_t k = 0) const {
    size_t j = i_ + k;
    if (j >= toks_.size()) j = toks_.size() - 1;
    return toks_[j];
  }
  void advance() { if (i_ + 1 < toks_.size()) ++i_; }
  bool at_kw(const char* kw, size_t k = 0) const {
    return peek(k).type == TokType::Keyword && peek(k).text == kw;
  }
  bool at_punct(const char* p, size_t k = 0) const {
    return peek(k).type == TokType::Punct && peek(k).text == p;
  }
  bool at_op(const char* o) const {
    return peek().type == TokType::Op && peek().text == o;
  }
  bool accept_kw(const char* kw) {
    if (at_kw(kw)) { advance(); return true; }
    return false;
  }
  void expect_kw(const char* kw) {
    if (!accept_kw(kw)) fail(std::string("expected ") + util::lower(kw));
  }
  void expect_punct(const char* p) {
    if (!at_punct(p)) fail(std::string("expected '") + p + "'");
    advance();
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(peek().pos, msg + ", got '" + peek().text + "'");
  }
  [[noreturn]] void unsupported(const std::string& msg) const {
    throw UnsupportedConstruct(peek().pos, msg);
  }

  std::string parse_ident_part() {
    const Token& t = peek();
    if (t.type != TokType::Ident && t.type != TokType::QuotedIdent)
      fail("expected identifier");
    std::string out = render_ident_part(t);
    advance();
    return out;
  }

  CteStep parse_cte() {
    CteStep step;
    step.name = parse_ident_part();
    expect_kw("as");
    expect_punct("(");
    if (at_kw("with"))
      unsupported("nested WITH inside a CTE body");
    size_t body_begin = peek().pos;
    step.body = parse_query();
    size_t body_end = peek().pos;
    step.raw_text = util::trim(src_.substr(body_begin, body_end - body_begin));
    step.raw_begin = body_begin;
    expect_punct(")");
    return step;
  }

  // query := core (set-op core)* [ORDER BY ...] [LIMIT ...]
  SqlAst parse_query() {
    SqlAst body = parse_select_core();
    while (at_kw("union") || at_kw("intersect") || at_kw("except")) {
      std::string op = peek().text;
      advance();
      if (op == "union" && accept_kw("all")) op = "union-all";
      SqlAst rhs = parse_select_core();
      body = inner(node::set_op,
                   {std::move(body), leaf(node::set_kind, op), std::move(rhs)});
    }
    std::vector<SqlAst> tail;
    if (at_kw("order")) {
      advance();
      expect_kw("by");
      std::vector<SqlAst> orderings;
      while (true) {
        SqlAst e = parse_expr();
        std::vector<SqlAst> kids;
        kids.push_back(std::move(e));
        if (accept_kw("desc")) kids.push_back(leaf(node::direction, "desc"));
        else accept_kw("asc");  // ASC is the default; normalized away
        orderings.push_back(inner(node::ordering, std::move(kids)));
        if (at_punct(",")) { advance(); continue; }
        break;
      }
      tail.push_back(inner(node::order_by, std::move(orderings)));
    }
    if (at_kw("limit")) {
      advance();
      SqlAst count = parse_expr();
      std::vector<SqlAst> kids;
      if (accept_kw("offset")) {
        SqlAst off = parse_expr();
        kids.push_back(std::move(count));
        kids.push_back(inner(node::offset, {std::move(off)}));
      } else if (at_punct(",")) {
        // LIMIT a, b  ==  LIMIT b OFFSET a
        advance();
        SqlAst second = parse_expr();
        kids.push_back(std::move(second));
        kids.push_back(inner(node::offset, {std::move(count)}));
      } else {
        kids.push_back(std::move(count));
      }
      tail.push_back(inner(node::limit, std::move(kids)));
    }
    std::vector<SqlAst> q_kids;
    q_kids.push_back(std::move(body));
    if (!tail.empty()) q_kids.push_back(inner(node::order_limit, std::move(tail)));
    return inner(node::query, std::move(q_kids));
  }

  SqlAst parse_select_core() {
    if (at_punct("(")) {
      // parenthesized compound member: "(SELECT ...)"
      advance();
      if (at_kw("with")) unsupported("nested WITH inside a subquery");
      SqlAst q = parse_query();
      expect_punct(")");
      return inner(node::subquery, {std::move(q)});
    }
    expect_kw("select");
    std::vector<SqlAst> kids;
    if (accept_kw("distinct")) kids.push_back(leaf(node::distinct, "distinct"));
    else accept_kw("all");
    std::vector<SqlAst> items;
    while (true) {
      items.push_back(parse_select_item());
      if (at_punct(",")) { advance(); continue; }
      break;
    }
    kids.push_back(inner(node::select_list, std::move(items)));
    if (accept_kw("from")) kids.push_back(inner(node::from, {parse_from()}));
    if (accept_kw("where")) kids.push_back(inner(node::where, {parse_expr()}));
    if (at_kw("group")) {
      advance();
      expect_kw("by");
      std::vector<SqlAst> exprs;
      while (true) {
        exprs.push_back(parse_expr());
        if (at_punct(",")) { advance(); continue; }
        break;
      }
      kids.push_back(inner(node::group_by, std::move(exprs)));
      if (accept_kw("having")) kids.push_back(inner(node::having, {parse_expr()}));
    }
    return inner(node::select_core, std::move(kids));
  }

  SqlAst parse_select_item() {
    if (at_op("*")) {
      advance();
      return inner(node::select_item, {leaf(node::star, "*")});
    }
    // qualified star: ident.*
    if ((peek().type == TokType::Ident || peek().type == TokType::QuotedIdent) &&
        at_punct(".", 1) && peek(2).type == TokType::Op && peek(2).text == "*") {
      std::string q = parse_ident_part();
      advance();  // '.'
      advance();  // '*'
      return inner(node::select_item, {leaf(node::star, q + ".*")});
    }
    SqlAst e = parse_expr();
    std::vector<SqlAst> kids;
    kids.push_back(std::move(e));
    if (accept_kw("as")) {
      kids.push_back(leaf(node::alias, parse_ident_part()));
    } else if (peek().type == TokType::Ident || peek().type == TokType::QuotedIdent) {
      kids.push_back(leaf(node::alias, parse_ident_part()));
    }
    return inner(node::select_item, std::move(kids));
  }

  SqlAst parse_from() {
    SqlAst left = parse_table_or_subquery();
    while (true) {
      std::string jkind;
      if (at_punct(",")) {
        advance();
        jkind = "cross";
      } else if (at_kw("cross")) {
        advance();
        expect_kw("join");
        jkind = "cross";
      } else if (at_kw("inner")) {
        advance();
        expect_kw("join");
        jkind = "inner";
      } else if (at_kw("left")) {
        advance();
        accept_kw("outer");
        expect_kw("join");
        jkind = "left";
      } else if (at_kw("join")) {
        advance();
        jkind = "inner";
      } else if (at_kw("right") || at_kw("full") || at_kw("natural")) {
        unsupported("only INNER, LEFT and CROSS joins are supported");
      } else {
        break;
      }
      SqlAst right = parse_table_or_subquery();
      std::vector<SqlAst> kids;
      kids.push_back(std::move(left));
      kids.push_back(leaf(node::join_kind, jkind));
      kids.push_back(std::move(right));
      if (accept_kw("on")) {
        kids.push_back(inner(node::on, {parse_expr()}));
      } else if (at_kw("using")) {
        unsupported("JOIN ... USING is not supported");
      }
      left = inner(node::join, std::move(kids));
    }
    return left;
  }

  SqlAst parse_table_or_subquery() {
    if (at_punct("(")) {
      advance();
      if (at_kw("with")) unsupported("nested WITH inside a subquery");
      SqlAst q = parse_query();
      expect_punct(")");
      std::vector<SqlAst> kids;
      kids.push_back(std::move(q));
      if (accept_kw("as")) kids.push_back(leaf(node::alias, parse_ident_part()));
      else if (peek().type == TokType::Ident || peek().type == TokType::QuotedIdent)
        kids.push_back(leaf(node::alias, parse_ident_part()));
      return inner(node::subquery, std::move(kids));
    }
    std::string name = parse_ident_part();
    if (at_punct(".")) {  // schema-qualified table
      advance();
      name += "." + parse_ident_part();
    }
    std::vector<SqlAst> kids;
    kids.push_back(leaf(node::identifier, name));
    if (accept_kw("as")) {
      kids.push_back(leaf(node::alias, parse_ident_part()));
    } else if (peek().type == TokType::Ident || peek().type == TokType::QuotedIdent) {
      kids.push_back(leaf(node::alias, parse_ident_part()));
    }
    return inner(node::table, std::move(kids));
  }

  // --- expressions, SQLite precedence ---

  SqlAst parse_expr() { return parse_or(); }

  SqlAst bin(SqlAst l, const std::string& op, SqlAst r) {
    return inner(node::expr_binary,
                 {std::move(l), leaf(node::op, op), std::move(r)});
  }

  SqlAst parse_or() {
    SqlAst e = parse_and();
    while (at_kw("or")) {
      advance();
      e = bin(std::move(e), "or", parse_and());
    }
    return e;
  }

  SqlAst parse_and() {
    SqlAst e = parse_not();
    while (at_kw("and")) {
      advance();
      e = bin(std::move(e), "and", parse_not());
    }
    return e;
  }

  SqlAst parse_not() {
    if (at_kw("not") && !at_kw("exists", 1)) {
      advance();
      return inner(node::expr_unary, {leaf(node::op, "not"), parse_not()});
    }
    return parse_predicate();
  }

  SqlAst parse_predicate() {
    SqlAst e = parse_comparison();
    while (true) {
      if (at_op("=") || at_op("==") || at_op("!=") || at_op("<>")) {
        std::string op = peek().text == "=" || peek().text == "==" ? "=" : "!=";
        advance();
        e = bin(std::move(e), op, parse_comparison());
        continue;
      }
      if (at_kw("is")) {
        advance();
        bool neg = accept_kw("not");
        expect_kw("null");
        e = inner(node::expr_is,
                  {std::move(e), leaf(node::op, neg ? "is not null" : "is null")});
        continue;
      }
      bool neg = false;
      size_t mark = i_;
      if (at_kw("not")) {
        if (at_kw("in", 1) || at_kw("like", 1) || at_kw("glob", 1) || at_kw("between", 1)) {
          neg = true;
          advance();
        }
      }
      if (at_kw("in")) {
        advance();
        expect_punct("(");
        SqlAst rhs;
        if (at_kw("select")) {
          rhs = inner(node::subquery_expr, {parse_query()});
        } else if (at_kw("with")) {
          unsupported("nested WITH inside a subquery");
        } else {
          std::vector<SqlAst> vals;
          while (true) {
            vals.push_back(parse_expr());
            if (at_punct(",")) { advance(); continue; }
            break;
          }
          rhs = inner(node::in_list, std::move(vals));
        }
        expect_punct(")");
        e = inner(node::expr_in, {std::move(e), leaf(node::op, neg ? "not in" : "in"),
                                  std::move(rhs)});
        continue;
      }
      if (at_kw("like") || at_kw("glob")) {
        std::string word = peek().text;
        advance();
        std::string op = neg ? "not " + word : word;
        e = bin(std::move(e), op, parse_comparison());
        continue;
      }
      if (at_kw("between")) {
        advance();
        SqlAst lo = parse_comparison();
        expect_kw("and");
        SqlAst hi = parse_comparison();
        e = inner(node::expr_between,
                  {std::move(e), leaf(node::op, neg ? "not between" : "between"),
                   std::move(lo), std::move(hi)});
        continue;
      }
      i_ = mark;
      break;
    }
    return e;
  }

  SqlAst parse_comparison() {
    SqlAst e = parse_additive();
    while (at_op("<") || at_op("<=") || at_op(">") || at_op(">=")) {
      std::string op = peek().text;
      advance();
      e = bin(std::move(e), op, parse_additive());
    }
    return e;
  }

  SqlAst parse_additive() {
    SqlAst e = parse_term();
    while (at_op("+") || at_op("-")) {
      std::string op = peek().text;
      advance();
      e = bin(std::move(e), op, parse_term());
    }
    return e;
  }

  SqlAst parse_term() {
    SqlAst e = parse_concat();
    while (at_op("*") || at_op("/") || at_op("%")) {
      std::string op = peek().text;
      advance();
      e = bin(std::move(e), op, parse_concat());
    }
    return e;
  }

  SqlAst parse_concat() {
    SqlAst e = parse_unary();
    while (at_op("||")) {
      advance();
      e = bin(std::move(e), "||", parse_unary());
    }
    return e;
  }

  SqlAst parse_unary() {
    if (at_op("-") || at_op("+")) {
      std::string op = peek().text;
      advance();
      return inner(node::expr_unary, {leaf(node::op, op), parse_unary()});
    }
    return parse_atom();
  }

  SqlAst parse_atom() {
    const Token& t = peek();
    switch (t.type) {
      case TokType::Number: {
        std::string canon = canonical_number(t.text);
        advance();
        return leaf(node::literal, canon);
      }
      case TokType::String: {
        std::string canon = "'" + escape_single_quotes(t.text) + "'";
        advance();
        return leaf(node::literal, canon);
      }
      case TokType::Keyword: {
        if (t.text == "null" || t.text == "true" || t.text == "false") {
          std::string v = t.text;
          advance();
          return leaf(node::literal, v);
        }
        if (t.text == "case") return parse_case();
        if (t.text == "cast") return parse_cast();
        if (t.text == "exists") {
          advance();
          expect_punct("(");
          if (at_kw("with")) unsupported("nested WITH inside a subquery");
          SqlAst q = parse_query();
          expect_punct(")");
          return inner(node::exists_expr, {std::move(q)});
        }
        if (t.text == "not" && at_kw("exists", 1)) {
          advance();
          SqlAst ex = parse_atom();
          return inner(node::expr_unary, {leaf(node::op, "not"), std::move(ex)});
        }
        // LEFT(...) etc.: keywords usable as function names
        if (at_punct("(", 1)) return parse_function(t.text);
        fail("unexpected keyword in expression");
      }
      case TokType::Ident:
      case TokType::QuotedIdent: {
        if (at_punct("(", 1)) {
          std::string fname = t.type == TokType::Ident ? t.text : util::lower(t.text);
          return parse_function(fname);
        }
        return parse_column_ref();
      }
      case TokType::Punct: {
        if (t.text == "(") {
          advance();
          if (at_kw("select")) {
            SqlAst q = parse_query();
            expect_punct(")");
            return inner(node::subquery_expr, {std::move(q)});
          }
          if (at_kw("with")) unsupported("nested WITH inside a subquery");
          SqlAst e = parse_expr();
          expect_punct(")");
          return e;  // grouping only; parentheses add no node
        }
        fail("unexpected token in expression");
      }
      default:
        fail("unexpected token in expression");
    }
  }

  SqlAst parse_column_ref() {
    std::string name = parse_ident_part();
    while (at_punct(".")) {
      advance();
      name += "." + parse_ident_part();
    }
    return leaf(node::identifier, name);
  }

  SqlAst parse_function(const std::string& name) {
    advance();  // name
    expect_punct("(");
    std::vector<SqlAst> kids;
    kids.push_back(leaf(node::fn_name, name));
    if (at_op("*")) {
      advance();
      kids.push_back(leaf(node::star, "*"));
    } else if (!at_punct(")")) {
      if (accept_kw("distinct")) kids.push_back(leaf(node::distinct, "distinct"));
      while (true) {
        kids.push_back(parse_expr());
        if (at_punct(",")) { advance(); continue; }
        break;
      }
    }
    expect_punct(")");
    if (at_kw("over")) unsupported("window functions are not supported");
    return inner(node::function_call, std::move(kids));
  }

  SqlAst parse_case() {
    expect_kw("case");
    std::vector<SqlAst> kids;
    if (!at_kw("when")) kids.push_back(inner(node::case_operand, {parse_expr()}));
    while (accept_kw("when")) {
      SqlAst cond = parse_expr();
      expect_kw("then");
      SqlAst result = parse_expr();
      kids.push_back(inner(node::when, {std::move(cond), std::move(result)}));
    }
    if (kids.empty() || kids.back().kind != node::when)
      fail("CASE requires at least one WHEN branch");
    if (accept_kw("else")) kids.push_back(inner(node::else_clause, {parse_expr()}));
    expect_kw("end");
    return inner(node::case_expr, std::move(kids));
  }

  SqlAst parse_cast() {
    expect_kw("cast");
    expect_punct("(");
    SqlAst e = parse_expr();
    expect_kw("as");
    std::string type;
    while (peek().type == TokType::Ident || peek().type == TokType::Keyword) {
      if (!type.empty()) type += " ";
      type += peek().text;
      advance();
    }
    if (type.empty()) fail("expected type name in CAST");
    if (at_punct("(")) {
      advance();
      type += "(";
      bool first = true;
      while (peek().type == TokType::Number) {
        if (!first) type += ",";
        type += canonical_number(peek().text);
        advance();
        first = false;
        if (at_punct(",")) { advance(); continue; }
        break;
      }
      expect_punct(")");
      type += ")";
    }
    expect_punct(")");
    return inner(node::cast_expr, {std::move(e), leaf(node::type_name, type)});
  }
};

}  // namespace

CocteChain parse_cocte(const std::string& sql_text) {
  Parser p(sql_text);
  return p.parse_statement();
}

}  // namespace cocte::sql
