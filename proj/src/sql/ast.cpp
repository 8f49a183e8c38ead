#include "cocte/sql/ast.hpp"

#include <cctype>
#include <stdexcept>

namespace cocte::sql {

namespace {

void walk_preorder(const SqlAst& n, std::vector<std::string>& out) {
  if (n.is_leaf()) {
    out.push_back(n.kind + ":" + n.text);
  } else {
    out.push_back(n.kind);
  }
  for (const SqlAst& c : n.children) walk_preorder(c, out);
}

std::string upper(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool compound_expr(const SqlAst& n) {
  return n.kind == node::expr_binary || n.kind == node::expr_unary ||
         n.kind == node::expr_in || n.kind == node::expr_between ||
         n.kind == node::expr_is;
}

std::string render_expr(const SqlAst& n);

std::string paren_if_compound(const SqlAst& n) {
  std::string s = render_expr(n);
  if (compound_expr(n)) return "(" + s + ")";
  return s;
}

std::string render_expr(const SqlAst& n) {
  if (n.kind == node::identifier || n.kind == node::literal || n.kind == node::star)
    return n.text;
  if (n.kind == node::expr_binary) {
    const std::string& op = n.children[1].text;
    bool word_op = std::isalpha(static_cast<unsigned char>(op[0]));
    std::string mid = word_op ? upper(op) : op;
    return paren_if_compound(n.children[0]) + " " + mid + " " +
           paren_if_compound(n.children[2]);
  }
  if (n.kind == node::expr_unary) {
    const std::string& op = n.children[0].text;
    if (op == "not") return "NOT " + paren_if_compound(n.children[1]);
    return op + paren_if_compound(n.children[1]);
  }
  if (n.kind == node::expr_is)
    return paren_if_compound(n.children[0]) + " " + upper(n.children[1].text);
  if (n.kind == node::expr_in) {
    std::string out = paren_if_compound(n.children[0]) + " " + upper(n.children[1].text) + " (";
    const SqlAst& rhs = n.children[2];
    if (rhs.kind == node::in_list) {
      for (size_t i = 0; i < rhs.children.size(); ++i) {
        if (i) out += ", ";
        out += render_expr(rhs.children[i]);
      }
    } else {
      out += render(rhs.children[0]);  // subquery-expr -> query
    }
    return out + ")";
  }
  if (n.kind == node::expr_between) {
    return paren_if_compound(n.children[0]) + " " + upper(n.children[1].text) + " " +
           paren_if_compound(n.children[2]) + " AND " + paren_if_compound(n.children[3]);
  }
  if (n.kind == node::function_call) {
    std::string out = n.children[0].text + "(";
    bool first = true;
    for (size_t i = 1; i < n.children.size(); ++i) {
      const SqlAst& c = n.children[i];
      if (c.kind == node::distinct) {
        out += "DISTINCT ";
        continue;
      }
      if (!first) out += ", ";
      out += c.kind == node::star ? c.text : render_expr(c);
      first = false;
    }
    return out + ")";
  }
  if (n.kind == node::case_expr) {
    std::string out = "CASE";
    for (const SqlAst& c : n.children) {
      if (c.kind == node::case_operand) {
        out += " " + paren_if_compound(c.children[0]);
      } else if (c.kind == node::when) {
        out += " WHEN " + render_expr(c.children[0]) + " THEN " + render_expr(c.children[1]);
      } else {  // else
        out += " ELSE " + render_expr(c.children[0]);
      }
    }
    return out + " END";
  }
  if (n.kind == node::cast_expr)
    return "CAST(" + render_expr(n.children[0]) + " AS " + upper(n.children[1].text) + ")";
  if (n.kind == node::subquery_expr) return "(" + render(n.children[0]) + ")";
  if (n.kind == node::exists_expr) return "EXISTS (" + render(n.children[0]) + ")";
  throw std::logic_error("render_expr: unexpected node kind " + n.kind);
}

std::string render_relation(const SqlAst& n);

std::string render_join(const SqlAst& n) {
  const std::string& jk = n.children[1].text;
  std::string kw = jk == "left" ? "LEFT JOIN" : jk == "cross" ? "CROSS JOIN" : "JOIN";
  std::string out = render_relation(n.children[0]) + " " + kw + " " +
                    render_relation(n.children[2]);
  if (n.children.size() > 3 && n.children[3].kind == node::on)
    out += " ON " + render_expr(n.children[3].children[0]);
  return out;
}

std::string render_relation(const SqlAst& n) {
  if (n.kind == node::table) {
    std::string out = n.children[0].text;
    if (n.children.size() > 1) out += " AS " + n.children[1].text;
    return out;
  }
  if (n.kind == node::subquery) {
    std::string out = "(" + render(n.children[0]) + ")";
    if (n.children.size() > 1 && n.children[1].kind == node::alias)
      out += " AS " + n.children[1].text;
    return out;
  }
  if (n.kind == node::join) return render_join(n);
  throw std::logic_error("render_relation: unexpected node kind " + n.kind);
}

std::string render_select_core(const SqlAst& n) {
  std::string out = "SELECT ";
  size_t i = 0;
  if (i < n.children.size() && n.children[i].kind == node::distinct) {
    out += "DISTINCT ";
    ++i;
  }
  const SqlAst& list = n.children[i++];
  for (size_t j = 0; j < list.children.size(); ++j) {
    if (j) out += ", ";
    const SqlAst& item = list.children[j];
    const SqlAst& e = item.children[0];
    out += e.kind == node::star ? e.text : render_expr(e);
    if (item.children.size() > 1) out += " AS " + item.children[1].text;
  }
  for (; i < n.children.size(); ++i) {
    const SqlAst& c = n.children[i];
    if (c.kind == node::from) {
      out += " FROM " + render_relation(c.children[0]);
    } else if (c.kind == node::where) {
      out += " WHERE " + render_expr(c.children[0]);
    } else if (c.kind == node::group_by) {
      out += " GROUP BY ";
      for (size_t j = 0; j < c.children.size(); ++j) {
        if (j) out += ", ";
        out += render_expr(c.children[j]);
      }
    } else if (c.kind == node::having) {
      out += " HAVING " + render_expr(c.children[0]);
    }
  }
  return out;
}

std::string render_body(const SqlAst& n) {
  if (n.kind == node::select_core) return render_select_core(n);
  if (n.kind == node::subquery) return "(" + render(n.children[0]) + ")";
  if (n.kind == node::set_op) {
    std::string op = upper(n.children[1].text);
    if (op == "UNION-ALL") op = "UNION ALL";
    return render_body(n.children[0]) + " " + op + " " + render_body(n.children[2]);
  }
  throw std::logic_error("render_body: unexpected node kind " + n.kind);
}

std::string render_query(const SqlAst& n) {
  std::string out = render_body(n.children[0]);
  if (n.children.size() > 1) {
    const SqlAst& ol = n.children[1];
    for (const SqlAst& c : ol.children) {
      if (c.kind == node::order_by) {
        out += " ORDER BY ";
        for (size_t j = 0; j < c.children.size(); ++j) {
          if (j) out += ", ";
          const SqlAst& ord = c.children[j];
          out += render_expr(ord.children[0]);
          if (ord.children.size() > 1) out += " DESC";
        }
      } else if (c.kind == node::limit) {
        out += " LIMIT " + render_expr(c.children[0]);
        if (c.children.size() > 1)
          out += " OFFSET " + render_expr(c.children[1].children[0]);
      }
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> preorder_labels(const SqlAst& ast) {
  std::vector<std::string> out;
  walk_preorder(ast, out);
  return out;
}

size_t node_count(const SqlAst& ast) {
  size_t n = 1;
  for (const SqlAst& c : ast.children) n += node_count(c);
  return n;
}

std::string render(const SqlAst& ast) {
  if (ast.kind == node::query) return render_query(ast);
  if (ast.kind == node::statement) {
    std::string out;
    size_t i = 0;
    if (!ast.children.empty() && ast.children[0].kind == node::cte) {
      out += "WITH ";
      bool first = true;
      for (; i < ast.children.size() && ast.children[i].kind == node::cte; ++i) {
        if (!first) out += ", ";
        const SqlAst& c = ast.children[i];
        out += c.children[0].text + " AS (" + render_query(c.children[1]) + ")";
        first = false;
      }
      out += " ";
    }
    return out + render_query(ast.children[i]);
  }
  if (ast.kind == node::cte)
    return ast.children[0].text + " AS (" + render_query(ast.children[1]) + ")";
  return render_expr(ast);
}

}  // namespace cocte::sql
