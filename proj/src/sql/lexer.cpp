#include "cocte/sql/lexer.hpp"

#include <array>
#include <cctype>
#include <unordered_set>

#include "cocte/errors.hpp"
#include "cocte/util/util.hpp"

namespace cocte::sql {

namespace {

const std::unordered_set<std::string>& keyword_set() {
  static const std::unordered_set<std::string> kw = {
      "with",   "as",     "select", "distinct", "all",    "from",  "where",
      "group",  "by",     "having", "order",    "limit",  "offset", "union",
      "intersect", "except", "join", "inner",   "left",   "right", "full",
      "outer",  "cross",  "natural", "on",      "using",  "and",   "or",
      "not",    "in",     "is",     "null",     "like",   "glob",  "between",
      "case",   "when",   "then",   "else",     "end",    "cast",  "asc",
      "desc",   "exists", "recursive", "true",  "false",  "over"};
  return kw;
}

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

bool is_keyword(const std::string& lower_word) {
  return keyword_set().count(lower_word) > 0;
}

std::vector<Token> lex(const std::string& sql) {
  std::vector<Token> out;
  size_t i = 0;
  const size_t n = sql.size();
  while (i < n) {
    char c = sql[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    // comments
    if (c == '-' && i + 1 < n && sql[i + 1] == '-') {
      while (i < n && sql[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && sql[i + 1] == '*') {
      size_t start = i;
      i += 2;
      while (i + 1 < n && !(sql[i] == '*' && sql[i + 1] == '/')) ++i;
      if (i + 1 >= n) throw SyntaxError(start, "unterminated block comment");
      i += 2;
      continue;
    }
    size_t start = i;
    if (ident_start(c)) {
      while (i < n && ident_char(sql[i])) ++i;
      std::string word = util::lower(sql.substr(start, i - start));
      if (is_keyword(word)) {
        out.push_back({TokType::Keyword, word, start});
      } else {
        out.push_back({TokType::Ident, word, start});
      }
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(sql[i + 1])))) {
      // hex literal
      if (c == '0' && i + 1 < n && (sql[i + 1] == 'x' || sql[i + 1] == 'X')) {
        i += 2;
        while (i < n && std::isxdigit(static_cast<unsigned char>(sql[i]))) ++i;
      } else {
        while (i < n && std::isdigit(static_cast<unsigned char>(sql[i]))) ++i;
        if (i < n && sql[i] == '.') {
          ++i;
          while (i < n && std::isdigit(static_cast<unsigned char>(sql[i]))) ++i;
        }
        if (i < n && (sql[i] == 'e' || sql[i] == 'E')) {
          size_t save = i;
          ++i;
          if (i < n && (sql[i] == '+' || sql[i] == '-')) ++i;
          if (i < n && std::isdigit(static_cast<unsigned char>(sql[i]))) {
            while (i < n && std::isdigit(static_cast<unsigned char>(sql[i]))) ++i;
          } else {
            i = save;  // trailing 'e' belongs to the next token
          }
        }
      }
      out.push_back({TokType::Number, sql.substr(start, i - start), start});
      continue;
    }
    if (c == '\'') {
      ++i;
      std::string content;
      bool closed = false;
      while (i < n) {
        if (sql[i] == '\'') {
          if (i + 1 < n && sql[i + 1] == '\'') {
            content.push_back('\'');
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        content.push_back(sql[i]);
        ++i;
      }
      if (!closed) throw SyntaxError(start, "unterminated string literal");
      out.push_back({TokType::String, content, start});
      continue;
    }
    if (c == '"' || c == '`' || c == '[') {
      char close = c == '[' ? ']' : c;
      ++i;
      std::string content;
      bool closed = false;
      while (i < n) {
        if (sql[i] == close) {
          if (close != ']' && i + 1 < n && sql[i + 1] == close) {
            content.push_back(close);
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        content.push_back(sql[i]);
        ++i;
      }
      if (!closed) throw SyntaxError(start, "unterminated quoted identifier");
      out.push_back({TokType::QuotedIdent, content, start});
      continue;
    }
    // multi-char operators first
    auto two = i + 1 < n ? sql.substr(i, 2) : std::string();
    static const std::array<const char*, 8> two_ops = {"<=", ">=", "<>", "!=",
                                                       "==", "||", "<<", ">>"};
    bool matched = false;
    for (const char* t : two_ops) {
      if (two == t) {
        out.push_back({TokType::Op, two, start});
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    switch (c) {
      case '+': case '-': case '*': case '/': case '%':
      case '<': case '>': case '=': case '&': case '|': case '~':
        out.push_back({TokType::Op, std::string(1, c), start});
        ++i;
        continue;
      case '(': case ')': case ',': case '.': case ';':
        out.push_back({TokType::Punct, std::string(1, c), start});
        ++i;
        continue;
      default:
        throw SyntaxError(start, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({TokType::End, "", n});
  return out;
}

std::vector<std::string> token_labels(const std::string& sql) {
  std::vector<std::string> labels;
  for (const Token& t : lex(sql)) {
    if (t.type == TokType::End) break;
    labels.push_back("tok:" + t.text);
  }
  return labels;
}

}  // namespace cocte::sql
