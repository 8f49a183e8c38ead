#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace cocte::sql {

enum class TokType { Keyword, Ident, QuotedIdent, Number, String, Op, Punct, End };

struct Token {
  TokType type = TokType::End;
  std::string text;  // keywords lowercased; quoted idents hold the unquoted
                     // content; numbers/strings hold the raw source slice
  size_t pos = 0;    // byte offset into the input
};

bool is_keyword(const std::string& lower_word);

// Tokenizes one SQL statement; whitespace and comments are dropped and a
// trailing End token is appended. Throws SyntaxError on unterminated
// strings/quotes or characters outside the supported set.
std::vector<Token> lex(const std::string& sql);

// Flat token label sequence ("tok:<text>") for inputs outside the parser's
// grammar subset; keeps distance-based filtering usable on them.
std::vector<std::string> token_labels(const std::string& sql);

}  // namespace cocte::sql
