#pragma once

// Tokenizer shared by the condition and query languages.

#include <string>
#include <string_view>
#include <vector>

#include "methlib/error.hpp"

namespace methlib::dsl {

enum class Tok { Word, String, LParen, RParen, LBrace, RBrace, Comma, Equals, Tilde, End };

struct Token {
  Tok kind;
  std::string text;  // word text or unescaped string contents
  std::size_t offset;
};

std::vector<Token> tokenize(std::string_view src);

Position position_at(std::string_view src, std::size_t offset);

[[noreturn]] void fail(ErrorCode code, std::string_view src, std::size_t offset, const std::string& what);

std::string_view describe(Tok t);

/// Cursor over a token vector with the usual expect/accept helpers.
class TokenStream {
 public:
  TokenStream(std::string_view src) : src_(src), tokens_(tokenize(src)) {}

  const Token& peek() const { return tokens_[pos_]; }
  bool at_word(std::string_view w) const { return peek().kind == Tok::Word && peek().text == w; }
  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    ++pos_;
    return true;
  }
  bool accept_word(std::string_view w) {
    if (!at_word(w)) return false;
    ++pos_;
    return true;
  }
  Token expect(Tok kind, std::string_view what);
  void expect_word(std::string_view w);
  void expect_end();
  std::string_view source() const { return src_; }

 private:
  std::string_view src_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace methlib::dsl
