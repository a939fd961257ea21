#include "dsl_lexer.hpp"

#include <cctype>

namespace methlib::dsl {

namespace {

bool word_start(unsigned char c) { return std::isalpha(c) || c == '_'; }
bool word_char(unsigned char c) { return std::isalnum(c) || c == '_'; }

}  // namespace

Position position_at(std::string_view src, std::size_t offset) {
  Position p;
  p.offset = offset;
  p.line = 1;
  p.column = 1;
  for (std::size_t i = 0; i < offset && i < src.size(); ++i) {
    if (src[i] == '\n') {
      ++p.line;
      p.column = 1;
    } else {
      ++p.column;
    }
  }
  return p;
}

void fail(ErrorCode code, std::string_view src, std::size_t offset, const std::string& what) {
  auto pos = position_at(src, offset);
  throw Error(code, what + " at offset " + std::to_string(offset), pos);
}

std::string_view describe(Tok t) {
  switch (t) {
    case Tok::Word: return "word";
    case Tok::String: return "string";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Equals: return "'='";
    case Tok::Tilde: return "'~'";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    auto c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (word_start(c)) {
      while (i < src.size() && word_char(static_cast<unsigned char>(src[i]))) ++i;
      out.push_back({Tok::Word, std::string(src.substr(start, i - start)), start});
      continue;
    }
    if (c == '"') {
      std::string value;
      ++i;
      bool closed = false;
      while (i < src.size()) {
        char ch = src[i++];
        if (ch == '"') {
          closed = true;
          break;
        }
        if (ch == '\\') {
          if (i >= src.size()) break;
          char esc = src[i++];
          if (esc != '"' && esc != '\\') fail(ErrorCode::SyntaxError, src, i - 2, "unknown escape");
          value.push_back(esc);
          continue;
        }
        value.push_back(ch);
      }
      if (!closed) fail(ErrorCode::SyntaxError, src, start, "unterminated string");
      out.push_back({Tok::String, std::move(value), start});
      continue;
    }
    Tok kind;
    switch (c) {
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case '{': kind = Tok::LBrace; break;
      case '}': kind = Tok::RBrace; break;
      case ',': kind = Tok::Comma; break;
      case '=': kind = Tok::Equals; break;
      case '~': kind = Tok::Tilde; break;
      default: fail(ErrorCode::SyntaxError, src, start, std::string("unexpected character '") + src[i] + "'");
    }
    out.push_back({kind, std::string(1, src[i]), start});
    ++i;
  }
  out.push_back({Tok::End, "", src.size()});
  return out;
}

Token TokenStream::expect(Tok kind, std::string_view what) {
  if (peek().kind != kind) {
    fail(ErrorCode::SyntaxError, src_, peek().offset,
         "expected " + std::string(what) + ", found " + std::string(describe(peek().kind)) +
             (peek().kind == Tok::Word ? " '" + peek().text + "'" : ""));
  }
  return tokens_[pos_++];
}

void TokenStream::expect_word(std::string_view w) {
  if (!accept_word(w)) {
    fail(ErrorCode::SyntaxError, src_, peek().offset, "expected '" + std::string(w) + "'");
  }
}

void TokenStream::expect_end() {
  if (peek().kind != Tok::End) {
    fail(ErrorCode::SyntaxError, src_, peek().offset, "unexpected trailing input");
  }
}

}  // namespace methlib::dsl
