#include "mergeplan/ltlf/parser.hpp"

#include <cctype>
#include <optional>
#include <vector>

namespace mergeplan::ltlf {

ParseError::ParseError(std::size_t position, const std::string& what)
    : std::runtime_error("parse error at " + std::to_string(position) + ": " + what), position_(position) {}

namespace {

enum class Tok { kIdent, kTrue, kFalse, kNot, kAnd, kOr, kImplies, kNext, kWeakNext, kGlobally, kFinally,
                 kUntil, kRelease, kLParen, kRParen, kEof };

struct Token {
  Tok type;
  std::string text;
  std::size_t pos;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    auto two = [&](char a, char b) { return c == a && i + 1 < s.size() && s[i + 1] == b; };
    if (c == '(') { out.push_back({Tok::kLParen, "(", start}); ++i; continue; }
    if (c == ')') { out.push_back({Tok::kRParen, ")", start}); ++i; continue; }
    if (c == '!') { out.push_back({Tok::kNot, "!", start}); ++i; continue; }
    if (two('-', '>')) { out.push_back({Tok::kImplies, "->", start}); i += 2; continue; }
    if (two('&', '&')) { out.push_back({Tok::kAnd, "&&", start}); i += 2; continue; }
    if (two('|', '|')) { out.push_back({Tok::kOr, "||", start}); i += 2; continue; }
    if (c == '&') { out.push_back({Tok::kAnd, "&", start}); ++i; continue; }
    if (c == '|') { out.push_back({Tok::kOr, "|", start}); ++i; continue; }
    if (ident_start(c)) {
      while (i < s.size() && ident_char(s[i])) ++i;
      std::string word(s.substr(start, i - start));
      if (i < s.size() && s[i] == '#') {
        const std::size_t slot_start = ++i;
        while (i < s.size() && ident_char(s[i])) ++i;
        if (i == slot_start) throw ParseError(slot_start, "empty agent slot after '#'");
        word += "#" + std::string(s.substr(slot_start, i - slot_start));
        out.push_back({Tok::kIdent, std::move(word), start});
        continue;
      }
      Tok t = Tok::kIdent;
      if (word == "true") t = Tok::kTrue;
      else if (word == "false") t = Tok::kFalse;
      else if (word == "X") t = Tok::kNext;
      else if (word == "N") t = Tok::kWeakNext;
      else if (word == "G") t = Tok::kGlobally;
      else if (word == "F") t = Tok::kFinally;
      else if (word == "U") t = Tok::kUntil;
      else if (word == "R") t = Tok::kRelease;
      out.push_back({t, std::move(word), start});
      continue;
    }
    throw ParseError(start, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::kEof, "", s.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  Formula parse() {
    Formula f = implication();
    if (peek().type != Tok::kEof) throw ParseError(peek().pos, "unexpected '" + peek().text + "'");
    return f;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() { return tokens_[pos_++]; }
  bool accept(Tok t) {
    if (peek().type != t) return false;
    ++pos_;
    return true;
  }

  Formula implication() {
    Formula lhs = disjunction();
    if (accept(Tok::kImplies)) return Formula::implication(lhs, implication());
    return lhs;
  }

  Formula disjunction() {
    std::vector<Formula> parts{conjunction()};
    while (accept(Tok::kOr)) parts.push_back(conjunction());
    return parts.size() == 1 ? parts.front() : Formula::disjunction(std::move(parts));
  }

  Formula conjunction() {
    std::vector<Formula> parts{binary()};
    while (accept(Tok::kAnd)) parts.push_back(binary());
    return parts.size() == 1 ? parts.front() : Formula::conjunction(std::move(parts));
  }

  Formula binary() {
    Formula lhs = unary();
    if (accept(Tok::kUntil)) return Formula::until(lhs, binary());
    if (accept(Tok::kRelease)) return Formula::release(lhs, binary());
    return lhs;
  }

  Formula unary() {
    switch (peek().type) {
      case Tok::kNot: take(); return Formula::negation(unary());
      case Tok::kNext: take(); return Formula::next(unary());
      case Tok::kWeakNext: take(); return Formula::weak_next(unary());
      case Tok::kGlobally: take(); return Formula::globally(unary());
      case Tok::kFinally: take(); return Formula::finally(unary());
      default: return primary();
    }
  }

  Formula primary() {
    const Token& t = take();
    switch (t.type) {
      case Tok::kTrue: return Formula::truth();
      case Tok::kFalse: return Formula::falsity();
      case Tok::kIdent: return Formula::atom(t.text);
      case Tok::kLParen: {
        Formula inner = implication();
        if (!accept(Tok::kRParen)) throw ParseError(peek().pos, "expected ')'");
        return inner;
      }
      case Tok::kEof: throw ParseError(t.pos, "unexpected end of formula");
      default: throw ParseError(t.pos, "unexpected '" + t.text + "'");
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse_syntax(std::string_view text) { return Parser(tokenize(text)).parse(); }

Formula parse_formula(std::string_view text) { return canonicalize(parse_syntax(text)); }

Formula parse_ltlf(std::string_view text) {
  Formula f = parse_formula(text);
  if (!obligation_kind(f)) {
    throw FragmentError("formula '" + std::string(text) +
                        "' is not an obligation property (expected G p or F p with p built from "
                        "propositions, boolean operators and X)");
  }
  return f;
}

}  // namespace mergeplan::ltlf
