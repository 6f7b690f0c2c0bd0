#include "maldist/sexpr.hpp"

#include <cctype>
#include <charconv>
#include <limits>

#include "maldist/errors.hpp"

namespace maldist {

SExpr SExpr::atom(std::string text) {
  SExpr e;
  e.is_atom_ = true;
  e.text_ = std::move(text);
  return e;
}

SExpr SExpr::list(std::vector<SExpr> items) {
  SExpr e;
  e.is_atom_ = false;
  e.items_ = std::move(items);
  return e;
}

const std::string& SExpr::text() const {
  if (!is_atom_) throw ParseError("expected an atom, got " + to_string());
  return text_;
}

const std::vector<SExpr>& SExpr::items() const {
  if (is_atom_) throw ParseError("expected a list, got '" + text_ + "'");
  return items_;
}

const SExpr& SExpr::operator[](std::size_t i) const {
  const auto& xs = items();
  if (i >= xs.size()) throw ParseError("missing element " + std::to_string(i) + " in " + to_string());
  return xs[i];
}

std::string SExpr::head() const {
  if (is_atom_) return text_;
  if (items_.empty() || !items_.front().is_atom()) return {};
  return items_.front().text_;
}

Natural SExpr::as_natural() const {
  const std::string& t = text();
  Natural v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) throw ParseError("not a natural number: '" + t + "'");
  return v;
}

std::int64_t SExpr::as_integer() const {
  const std::string& t = text();
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) throw ParseError("not an integer: '" + t + "'");
  return v;
}

Rational SExpr::as_rational() const { return parse_rational(text()); }

std::string SExpr::to_string() const {
  if (is_atom_) return text_;
  std::string out = "(";
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (i) out += ' ';
    out += items_[i].to_string();
  }
  out += ')';
  return out;
}

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  SExpr read() {
    skip();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input");
    char c = text_[pos_];
    if (c == ')') throw ParseError("unexpected ')' at offset " + std::to_string(pos_));
    if (c == '(') {
      ++pos_;
      std::vector<SExpr> items;
      for (;;) {
        skip();
        if (pos_ >= text_.size()) throw ParseError("unbalanced '(' in input");
        if (text_[pos_] == ')') {
          ++pos_;
          return SExpr::list(std::move(items));
        }
        items.push_back(read());
      }
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')' && text_[pos_] != ';') {
      ++pos_;
    }
    return SExpr::atom(std::string(text_.substr(start, pos_ - start)));
  }

  bool at_end() {
    skip();
    return pos_ >= text_.size();
  }

 private:
  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

SExpr parse_sexpr(std::string_view text) {
  Reader reader(text);
  SExpr e = reader.read();
  if (!reader.at_end()) throw ParseError("trailing input after expression: '" + std::string(text) + "'");
  return e;
}

}  // namespace maldist
