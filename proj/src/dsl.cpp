#include "slowmix/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

#include "slowmix/error.hpp"

namespace slowmix {

namespace {

constexpr std::string_view kEmptySetUtf8 = "\xE2\x88\x85";

using Terms = std::vector<std::pair<std::size_t, Count>>;  // (species index, coefficient)

struct RawReaction {
  Terms reactant;
  Terms product;
  double rate;
  std::size_t line;
};

class LineParser {
 public:
  LineParser(std::string_view text, std::size_t line, std::map<std::string, std::size_t, std::less<>>& species,
             std::vector<std::string>& names)
      : text_(text), line_(line), species_(species), names_(names) {}

  void parse(std::vector<RawReaction>& out) {
    Terms lhs = parse_complex();
    skip_ws();
    bool reversible = false;
    if (consume("<->")) {
      reversible = true;
    } else if (!consume("->")) {
      fail("expected '->' or '<->'");
    }
    Terms rhs = parse_complex();
    skip_ws();
    if (!consume("@")) fail("expected '@' before rate constant");
    const double forward = parse_rate();
    skip_ws();
    double backward = 0.0;
    if (consume(",")) {
      if (!reversible) fail("a second rate constant is only allowed with '<->'");
      backward = parse_rate();
      skip_ws();
    } else if (reversible) {
      fail("'<->' requires two rate constants: forward, backward");
    }
    if (pos_ != text_.size()) fail("unexpected trailing input");

    if (lhs == rhs) throw ParseError("reactant equals product", line_, 1);
    out.push_back({lhs, rhs, forward, line_});
    if (reversible) out.push_back({rhs, lhs, backward, line_});
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, line_, column()); }

  // 1-based column in code points.
  std::size_t column() const {
    std::size_t col = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if ((static_cast<unsigned char>(text_[i]) & 0xC0) != 0x80) ++col;
    }
    return col;
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void skip_ws() {
    while (!at_end() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
  }

  bool consume(std::string_view token) {
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  bool complex_ends_here() {
    skip_ws();
    return at_end() || peek() == '@' || text_.substr(pos_, 2) == "->" || text_.substr(pos_, 3) == "<->";
  }

  Terms parse_complex() {
    skip_ws();
    const std::size_t start = pos_;
    if (consume(kEmptySetUtf8)) {
      if (!complex_ends_here()) fail("unexpected input after empty complex");
      return {};
    }
    if (consume("0")) {
      if (complex_ends_here()) return {};
      if (!std::isalpha(static_cast<unsigned char>(peek()))) fail("expected '->' or '<->'");
      pos_ = start;
    }

    Terms terms;
    while (true) {
      skip_ws();
      Count coefficient = 1;
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        const std::size_t digits_at = pos_;
        const char* first = text_.data() + pos_;
        const char* last = text_.data() + text_.size();
        auto [ptr, ec] = std::from_chars(first, last, coefficient);
        if (ec != std::errc{}) fail("stoichiometric coefficient out of range");
        pos_ += static_cast<std::size_t>(ptr - first);
        if (coefficient <= 0) {
          pos_ = digits_at;
          fail("stoichiometric coefficient must be positive");
        }
        skip_ws();
      }
      if (!std::isalpha(static_cast<unsigned char>(peek()))) fail("expected species name");
      const std::size_t name_at = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
      const std::string name(text_.substr(name_at, pos_ - name_at));

      auto it = species_.find(name);
      std::size_t index;
      if (it == species_.end()) {
        index = names_.size();
        species_.emplace(name, index);
        names_.push_back(name);
      } else {
        index = it->second;
      }
      for (const auto& [existing, c] : terms) {
        if (existing == index) {
          pos_ = name_at;
          fail("duplicate species '" + name + "' in complex");
        }
      }
      terms.emplace_back(index, coefficient);

      skip_ws();
      if (!consume("+")) break;
    }
    std::sort(terms.begin(), terms.end());
    return terms;
  }

  double parse_rate() {
    skip_ws();
    const std::size_t start = pos_;
    while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.' || peek() == 'e' ||
                         peek() == 'E' || peek() == '+' || peek() == '-')) {
      // a '+' or '-' is only part of the number right after an exponent marker
      if ((peek() == '+' || peek() == '-') && !(pos_ > start && (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E'))) {
        break;
      }
      ++pos_;
    }
    if (pos_ == start) fail("expected rate constant");
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
      pos_ = start;
      fail("malformed rate constant");
    }
    if (!(value > 0.0) || !std::isfinite(value)) {
      pos_ = start;
      fail("rate constant must be positive");
    }
    return value;
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
  std::map<std::string, std::size_t, std::less<>>& species_;
  std::vector<std::string>& names_;
};

Complex to_complex(const Terms& terms, std::size_t d) {
  Complex c{std::vector<Count>(d, 0)};
  for (const auto& [i, k] : terms) c.coefficients[i] = k;
  return c;
}

bool is_reverse(const Reaction& a, const Reaction& b) { return a.reactant == b.product && a.product == b.reactant; }

}  // namespace

ReactionNetwork parse_network(std::string_view text) {
  std::map<std::string, std::size_t, std::less<>> species;
  std::vector<std::string> names;
  std::vector<RawReaction> raw;

  std::size_t line_no = 0;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(begin, end - begin);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      LineParser(line, line_no, species, names).parse(raw);
    }
    if (end == text.size()) break;
    begin = end + 1;
  }

  if (raw.empty()) throw ParseError("no reactions", line_no == 0 ? 1 : line_no, 1);

  std::vector<Species> sp;
  for (std::size_t i = 0; i < names.size(); ++i) sp.push_back({i, names[i]});
  if (sp.empty()) throw ParseError("network mentions no species", raw.front().line, 1);

  std::vector<Reaction> reactions;
  reactions.reserve(raw.size());
  for (const RawReaction& r : raw) {
    reactions.push_back({to_complex(r.reactant, sp.size()), to_complex(r.product, sp.size()), r.rate});
  }
  return ReactionNetwork(std::move(sp), std::move(reactions));
}

ReactionNetwork load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open network file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_network(buf.str());
}

std::string format_rate(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw Error("cannot format rate constant");
  return std::string(buf, ptr);
}

std::string render_complex(const ReactionNetwork& net, const Complex& c) {
  std::string out;
  for (std::size_t i = 0; i < c.coefficients.size(); ++i) {
    const Count k = c.coefficients[i];
    if (k == 0) continue;
    if (!out.empty()) out += " + ";
    if (k != 1) out += std::to_string(k) + " ";
    out += net.species()[i].name;
  }
  return out.empty() ? "0" : out;
}

std::string render_network(const ReactionNetwork& net) {
  std::string out;
  const auto& rs = net.reactions();
  for (std::size_t r = 0; r < rs.size(); ++r) {
    out += render_complex(net, rs[r].reactant);
    if (r + 1 < rs.size() && is_reverse(rs[r], rs[r + 1])) {
      out += " <-> " + render_complex(net, rs[r].product) + " @ " + format_rate(rs[r].rate_constant) + ", " +
             format_rate(rs[r + 1].rate_constant) + "\n";
      ++r;
    } else {
      out += " -> " + render_complex(net, rs[r].product) + " @ " + format_rate(rs[r].rate_constant) + "\n";
    }
  }
  return out;
}

}  // namespace slowmix
