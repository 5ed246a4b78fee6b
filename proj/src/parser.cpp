#include "dstab/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <set>
#include <utility>

namespace dstab {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) +
                         (column ? ", column " + std::to_string(column) : std::string()) + ": " +
                         what),
      line_(line),
      column_(column),
      message_(what) {}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}
bool digit(char c) { return c >= '0' && c <= '9'; }

// A parameter reference as written in an attribute.
struct ValueRef {
  std::string name;
  std::optional<double> number;
  std::size_t column = 0;
};

struct PendingReaction {
  std::size_t index;
  std::size_t line;
  std::optional<ValueRef> rate;
  std::optional<ValueRef> delay;
};

class LineParser {
 public:
  LineParser(std::string_view text, std::size_t line) : s_(text), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, pos_ + 1, what); }
  [[noreturn]] void fail_at(std::size_t col, const std::string& what) const {
    throw ParseError(line_, col, what);
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= s_.size();
  }
  bool peek(std::string_view tok) {
    skip_ws();
    return s_.substr(pos_, tok.size()) == tok;
  }
  bool accept(std::string_view tok) {
    if (!peek(tok)) return false;
    pos_ += tok.size();
    return true;
  }
  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }
  std::size_t column() const { return pos_ + 1; }

  std::string identifier() {
    skip_ws();
    if (pos_ >= s_.size() || !ident_start(s_[pos_])) fail("expected identifier");
    std::size_t b = pos_;
    while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
    return std::string(s_.substr(b, pos_ - b));
  }

  // Parses "0" or term ("+" term)*.
  Complex complex(ReactionNetwork& net) {
    skip_ws();
    Complex c;
    if (pos_ < s_.size() && s_[pos_] == '0') {
      std::size_t q = pos_ + 1;
      while (q < s_.size() && (s_[q] == ' ' || s_[q] == '\t')) ++q;
      const bool lone_zero = q >= s_.size() || s_[q] == '-' || s_[q] == '<' || s_[q] == ':' ||
                             s_[q] == '\r';
      if (lone_zero && !(pos_ + 1 < s_.size() && (digit(s_[pos_ + 1]) || s_[pos_ + 1] == '.' ||
                                                  s_[pos_ + 1] == '/'))) {
        ++pos_;
        return c;
      }
    }
    do {
      term(net, c);
    } while (accept("+"));
    return c;
  }

  void term(ReactionNetwork& net, Complex& c) {
    skip_ws();
    const std::size_t col = column();
    Rational coeff = 1;
    if (pos_ < s_.size() && s_[pos_] == '-') fail("negative stoichiometric coefficient");
    if (pos_ < s_.size() && (digit(s_[pos_]) || s_[pos_] == '.')) {
      std::size_t b = pos_;
      while (pos_ < s_.size() && (digit(s_[pos_]) || s_[pos_] == '.' || s_[pos_] == '/')) ++pos_;
      try {
        coeff = parse_rational(s_.substr(b, pos_ - b));
      } catch (const std::exception& e) {
        fail_at(col, std::string("bad coefficient: ") + e.what());
      }
      if (coeff <= 0) fail_at(col, "stoichiometric coefficient must be positive");
    }
    const std::size_t name_col = column();
    std::string name = identifier();
    try {
      c.add(net.species_index(name), coeff);
    } catch (const NetworkError& e) {
      fail_at(name_col, e.what());
    }
  }

  ValueRef value() {
    skip_ws();
    ValueRef v;
    v.column = column();
    if (pos_ >= s_.size()) fail("expected a number or identifier");
    if (ident_start(s_[pos_])) {
      v.name = identifier();
      return v;
    }
    std::size_t b = pos_;
    while (pos_ < s_.size() && (digit(s_[pos_]) || s_[pos_] == '.' || s_[pos_] == 'e' ||
                                s_[pos_] == 'E' || s_[pos_] == '+' || s_[pos_] == '-')) {
      ++pos_;
    }
    v.number = number(s_.substr(b, pos_ - b), v.column);
    return v;
  }

  double number(std::string_view tok, std::size_t col) const {
    double x = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (!tok.empty() && tok[0] == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, x);
    if (tok.empty() || ec != std::errc() || ptr != last || !std::isfinite(x)) {
      fail_at(col, "malformed number '" + std::string(tok) + "'");
    }
    return x;
  }

  // Rest of the line as a number (binding right-hand side).
  double trailing_number() {
    skip_ws();
    const std::size_t col = column();
    std::size_t b = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    double x = number(s_.substr(b, pos_ - b), col);
    if (!at_end()) fail("unexpected text after number");
    return x;
  }

  std::size_t unsigned_integer() {
    skip_ws();
    std::size_t b = pos_;
    while (pos_ < s_.size() && digit(s_[pos_])) ++pos_;
    std::size_t out = 0;
    auto [ptr, ec] = std::from_chars(s_.data() + b, s_.data() + pos_, out);
    if (b == pos_ || ec != std::errc()) fail_at(b + 1, "expected a reaction number");
    (void)ptr;
    return out;
  }

 private:
  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

bool is_directive(std::string_view line, std::string_view word) {
  std::size_t p = 0;
  while (p < line.size() && (line[p] == ' ' || line[p] == '\t')) ++p;
  if (line.substr(p, word.size()) != word) return false;
  p += word.size();
  while (p < line.size() && (line[p] == ' ' || line[p] == '\t')) ++p;
  return p < line.size() && line[p] == ':';
}

struct Attrs {
  std::optional<ValueRef> k, kf, kb, tau, tauf, taub;
};

Attrs parse_attrs(LineParser& p) {
  Attrs a;
  while (!p.at_end()) {
    const std::size_t col = p.column();
    std::string key = p.identifier();
    std::string full = key;
    if (p.accept("+")) full += "+";
    else if (p.accept("-")) full += "-";
    p.expect("=");
    std::optional<ValueRef>* slot = nullptr;
    if (full == "k") slot = &a.k;
    else if (full == "k+") slot = &a.kf;
    else if (full == "k-") slot = &a.kb;
    else if (full == "tau") slot = &a.tau;
    else if (full == "tau+") slot = &a.tauf;
    else if (full == "tau-") slot = &a.taub;
    else p.fail_at(col, "unknown attribute '" + full + "'");
    if (*slot) p.fail_at(col, "attribute '" + full + "' given twice");
    *slot = p.value();
    p.accept(",");
  }
  return a;
}

}  // namespace

NetworkFile parse_network_file(std::string_view text) {
  NetworkFile out;
  ReactionNetwork& net = out.network;
  std::vector<PendingReaction> pending;
  std::map<std::string, std::size_t> binding_line;
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> explicit_pairs;  // line, r, s
  bool explicit_pairing = false;
  bool seen_reaction = false;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    for (char c : line) {
      if (static_cast<unsigned char>(c) < 0x20 && c != '\t' && c != '\r') {
        throw ParseError(line_no, 0, "control character in input");
      }
    }
    LineParser p(line, line_no);
    if (p.at_end()) {
      if (end == text.size()) break;
      continue;
    }

    if (is_directive(line, "species")) {
      if (seen_reaction) p.fail("species declaration must precede reactions");
      p.identifier();
      p.expect(":");
      while (!p.at_end()) {
        const std::size_t col = p.column();
        std::string name = p.identifier();
        if (net.find_species(name)) p.fail_at(col, "species '" + name + "' declared twice");
        net.add_species(name);
        p.accept(",");
      }
    } else if (is_directive(line, "pairing")) {
      if (seen_reaction) p.fail("pairing mode must precede reactions");
      p.identifier();
      p.expect(":");
      p.skip_ws();
      const std::size_t col = p.column();
      std::string mode = p.identifier();
      if (mode == "explicit") explicit_pairing = true;
      else if (mode != "auto") p.fail_at(col, "pairing mode must be 'auto' or 'explicit'");
      if (!p.at_end()) p.fail("unexpected text after pairing mode");
    } else if (is_directive(line, "pair")) {
      p.identifier();
      p.expect(":");
      std::size_t r = p.unsigned_integer();
      std::size_t s = p.unsigned_integer();
      if (!p.at_end()) p.fail("unexpected text after pair");
      explicit_pairs.emplace_back(line_no, r, s);
    } else if (line.find("->") != std::string_view::npos) {
      seen_reaction = true;
      Complex lhs = p.complex(net);
      bool reversible = false;
      if (p.accept("<->")) reversible = true;
      else p.expect("->");
      Complex rhs = p.complex(net);
      Attrs a;
      if (p.accept(":")) a = parse_attrs(p);
      else if (!p.at_end()) p.fail("expected '+', ':' or end of line");

      if (lhs == rhs) p.fail_at(1, "reactant complex equals product complex");
      if (reversible) {
        if (a.k) p.fail_at(a.k->column, "'k=' on '<->' is ambiguous; use k+= and k-=");
        if (a.tau) p.fail_at(a.tau->column, "'tau=' on '<->' is ambiguous; use tau+= and tau-=");
      } else {
        for (const auto* v : {&a.kf, &a.kb, &a.tauf, &a.taub}) {
          if (*v) p.fail_at((*v)->column, "directional attribute on an irreversible reaction");
        }
      }

      Statement st{line_no, {}};
      auto add = [&](Complex y, Complex yp, const std::optional<ValueRef>& k,
                     const std::optional<ValueRef>& tau) {
        Reaction r;
        r.reactant = std::move(y);
        r.product = std::move(yp);
        if (k && k->number) {
          if (!(*k->number > 0.0)) p.fail_at(k->column, "rate constant must be positive");
          r.rate.value = k->number;
        } else if (k) {
          r.rate.name = k->name;
        }
        if (tau && tau->number) {
          if (!(*tau->number >= 0.0)) p.fail_at(tau->column, "delay must be nonnegative");
          r.delay.value = tau->number;
        } else if (tau) {
          r.delay.name = tau->name;
        }
        std::size_t idx = net.add_reaction(std::move(r));
        st.reactions.push_back(idx);
        pending.push_back({idx, line_no, k, tau});
      };
      if (reversible) {
        add(lhs, rhs, a.kf, a.tauf);
        add(rhs, lhs, a.kb, a.taub);
        net.pair_reversible(st.reactions[0], st.reactions[1]);
      } else {
        add(std::move(lhs), std::move(rhs), a.k, a.tau);
      }
      out.statements.push_back(std::move(st));
    } else {
      const std::size_t col = p.column();
      std::string name = p.identifier();
      p.expect("=");
      double v = p.trailing_number();
      if (out.bindings.count(name)) {
        p.fail_at(col, "parameter '" + name + "' bound twice (first on line " +
                           std::to_string(binding_line[name]) + ")");
      }
      out.bindings[name] = v;
      binding_line[name] = line_no;
    }
    if (end == text.size()) break;
  }

  // Resolve symbolic parameters against the bindings section.
  std::set<std::string> free;
  for (const auto& pr : pending) {
    Reaction& r = net.reaction(pr.index);
    if (!r.rate.name.empty()) {
      auto it = out.bindings.find(r.rate.name);
      if (it == out.bindings.end()) {
        free.insert(r.rate.name);
      } else {
        if (!(it->second > 0.0)) {
          throw ParseError(pr.line, pr.rate->column,
                           "rate constant '" + r.rate.name + "' must be positive");
        }
        r.rate.value = it->second;
      }
    }
    if (!r.delay.name.empty()) {
      auto it = out.bindings.find(r.delay.name);
      if (it == out.bindings.end()) {
        free.insert(r.delay.name);
      } else {
        if (!(it->second >= 0.0)) {
          throw ParseError(pr.line, pr.delay->column,
                           "delay '" + r.delay.name + "' must be nonnegative");
        }
        r.delay.value = it->second;
      }
    }
  }
  out.free_parameters.assign(free.begin(), free.end());

  for (const auto& [line, r, s] : explicit_pairs) {
    if (r == 0 || s == 0 || r > net.num_reactions() || s > net.num_reactions()) {
      throw ParseError(line, 0, "pair refers to a nonexistent reaction");
    }
    try {
      net.pair_reversible(r - 1, s - 1);
    } catch (const NetworkError& e) {
      throw ParseError(line, 0, e.what());
    }
  }
  if (!explicit_pairing) net.detect_reversible_pairs();
  return out;
}

ReactionNetwork parse_network(std::string_view text) { return parse_network_file(text).network; }

// ---------------------------------------------------------------------------

namespace {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string attr_value(const std::string& name, const std::optional<double>& value) {
  if (!name.empty()) return name;
  return format_number(*value);
}

void append_attrs(std::string& out, const std::vector<std::pair<std::string, std::string>>& attrs) {
  if (attrs.empty()) return;
  out += " :";
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    out += (i ? ", " : " ") + attrs[i].first + "=" + attrs[i].second;
  }
}

void collect(std::vector<std::pair<std::string, std::string>>& attrs, const std::string& key,
             const std::string& name, const std::optional<double>& value) {
  if (!name.empty() || value) attrs.emplace_back(key, attr_value(name, value));
}

std::string render(const ReactionNetwork& net, bool explicit_pairing) {
  std::string out;
  if (net.num_species() > 0) {
    out += "species:";
    for (std::size_t i = 0; i < net.num_species(); ++i) {
      out += (i ? ", " : " ") + net.species()[i].name;
    }
    out += "\n";
  }
  if (explicit_pairing) out += "pairing: explicit\n";

  std::vector<std::pair<std::size_t, std::size_t>> far_pairs;
  for (std::size_t r = 0; r < net.num_reactions(); ++r) {
    const Reaction& rx = net.reaction(r);
    auto partner = net.partner(r);
    std::vector<std::pair<std::string, std::string>> attrs;
    if (partner && *partner == r + 1) {
      const Reaction& back = net.reaction(r + 1);
      collect(attrs, "k+", rx.rate.name, rx.rate.value);
      collect(attrs, "k-", back.rate.name, back.rate.value);
      collect(attrs, "tau+", rx.delay.name, rx.delay.value);
      collect(attrs, "tau-", back.delay.name, back.delay.value);
      out += net.complex_string(rx.reactant) + " <-> " + net.complex_string(rx.product);
      append_attrs(out, attrs);
      out += "\n";
      ++r;
      continue;
    }
    if (partner && *partner > r) far_pairs.emplace_back(r, *partner);
    collect(attrs, "k", rx.rate.name, rx.rate.value);
    collect(attrs, "tau", rx.delay.name, rx.delay.value);
    out += net.reaction_string(r);
    append_attrs(out, attrs);
    out += "\n";
  }
  if (explicit_pairing) {
    for (const auto& [r, s] : far_pairs) {
      out += "pair: " + std::to_string(r + 1) + " " + std::to_string(s + 1) + "\n";
    }
  }

  // Bindings: first value seen for each name wins.
  std::map<std::string, double> bindings;
  for (const auto& rx : net.reactions()) {
    if (!rx.rate.name.empty() && rx.rate.value) bindings.emplace(rx.rate.name, *rx.rate.value);
    if (!rx.delay.name.empty() && rx.delay.value) bindings.emplace(rx.delay.name, *rx.delay.value);
  }
  for (const auto& [name, v] : bindings) out += name + " = " + format_number(v) + "\n";
  return out;
}

}  // namespace

std::string serialize_network(const ReactionNetwork& net) {
  // Automatic pairing reproduces most networks; fall back to explicit pairing
  // when it would pair reactions differently.
  std::string text = render(net, false);
  if (parse_network(text).reversible_pairs() == net.reversible_pairs()) return text;
  return render(net, true);
}

}  // namespace dstab
