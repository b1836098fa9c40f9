#include "spectra/kb.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "spectra/errors.hpp"

namespace spectra {

// ---------------------------------------------------------------------------
// Concept

Concept Concept::top() {
  static const Concept t(std::make_shared<const Node>(Node{Kind::Top, {}, {}, {}}));
  return t;
}

Concept Concept::bot() { return negate(top()); }

Concept Concept::name(std::string n) {
  if (n.empty()) throw DomainError("empty concept name");
  return Concept(std::make_shared<const Node>(Node{Kind::Name, std::move(n), {}, {}}));
}

Concept Concept::negate(const Concept& c) {
  if (c.kind() == Kind::Not) return c.child();
  return Concept(std::make_shared<const Node>(Node{Kind::Not, {}, {}, {c}}));
}

Concept Concept::conj(std::vector<Concept> cs) {
  std::vector<Concept> flat;
  for (auto& c : cs) {
    if (c.kind() == Kind::And)
      flat.insert(flat.end(), c.operands().begin(), c.operands().end());
    else if (!c.is_top())
      flat.push_back(std::move(c));
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  if (flat.empty()) return top();
  if (flat.size() == 1) return flat.front();
  return Concept(std::make_shared<const Node>(Node{Kind::And, {}, {}, std::move(flat)}));
}

Concept Concept::disj(std::vector<Concept> cs) {
  for (auto& c : cs) c = negate(c);
  return negate(conj(std::move(cs)));
}

Concept Concept::exists(Role r, const Concept& filler) {
  if (r.name.empty()) throw DomainError("empty role name");
  return Concept(std::make_shared<const Node>(Node{Kind::Exists, {}, std::move(r), {filler}}));
}

Concept Concept::forall(Role r, const Concept& filler) {
  return negate(exists(std::move(r), negate(filler)));
}

bool Concept::is_name_conjunction() const {
  if (is_top() || is_name()) return true;
  if (kind() != Kind::And) return false;
  return std::all_of(operands().begin(), operands().end(), [](const Concept& c) { return c.is_name(); });
}

std::vector<Concept> Concept::conjuncts() const {
  if (is_top()) return {};
  if (kind() == Kind::And) return operands();
  return {*this};
}

void Concept::collect_signature(std::set<std::string>& concept_names,
                                std::set<std::string>& role_names) const {
  switch (kind()) {
    case Kind::Top:
      break;
    case Kind::Name:
      concept_names.insert(name());
      break;
    case Kind::Exists:
      role_names.insert(role().name);
      child().collect_signature(concept_names, role_names);
      break;
    case Kind::Not:
    case Kind::And:
      for (const auto& k : node_->kids) k.collect_signature(concept_names, role_names);
      break;
  }
}

bool Concept::uses_inverse() const {
  if (kind() == Kind::Exists && role().inverse) return true;
  return std::any_of(node_->kids.begin(), node_->kids.end(),
                     [](const Concept& k) { return k.uses_inverse(); });
}

bool Concept::uses_negation() const {
  if (kind() == Kind::Not) return true;
  return std::any_of(node_->kids.begin(), node_->kids.end(),
                     [](const Concept& k) { return k.uses_negation(); });
}

namespace {

std::string operand_text(const Concept& c) {
  if (c.kind() == Concept::Kind::And) return "(" + c.to_string() + ")";
  return c.to_string();
}

}  // namespace

std::string Concept::to_string() const {
  switch (kind()) {
    case Kind::Top:
      return "top";
    case Kind::Name:
      return name();
    case Kind::Not:
      if (child().is_top()) return "bot";
      return "not " + operand_text(child());
    case Kind::And: {
      std::vector<std::string> parts;
      for (const auto& k : operands()) parts.push_back(k.to_string());
      return fmt::format("{}", fmt::join(parts, " & "));
    }
    case Kind::Exists:
      if (child().is_top()) return "exists " + role().to_string();
      return "exists " + role().to_string() + ". " + operand_text(child());
  }
  return {};
}

std::strong_ordering operator<=>(const Concept& a, const Concept& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  if (auto c = a.node_->name <=> b.node_->name; c != 0) return c;
  if (auto c = a.node_->role <=> b.node_->role; c != 0) return c;
  return std::lexicographical_compare_three_way(a.node_->kids.begin(), a.node_->kids.end(),
                                                b.node_->kids.begin(), b.node_->kids.end());
}

// ---------------------------------------------------------------------------
// Axioms and KBs

Axiom Axiom::inclusion(Concept lhs, Concept rhs) {
  Axiom a;
  a.kind = Kind::Inclusion;
  a.lhs = std::move(lhs);
  a.rhs = std::move(rhs);
  return a;
}

Axiom Axiom::functionality(Concept guard, Role role, Concept filler) {
  Axiom a;
  a.kind = Kind::Functionality;
  a.lhs = std::move(guard);
  a.role = std::move(role);
  a.rhs = std::move(filler);
  return a;
}

std::string Axiom::to_string() const {
  if (kind == Kind::Inclusion) return lhs.to_string() + " <= " + rhs.to_string();
  return lhs.to_string() + " <= func " + role.to_string() + ". " + rhs.to_string();
}

std::set<std::string> KB::individuals() const {
  std::set<std::string> out;
  for (const auto& a : concept_assertions) out.insert(a.individual);
  for (const auto& a : role_assertions) {
    out.insert(a.subject);
    out.insert(a.object);
  }
  return out;
}

std::set<std::string> KB::concept_names() const {
  std::set<std::string> cn;
  std::set<std::string> rn;
  for (const auto& ax : tbox) {
    ax.lhs.collect_signature(cn, rn);
    ax.rhs.collect_signature(cn, rn);
  }
  for (const auto& a : concept_assertions) cn.insert(a.concept_name);
  return cn;
}

std::set<std::string> KB::role_names() const {
  std::set<std::string> cn;
  std::set<std::string> rn;
  for (const auto& ax : tbox) {
    ax.lhs.collect_signature(cn, rn);
    ax.rhs.collect_signature(cn, rn);
    if (ax.is_functionality()) rn.insert(ax.role.name);
  }
  for (const auto& a : role_assertions) rn.insert(a.role_name);
  return rn;
}

void check_namespaces(const KB& kb) {
  const auto cn = kb.concept_names();
  for (const auto& r : kb.role_names())
    if (cn.contains(r)) throw NamespaceClash("'" + r + "' is used both as a concept and as a role");
}

void reject_reserved_names(const KB& kb) {
  auto check = [](const std::string& n) {
    if (n.starts_with(kNormalFormPrefix))
      throw ReservedName("name '" + n + "' uses the reserved prefix " + std::string(kNormalFormPrefix));
  };
  for (const auto& n : kb.concept_names()) check(n);
  for (const auto& n : kb.role_names()) check(n);
  for (const auto& n : kb.individuals()) check(n);
}

std::string fresh_name(const std::string& base, const std::set<std::string>& taken) {
  if (!taken.contains(base)) return base;
  for (int i = 1;; ++i) {
    auto candidate = base + "_" + std::to_string(i);
    if (!taken.contains(candidate)) return candidate;
  }
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class Tok { Name, Le, And, Or, LParen, RParen, Dot, Comma, Minus, End };

struct Token {
  Tok kind;
  std::string text;
  int col;
};

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> tokenize(std::string_view line, int line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    const int col = static_cast<int>(i) + 1;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (is_name_start(c)) {
      std::size_t j = i;
      while (j < line.size() && is_name_char(line[j])) ++j;
      out.push_back({Tok::Name, std::string(line.substr(i, j - i)), col});
      i = j;
    } else if (line.substr(i, 2) == "<=") {
      out.push_back({Tok::Le, "<=", col});
      i += 2;
    } else {
      Tok k;
      switch (c) {
        case '&': k = Tok::And; break;
        case '|': k = Tok::Or; break;
        case '(': k = Tok::LParen; break;
        case ')': k = Tok::RParen; break;
        case '.': k = Tok::Dot; break;
        case ',': k = Tok::Comma; break;
        case '-': k = Tok::Minus; break;
        default:
          throw SyntaxError(line_no, col, "a name, operator or parenthesis");
      }
      out.push_back({k, std::string(1, c), col});
      ++i;
    }
  }
  out.push_back({Tok::End, "", static_cast<int>(line.size()) + 1});
  return out;
}

bool is_keyword(const std::string& s) {
  return s == "top" || s == "bot" || s == "not" || s == "exists" || s == "forall" || s == "func";
}

class LineParser {
 public:
  LineParser(std::vector<Token> toks, int line_no) : toks_(std::move(toks)), line_(line_no) {}

  const Token& peek() const { return toks_[pos_]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_word(std::string_view w) const { return at(Tok::Name) && peek().text == w; }
  Token take() { return toks_[pos_++]; }
  [[noreturn]] void fail(const std::string& expected) const {
    throw SyntaxError(line_, peek().col, expected);
  }
  void expect(Tok k, const std::string& what) {
    if (!at(k)) fail(what);
    ++pos_;
  }
  void expect_end() {
    if (!at(Tok::End)) fail("end of line");
  }

  std::string identifier(const std::string& what) {
    if (!at(Tok::Name) || is_keyword(peek().text)) fail(what);
    return take().text;
  }

  Role role() {
    Role r{identifier("a role name"), false};
    if (at(Tok::Minus)) {
      ++pos_;
      r.inverse = true;
    }
    return r;
  }

  // expr := conj ('|' conj)*
  Concept expr() {
    std::vector<Concept> parts{conjunction()};
    while (at(Tok::Or)) {
      ++pos_;
      parts.push_back(conjunction());
    }
    return parts.size() == 1 ? parts.front() : Concept::disj(std::move(parts));
  }

  // conj := unary ('&' unary)*
  Concept conjunction() {
    std::vector<Concept> parts{unary()};
    while (at(Tok::And)) {
      ++pos_;
      parts.push_back(unary());
    }
    return parts.size() == 1 ? parts.front() : Concept::conj(std::move(parts));
  }

  Concept unary() {
    if (at(Tok::LParen)) {
      ++pos_;
      auto c = expr();
      expect(Tok::RParen, "')'");
      return c;
    }
    if (!at(Tok::Name)) fail("a concept");
    const auto word = peek().text;
    if (word == "top") {
      ++pos_;
      return Concept::top();
    }
    if (word == "bot") {
      ++pos_;
      return Concept::bot();
    }
    if (word == "not") {
      ++pos_;
      return Concept::negate(unary());
    }
    if (word == "exists" || word == "forall") {
      ++pos_;
      auto r = role();
      if (at(Tok::Dot)) {
        ++pos_;
        auto filler = unary();
        return word == "exists" ? Concept::exists(r, filler) : Concept::forall(r, filler);
      }
      if (word == "forall") fail("'.' after the role of forall");
      return Concept::exists(r, Concept::top());
    }
    if (word == "func") fail("a concept");
    return Concept::name(take().text);
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int line_;
};

std::string strip_comment(std::string_view line) {
  const auto pos = line.find('#');
  return std::string(pos == std::string_view::npos ? line : line.substr(0, pos));
}

}  // namespace

KB parse_kb(std::string_view text) {
  KB kb;
  enum class Section { TBox, ABox } section = Section::TBox;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const auto line = strip_comment(raw);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto trimmed = line.substr(first, line.find_last_not_of(" \t") - first + 1);
    if (trimmed == "[tbox]") {
      section = Section::TBox;
      continue;
    }
    if (trimmed == "[abox]") {
      section = Section::ABox;
      continue;
    }
    if (trimmed.front() == '[') throw SyntaxError(line_no, static_cast<int>(first) + 1, "[tbox] or [abox]");

    LineParser p(tokenize(line, line_no), line_no);
    if (section == Section::TBox) {
      auto lhs = p.expr();
      p.expect(Tok::Le, "'<='");
      if (p.at_word("func")) {
        p.take();
        auto r = p.role();
        auto filler = Concept::top();
        if (p.at(Tok::Dot)) {
          p.take();
          filler = p.expr();
        }
        p.expect_end();
        kb.tbox.insert(Axiom::functionality(lhs, r, filler));
      } else {
        auto rhs = p.expr();
        p.expect_end();
        kb.tbox.insert(Axiom::inclusion(lhs, rhs));
      }
    } else {
      auto pred = p.identifier("a concept or role name");
      p.expect(Tok::LParen, "'('");
      auto a = p.identifier("an individual name");
      if (p.at(Tok::Comma)) {
        p.take();
        auto b = p.identifier("an individual name");
        p.expect(Tok::RParen, "')'");
        p.expect_end();
        kb.role_assertions.insert({pred, a, b});
      } else {
        p.expect(Tok::RParen, "')' or ','");
        p.expect_end();
        kb.concept_assertions.insert({pred, a});
      }
    }
  }
  check_namespaces(kb);
  return kb;
}

Concept parse_concept(std::string_view text) {
  LineParser p(tokenize(text, 1), 1);
  auto c = p.expr();
  p.expect_end();
  return c;
}

std::string serialize_kb(const KB& kb) {
  std::string out = "[tbox]\n";
  for (const auto& ax : kb.tbox) out += ax.to_string() + "\n";
  out += "[abox]\n";
  for (const auto& a : kb.concept_assertions) out += a.to_string() + "\n";
  for (const auto& a : kb.role_assertions) out += a.to_string() + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Queries

std::vector<std::string> CCQ::variables() const {
  std::set<std::string> vs;
  for (const auto& a : atoms)
    for (const auto& t : a.args)
      if (t.kind != Term::Kind::Individual) vs.insert(t.name);
  return {vs.begin(), vs.end()};
}

std::vector<std::string> CCQ::counting_variables() const {
  std::set<std::string> vs;
  for (const auto& a : atoms)
    for (const auto& t : a.args)
      if (t.kind == Term::Kind::Counting) vs.insert(t.name);
  return {vs.begin(), vs.end()};
}

bool CCQ::individual_free() const {
  return std::all_of(atoms.begin(), atoms.end(), [](const QueryAtom& a) {
    return std::none_of(a.args.begin(), a.args.end(),
                        [](const Term& t) { return t.kind == Term::Kind::Individual; });
  });
}

bool CCQ::connected() const {
  if (atoms.size() <= 1) return true;
  std::vector<bool> reached(atoms.size(), false);
  std::vector<std::size_t> stack{0};
  reached[0] = true;
  auto shares = [](const QueryAtom& a, const QueryAtom& b) {
    for (const auto& s : a.args)
      for (const auto& t : b.args)
        if (s == t) return true;
    return false;
  };
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    for (std::size_t j = 0; j < atoms.size(); ++j)
      if (!reached[j] && shares(atoms[i], atoms[j])) {
        reached[j] = true;
        stack.push_back(j);
      }
  }
  return std::all_of(reached.begin(), reached.end(), [](bool b) { return b; });
}

std::string CCQ::to_string() const {
  std::vector<std::string> parts;
  for (const auto& a : atoms) {
    std::vector<std::string> args;
    for (const auto& t : a.args) {
      switch (t.kind) {
        case Term::Kind::Individual: args.push_back(t.name); break;
        case Term::Kind::Variable: args.push_back("?" + t.name); break;
        case Term::Kind::Counting: args.push_back("!" + t.name); break;
      }
    }
    parts.push_back(fmt::format("{}({})", a.predicate, fmt::join(args, ",")));
  }
  return fmt::format("{}", fmt::join(parts, " & "));
}

CCQ parse_ccq(std::string_view text) {
  CCQ q;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto fail = [&](const std::string& what) -> void {
    throw SyntaxError(1, static_cast<int>(i) + 1, what);
  };
  auto ident = [&]() {
    skip_ws();
    if (i >= text.size() || !is_name_start(text[i])) fail("a name");
    const auto start = i;
    while (i < text.size() && is_name_char(text[i])) ++i;
    return std::string(text.substr(start, i - start));
  };
  auto term = [&]() {
    skip_ws();
    Term t;
    if (i < text.size() && (text[i] == '?' || text[i] == '!')) {
      t.kind = text[i] == '?' ? Term::Kind::Variable : Term::Kind::Counting;
      ++i;
    }
    t.name = ident();
    return t;
  };
  while (true) {
    QueryAtom atom;
    atom.predicate = ident();
    skip_ws();
    if (i >= text.size() || text[i] != '(') fail("'('");
    ++i;
    atom.args.push_back(term());
    skip_ws();
    if (i < text.size() && text[i] == ',') {
      ++i;
      atom.args.push_back(term());
      skip_ws();
    }
    if (i >= text.size() || text[i] != ')') fail("')'");
    ++i;
    q.atoms.push_back(std::move(atom));
    skip_ws();
    if (i >= text.size()) break;
    if (text[i] != '&' && text[i] != ',') fail("'&' or end of query");
    ++i;
  }
  std::map<std::string, Term::Kind> kinds;
  for (const auto& a : q.atoms)
    for (const auto& t : a.args) {
      if (t.kind == Term::Kind::Individual) continue;
      auto [it, inserted] = kinds.emplace(t.name, t.kind);
      if (!inserted && it->second != t.kind)
        throw DomainError("variable '" + t.name + "' is used both as counting and existential");
    }
  return q;
}

CCQ CardinalityQuery::to_ccq() const {
  CCQ q;
  if (kind == Kind::Concept) {
    q.atoms.push_back({name, {{Term::Kind::Counting, "z"}}});
  } else {
    q.atoms.push_back({name, {{Term::Kind::Counting, "z1"}, {Term::Kind::Counting, "z2"}}});
  }
  return q;
}

std::string CardinalityQuery::to_string() const {
  return kind == Kind::Concept ? "q_" + name : "q_" + name + " (role)";
}

}  // namespace spectra
