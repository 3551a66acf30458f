#include "blp/parser.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "blp/errors.hpp"
#include "blp/text.hpp"

namespace blp {

std::size_t DomainDecl::state_index(const std::string& state) const {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] == state) return i;
  }
  return static_cast<std::size_t>(-1);
}

bool DomainDecl::is_boolean() const {
  if (!is_discrete() || states.size() != 2) return false;
  return state_index("true") != static_cast<std::size_t>(-1) &&
         state_index("false") != static_cast<std::size_t>(-1);
}

bool operator==(const MeanExpr& a, const MeanExpr& b) {
  return a.intercept == b.intercept && a.terms == b.terms;
}

namespace {

constexpr double kRowSumTolerance = 1e-9;

enum class Tok {
  Ident,
  Var,
  Number,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Period,
  Pipe,
  Equals,
  Slash,
  Star,
  Plus,
  Minus,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& source) : src_(source) { advance(); }

  const Token& peek() const { return current_; }

  Token next() {
    Token out = current_;
    advance();
    return out;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw SyntaxError(current_.line, current_.column, message);
  }

 private:
  void advance() {
    skip_blanks();
    current_.line = line_;
    current_.column = column_;
    if (pos_ >= src_.size()) {
      current_.kind = Tok::End;
      current_.text.clear();
      return;
    }
    char c = src_[pos_];
    if (std::islower(static_cast<unsigned char>(c))) {
      current_ = make_word(Tok::Ident);
      return;
    }
    if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
      current_ = make_word(Tok::Var);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      current_ = make_number();
      return;
    }
    Tok kind;
    switch (c) {
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case '[': kind = Tok::LBracket; break;
      case ']': kind = Tok::RBracket; break;
      case ',': kind = Tok::Comma; break;
      case '.': kind = Tok::Period; break;
      case '|': kind = Tok::Pipe; break;
      case '=': kind = Tok::Equals; break;
      case '/': kind = Tok::Slash; break;
      case '*': kind = Tok::Star; break;
      case '+': kind = Tok::Plus; break;
      case '-': kind = Tok::Minus; break;
      default:
        throw SyntaxError(line_, column_,
                          std::string("unexpected character '") + c + "'");
    }
    current_.kind = kind;
    current_.text = std::string(1, c);
    take();
  }

  void skip_blanks() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') take();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        take();
      } else {
        break;
      }
    }
  }

  Token make_word(Tok kind) {
    Token token;
    token.kind = kind;
    token.line = line_;
    token.column = column_;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
        token.text += c;
        take();
      } else {
        break;
      }
    }
    return token;
  }

  Token make_number() {
    Token token;
    token.kind = Tok::Number;
    token.line = line_;
    token.column = column_;
    auto digits = [&] {
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        token.text += src_[pos_];
        take();
      }
    };
    digits();
    // A '.' is part of the number only when a digit follows; otherwise it
    // terminates the statement.
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
        std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
      token.text += '.';
      take();
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_;
      std::string suffix(1, src_[pos_]);
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) {
        suffix += src_[look];
        ++look;
      }
      if (look < src_.size() &&
          std::isdigit(static_cast<unsigned char>(src_[look]))) {
        token.text += suffix;
        while (pos_ < mark + suffix.size()) take();
        digits();
      }
    }
    token.number = std::strtod(token.text.c_str(), nullptr);
    return token;
  }

  void take() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
  Token current_;
};

class Parser {
 public:
  explicit Parser(const std::string& source) : lex_(source) {}

  Lexer& lexer() { return lex_; }

  Token expect(Tok kind, const std::string& what) {
    if (lex_.peek().kind != kind) {
      lex_.fail("expected " + what);
    }
    return lex_.next();
  }

  bool accept(Tok kind) {
    if (lex_.peek().kind == kind) {
      lex_.next();
      return true;
    }
    return false;
  }

  bool at(Tok kind) const { return lex_.peek().kind == kind; }

  Term parse_term() {
    const Token& token = lex_.peek();
    if (token.kind == Tok::Var) {
      return Term::variable(lex_.next().text);
    }
    if (token.kind == Tok::Number) {
      return Term::constant(lex_.next().text);
    }
    if (token.kind == Tok::Ident) {
      std::string functor = lex_.next().text;
      std::vector<Term> args;
      if (accept(Tok::LParen)) {
        args.push_back(parse_term());
        while (accept(Tok::Comma)) args.push_back(parse_term());
        expect(Tok::RParen, "')'");
      }
      return Term::compound(std::move(functor), std::move(args));
    }
    lex_.fail("expected a term");
  }

  Atom parse_atom() {
    Token name = expect(Tok::Ident, "a predicate symbol");
    std::vector<Term> args;
    if (accept(Tok::LParen)) {
      args.push_back(parse_term());
      while (accept(Tok::Comma)) args.push_back(parse_term());
      expect(Tok::RParen, "')'");
    }
    return Atom(name.text, std::move(args));
  }

  // head | b1, ..., bn  (the leading head atom is already consumed)
  std::vector<Atom> parse_body() {
    std::vector<Atom> body;
    body.push_back(parse_atom());
    while (accept(Tok::Comma)) body.push_back(parse_atom());
    return body;
  }

  PredicateId parse_predicate_ref() {
    Token name = expect(Tok::Ident, "a predicate symbol");
    expect(Tok::Slash, "'/'");
    Token arity = expect(Tok::Number, "an arity");
    double value = arity.number;
    if (value < 0 || value != std::floor(value) ||
        arity.text.find('.') != std::string::npos) {
      throw SyntaxError(arity.line, arity.column, "arity must be an integer");
    }
    return PredicateId{name.text, static_cast<std::size_t>(value)};
  }

  double parse_signed_number() {
    bool negative = accept(Tok::Minus);
    Token token = expect(Tok::Number, "a number");
    return negative ? -token.number : token.number;
  }

 private:
  Lexer lex_;
};

struct PendingCpd {
  Clause reference;  // id unset; fact references have an empty body
  CpdDecl decl;
  int line = 1;
  int column = 1;
};

struct ParsedSource {
  std::vector<Clause> clauses;
  std::map<PredicateId, DomainDecl> domains;
  std::map<PredicateId, std::string> rules;
  std::vector<PendingCpd> cpds;
  std::set<PredicateId> closed_world;
};

MeanExpr parse_mean_expr(Parser& parser) {
  MeanExpr expr;
  bool first = true;
  double sign = 1.0;
  for (;;) {
    if (first) {
      if (parser.accept(Tok::Minus)) sign = -1.0;
      first = false;
    }
    Token number = parser.expect(Tok::Number, "a coefficient");
    double value = sign * number.number;
    if (parser.accept(Tok::Star)) {
      Atom atom = parser.parse_atom();
      expr.terms.emplace_back(std::move(atom), value);
    } else {
      expr.intercept += value;
    }
    if (parser.accept(Tok::Plus)) {
      sign = 1.0;
    } else if (parser.accept(Tok::Minus)) {
      sign = -1.0;
    } else {
      break;
    }
  }
  // Coalesce repeated references to the same body atom.
  std::vector<std::pair<Atom, double>> merged;
  for (auto& [atom, weight] : expr.terms) {
    bool found = false;
    for (auto& [existing, sum] : merged) {
      if (existing == atom) {
        sum += weight;
        found = true;
        break;
      }
    }
    if (!found) merged.emplace_back(atom, weight);
  }
  expr.terms = std::move(merged);
  return expr;
}

CpdDecl parse_cpd_payload(Parser& parser) {
  parser.expect(Tok::LBracket, "'['");
  std::vector<double> table;
  std::vector<NormalSpec> normals;
  bool any_normal = false;
  bool any_number = false;
  for (;;) {
    if (parser.at(Tok::Ident) && parser.lexer().peek().text == "normal") {
      parser.lexer().next();
      parser.expect(Tok::LParen, "'('");
      NormalSpec spec;
      spec.mean = parse_mean_expr(parser);
      parser.expect(Tok::Comma, "','");
      spec.variance = parser.parse_signed_number();
      parser.expect(Tok::RParen, "')'");
      normals.push_back(std::move(spec));
      any_normal = true;
    } else {
      table.push_back(parser.parse_signed_number());
      any_number = true;
    }
    if (!parser.accept(Tok::Comma)) break;
  }
  parser.expect(Tok::RBracket, "']'");
  if (any_normal && any_number) {
    parser.lexer().fail("cpd payload mixes numbers and normal(...) entries");
  }
  CpdDecl decl;
  if (any_normal) {
    decl.payload = std::move(normals);
  } else {
    decl.payload = std::move(table);
  }
  return decl;
}

ParsedSource parse_statements(const std::string& source) {
  ParsedSource out;
  Parser parser(source);
  int next_clause_id = 0;
  while (!parser.at(Tok::End)) {
    Token head = parser.lexer().peek();
    if (head.kind != Tok::Ident) {
      parser.lexer().fail("expected a statement");
    }
    if (head.text == "domain") {
      Token at = parser.lexer().next();
      parser.expect(Tok::LParen, "'('");
      DomainDecl decl;
      decl.pred = parser.parse_predicate_ref();
      parser.expect(Tok::Comma, "','");
      Token kind = parser.expect(Tok::Ident, "'discrete' or 'continuous'");
      parser.expect(Tok::Comma, "','");
      if (kind.text == "discrete") {
        decl.kind = DomainDecl::Kind::Discrete;
        parser.expect(Tok::LBracket, "'['");
        for (;;) {
          if (parser.at(Tok::Ident)) {
            decl.states.push_back(parser.lexer().next().text);
          } else if (parser.at(Tok::Number)) {
            decl.states.push_back(parser.lexer().next().text);
          } else {
            parser.lexer().fail("expected a state name");
          }
          if (!parser.accept(Tok::Comma)) break;
        }
        parser.expect(Tok::RBracket, "']'");
      } else if (kind.text == "continuous") {
        decl.kind = DomainDecl::Kind::Continuous;
        Token marker = parser.expect(Tok::Ident, "'real'");
        if (marker.text != "real") {
          throw SyntaxError(marker.line, marker.column,
                            "continuous domains use the marker 'real'");
        }
      } else {
        throw SyntaxError(kind.line, kind.column,
                          "domain kind must be 'discrete' or 'continuous'");
      }
      parser.expect(Tok::RParen, "')'");
      parser.expect(Tok::Period, "'.'");
      if (out.domains.count(decl.pred)) {
        throw ValidationError("duplicate domain declaration for " +
                              decl.pred.to_string());
      }
      if (decl.is_discrete()) {
        if (decl.states.empty()) {
          throw SyntaxError(at.line, at.column, "empty state list");
        }
        std::set<std::string> seen;
        for (const std::string& state : decl.states) {
          if (!seen.insert(state).second) {
            throw ValidationError("duplicate state '" + state + "' in domain " +
                                  decl.pred.to_string());
          }
        }
      }
      out.domains.emplace(decl.pred, std::move(decl));
      continue;
    }
    if (head.text == "combining_rule") {
      parser.lexer().next();
      parser.expect(Tok::LParen, "'('");
      PredicateId pred = parser.parse_predicate_ref();
      parser.expect(Tok::Comma, "','");
      Token rule = parser.expect(Tok::Ident, "a combining rule name");
      parser.expect(Tok::RParen, "')'");
      parser.expect(Tok::Period, "'.'");
      if (out.rules.count(pred)) {
        throw ValidationError("duplicate combining_rule declaration for " +
                              pred.to_string());
      }
      out.rules.emplace(pred, rule.text);
      continue;
    }
    if (head.text == "closed_world") {
      parser.lexer().next();
      parser.expect(Tok::LParen, "'('");
      parser.expect(Tok::LBracket, "'['");
      for (;;) {
        out.closed_world.insert(parser.parse_predicate_ref());
        if (!parser.accept(Tok::Comma)) break;
      }
      parser.expect(Tok::RBracket, "']'");
      parser.expect(Tok::RParen, "')'");
      parser.expect(Tok::Period, "'.'");
      continue;
    }
    if (head.text == "cpd") {
      PendingCpd pending;
      pending.line = head.line;
      pending.column = head.column;
      parser.lexer().next();
      parser.expect(Tok::LParen, "'('");
      if (parser.accept(Tok::LParen)) {
        pending.reference.head = parser.parse_atom();
        parser.expect(Tok::Pipe, "'|'");
        pending.reference.body = parser.parse_body();
        parser.expect(Tok::RParen, "')'");
      } else {
        pending.reference.head = parser.parse_atom();
      }
      parser.expect(Tok::Comma, "','");
      pending.decl = parse_cpd_payload(parser);
      parser.expect(Tok::RParen, "')'");
      parser.expect(Tok::Period, "'.'");
      out.cpds.push_back(std::move(pending));
      continue;
    }
    // Fact or clause.
    Clause clause;
    clause.head = parser.parse_atom();
    if (parser.accept(Tok::Pipe)) {
      clause.body = parser.parse_body();
    }
    parser.expect(Tok::Period, "'.'");
    clause.id = next_clause_id++;
    out.clauses.push_back(std::move(clause));
  }
  return out;
}

// The clause's discrete body atoms, in body order.
std::vector<const Atom*> discrete_body(const Clause& clause,
                                       const std::map<PredicateId, DomainDecl>& domains) {
  std::vector<const Atom*> out;
  for (const Atom& atom : clause.body) {
    if (domains.at(atom.pred()).is_discrete()) out.push_back(&atom);
  }
  return out;
}

void validate_discrete_cpd(const Clause& clause, const CpdDecl& decl,
                           const std::map<PredicateId, DomainDecl>& domains) {
  const DomainDecl& child = domains.at(clause.head.pred());
  if (!decl.is_discrete()) {
    throw ValidationError("clause '" + clause.to_string() +
                          "': discrete child requires a probability table");
  }
  for (const Atom& atom : clause.body) {
    if (domains.at(atom.pred()).is_continuous()) {
      throw ValidationError("clause '" + clause.to_string() +
                            "': discrete child cannot depend on continuous " +
                            atom.pred().to_string());
    }
  }
  std::size_t expected = child.state_count();
  for (const Atom& atom : clause.body) {
    expected *= domains.at(atom.pred()).state_count();
  }
  const std::vector<double>& table = decl.table();
  if (table.size() != expected) {
    throw ValidationError(
        "clause '" + clause.to_string() + "': cpd has " +
        std::to_string(table.size()) + " entries, expected " +
        std::to_string(expected));
  }
  for (double value : table) {
    if (!(value >= 0.0) || !(value <= 1.0)) {
      throw ValidationError("clause '" + clause.to_string() +
                            "': cpd entry " + format_double(value) +
                            " outside [0,1]");
    }
  }
  for (std::size_t offset = 0; offset < table.size();
       offset += child.state_count()) {
    double sum = 0.0;
    for (std::size_t s = 0; s < child.state_count(); ++s) {
      sum += table[offset + s];
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw ValidationError("clause '" + clause.to_string() +
                            "': cpd row sums to " + format_double(sum));
    }
  }
}

void validate_gaussian_cpd(const Clause& clause, const CpdDecl& decl,
                           const std::map<PredicateId, DomainDecl>& domains) {
  if (decl.is_discrete()) {
    throw ValidationError("clause '" + clause.to_string() +
                          "': continuous child requires normal(...) entries");
  }
  std::size_t expected = 1;
  for (const Atom* atom : discrete_body(clause, domains)) {
    expected *= domains.at(atom->pred()).state_count();
  }
  const std::vector<NormalSpec>& normals = decl.normals();
  if (normals.size() != expected) {
    throw ValidationError(
        "clause '" + clause.to_string() + "': cpd has " +
        std::to_string(normals.size()) + " normal entries, expected " +
        std::to_string(expected));
  }
  for (const NormalSpec& spec : normals) {
    if (spec.variance < 0.0) {
      throw ValidationError("clause '" + clause.to_string() +
                            "': negative variance " +
                            format_double(spec.variance));
    }
    for (const auto& [atom, weight] : spec.mean.terms) {
      (void)weight;
      bool found = false;
      for (const Atom& body_atom : clause.body) {
        if (body_atom == atom &&
            domains.at(body_atom.pred()).is_continuous()) {
          found = true;
          break;
        }
      }
      if (!found) {
        throw ValidationError("clause '" + clause.to_string() +
                              "': mean expression references " +
                              atom.to_string() +
                              " which is not a continuous body atom");
      }
    }
  }
}

Program validate(ParsedSource parsed) {
  if (parsed.clauses.empty()) {
    throw ValidationError("program contains no clauses");
  }
  // Every predicate used in a clause needs a domain.
  for (const Clause& clause : parsed.clauses) {
    std::vector<PredicateId> used{clause.head.pred()};
    for (const Atom& atom : clause.body) used.push_back(atom.pred());
    for (const PredicateId& pred : used) {
      if (!parsed.domains.count(pred)) {
        throw ValidationError("missing domain for " + pred.to_string());
      }
    }
  }
  for (const Clause& clause : parsed.clauses) {
    if (!check_range_restricted(clause)) {
      throw ValidationError("clause '" + clause.to_string() +
                            "' is not range-restricted");
    }
  }
  for (const auto& [pred, rule] : parsed.rules) {
    (void)rule;
    if (!parsed.domains.count(pred)) {
      throw ValidationError("combining_rule for undeclared predicate " +
                            pred.to_string());
    }
  }
  for (const PredicateId& pred : parsed.closed_world) {
    auto it = parsed.domains.find(pred);
    if (it == parsed.domains.end()) {
      throw ValidationError("closed_world for undeclared predicate " +
                            pred.to_string());
    }
    if (!it->second.is_boolean()) {
      throw ValidationError("closed_world predicate " + pred.to_string() +
                            " must have a {true,false} domain");
    }
  }
  // Predicates without an explicit combining rule default to identity.
  std::map<PredicateId, std::string> rules = std::move(parsed.rules);
  for (const auto& [pred, domain] : parsed.domains) {
    (void)domain;
    rules.try_emplace(pred, "identity");
  }
  // Match cpd statements to clauses syntactically; textually identical twin
  // clauses consume cpd statements in order.
  std::map<int, CpdDecl> cpds;
  for (PendingCpd& pending : parsed.cpds) {
    const Clause* matched = nullptr;
    for (const Clause& clause : parsed.clauses) {
      if (clause == pending.reference && !cpds.count(clause.id)) {
        matched = &clause;
        break;
      }
    }
    if (!matched) {
      throw ValidationError("cpd at line " + std::to_string(pending.line) +
                            " matches no clause without a cpd: '" +
                            pending.reference.to_string() + "'");
    }
    cpds.emplace(matched->id, std::move(pending.decl));
  }
  for (const Clause& clause : parsed.clauses) {
    if (!cpds.count(clause.id)) {
      throw ValidationError("missing cpd for clause '" + clause.to_string() +
                            "'");
    }
  }
  for (const Clause& clause : parsed.clauses) {
    const CpdDecl& decl = cpds.at(clause.id);
    if (parsed.domains.at(clause.head.pred()).is_discrete()) {
      validate_discrete_cpd(clause, decl, parsed.domains);
    } else {
      validate_gaussian_cpd(clause, decl, parsed.domains);
    }
  }
  return Program(std::move(parsed.clauses), std::move(parsed.domains),
                 std::move(rules), std::move(cpds),
                 std::move(parsed.closed_world));
}

}  // namespace

Program::Program(std::vector<Clause> clauses,
                 std::map<PredicateId, DomainDecl> domains,
                 std::map<PredicateId, std::string> rules,
                 std::map<int, CpdDecl> cpds, std::set<PredicateId> closed_world)
    : clauses_(std::move(clauses)),
      domains_(std::move(domains)),
      rules_(std::move(rules)),
      cpds_(std::move(cpds)),
      closed_world_(std::move(closed_world)) {}

const Clause& Program::clause(int id) const {
  for (const Clause& clause : clauses_) {
    if (clause.id == id) return clause;
  }
  throw std::out_of_range("no clause with id " + std::to_string(id));
}

const DomainDecl& Program::domain(const PredicateId& pred) const {
  auto it = domains_.find(pred);
  if (it == domains_.end()) {
    throw TypeError("no domain declared for " + pred.to_string());
  }
  return it->second;
}

const DomainDecl& Program::domain(const Atom& atom) const {
  return domain(atom.pred());
}

const std::string& Program::rule(const PredicateId& pred) const {
  auto it = rules_.find(pred);
  if (it == rules_.end()) {
    throw TypeError("no combining rule for " + pred.to_string());
  }
  return it->second;
}

const CpdDecl& Program::cpd(int clause_id) const {
  auto it = cpds_.find(clause_id);
  if (it == cpds_.end()) {
    throw std::out_of_range("no cpd for clause " + std::to_string(clause_id));
  }
  return it->second;
}

std::vector<const Clause*> Program::clauses_for(const PredicateId& pred) const {
  std::vector<const Clause*> out;
  for (const Clause& clause : clauses_) {
    if (clause.head.pred() == pred) out.push_back(&clause);
  }
  return out;
}

namespace {

std::string mean_expr_text(const MeanExpr& expr) {
  std::vector<std::string> parts;
  if (expr.intercept != 0.0 || expr.terms.empty()) {
    parts.push_back(format_double(expr.intercept));
  }
  for (const auto& [atom, weight] : expr.terms) {
    parts.push_back(format_double(weight) + "*" + atom.to_string());
  }
  return join(parts, " + ");
}

std::string cpd_payload_text(const CpdDecl& decl) {
  std::vector<std::string> parts;
  if (decl.is_discrete()) {
    for (double value : decl.table()) parts.push_back(format_double(value));
  } else {
    for (const NormalSpec& spec : decl.normals()) {
      parts.push_back("normal(" + mean_expr_text(spec.mean) + ", " +
                      format_double(spec.variance) + ")");
    }
  }
  return "[" + join(parts, ", ") + "]";
}

}  // namespace

std::string Program::pretty() const {
  std::ostringstream out;
  for (const auto& [pred, decl] : domains_) {
    out << "domain(" << pred.to_string() << ", ";
    if (decl.is_discrete()) {
      std::vector<std::string> states(decl.states.begin(), decl.states.end());
      out << "discrete, [" << join(states, ", ") << "]";
    } else {
      out << "continuous, real";
    }
    out << ").\n";
  }
  for (const auto& [pred, rule] : rules_) {
    out << "combining_rule(" << pred.to_string() << ", " << rule << ").\n";
  }
  if (!closed_world_.empty()) {
    std::vector<std::string> preds;
    for (const PredicateId& pred : closed_world_) {
      preds.push_back(pred.to_string());
    }
    out << "closed_world([" << join(preds, ", ") << "]).\n";
  }
  for (const Clause& clause : clauses_) {
    out << clause.to_string() << ".\n";
    auto it = cpds_.find(clause.id);
    if (it != cpds_.end()) {
      if (clause.is_fact()) {
        out << "cpd(" << clause.head.to_string() << ", "
            << cpd_payload_text(it->second) << ").\n";
      } else {
        out << "cpd((" << clause.to_string() << "), "
            << cpd_payload_text(it->second) << ").\n";
      }
    }
  }
  return out.str();
}

bool operator==(const Program& a, const Program& b) {
  if (a.clauses_.size() != b.clauses_.size()) return false;
  for (std::size_t i = 0; i < a.clauses_.size(); ++i) {
    if (a.clauses_[i].id != b.clauses_[i].id) return false;
    if (!(a.clauses_[i] == b.clauses_[i])) return false;
  }
  return a.domains_ == b.domains_ && a.rules_ == b.rules_ &&
         a.cpds_ == b.cpds_ && a.closed_world_ == b.closed_world_;
}

Program parse_program(const std::string& source) {
  return validate(parse_statements(source));
}

Query parse_query(const Program& program, const std::string& text) {
  Parser parser(text);
  Query query;
  query.atoms.push_back(parser.parse_atom());
  while (parser.accept(Tok::Comma)) query.atoms.push_back(parser.parse_atom());
  if (parser.accept(Tok::Pipe)) {
    for (;;) {
      Atom atom = parser.parse_atom();
      parser.expect(Tok::Equals, "'='");
      if (!atom.is_ground()) {
        throw NonGroundQueryError("evidence atom " + atom.to_string() +
                                  " contains a variable");
      }
      const DomainDecl& domain = program.domain(atom);
      EvidenceValue value;
      if (domain.is_continuous()) {
        double number = parser.parse_signed_number();
        if (!std::isfinite(number)) {
          throw TypeError("evidence value for " + atom.to_string() +
                          " is not finite");
        }
        value = number;
      } else {
        Token state;
        if (parser.at(Tok::Ident) || parser.at(Tok::Number)) {
          state = parser.lexer().next();
        } else {
          parser.lexer().fail("expected a state name");
        }
        if (domain.state_index(state.text) == static_cast<std::size_t>(-1)) {
          throw TypeError("state '" + state.text + "' is not in the domain of " +
                          atom.pred().to_string());
        }
        value = state.text;
      }
      query.evidence.emplace_back(std::move(atom), std::move(value));
      if (!parser.accept(Tok::Comma)) break;
    }
  }
  // Trailing '.' is optional in query strings; the shell strips it anyway.
  parser.accept(Tok::Period);
  if (!parser.at(Tok::End)) {
    parser.lexer().fail("unexpected trailing input");
  }
  for (const Atom& atom : query.atoms) {
    if (!atom.is_ground()) {
      throw NonGroundQueryError("query atom " + atom.to_string() +
                                " contains a variable");
    }
    program.domain(atom);  // every query atom must have a declared domain
  }
  // Repeated query atoms are redundant; keep the first occurrence.
  std::vector<Atom> unique_atoms;
  for (const Atom& atom : query.atoms) {
    if (std::find(unique_atoms.begin(), unique_atoms.end(), atom) ==
        unique_atoms.end()) {
      unique_atoms.push_back(atom);
    }
  }
  query.atoms = std::move(unique_atoms);
  std::set<Atom> seen;
  for (const auto& [atom, value] : query.evidence) {
    (void)value;
    if (!seen.insert(atom).second) {
      throw ValidationError("duplicate evidence atom " + atom.to_string());
    }
  }
  return query;
}

}  // namespace blp
