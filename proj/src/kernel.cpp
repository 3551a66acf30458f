#include "blp/kernel.hpp"

#include <algorithm>
#include <cassert>

namespace blp {

Term Term::variable(std::string name) {
  auto rep = std::make_shared<Rep>();
  rep->is_variable = true;
  rep->symbol = std::move(name);
  return Term(std::move(rep));
}

Term Term::compound(std::string functor, std::vector<Term> args) {
  auto rep = std::make_shared<Rep>();
  rep->is_variable = false;
  rep->symbol = std::move(functor);
  rep->args = std::move(args);
  return Term(std::move(rep));
}

bool Term::is_ground() const {
  if (is_variable()) return false;
  for (const Term& arg : args()) {
    if (!arg.is_ground()) return false;
  }
  return true;
}

void Term::collect_variables(std::set<std::string>& out) const {
  if (is_variable()) {
    out.insert(symbol());
    return;
  }
  for (const Term& arg : args()) arg.collect_variables(out);
}

std::string Term::to_string() const {
  if (is_variable() || args().empty()) return symbol();
  std::string out = symbol();
  out += '(';
  for (std::size_t i = 0; i < args().size(); ++i) {
    if (i > 0) out += ',';
    out += args()[i].to_string();
  }
  out += ')';
  return out;
}

bool operator==(const Term& a, const Term& b) {
  if (a.rep_ == b.rep_) return true;
  if (a.is_variable() != b.is_variable()) return false;
  if (a.symbol() != b.symbol()) return false;
  if (a.args().size() != b.args().size()) return false;
  for (std::size_t i = 0; i < a.args().size(); ++i) {
    if (!(a.args()[i] == b.args()[i])) return false;
  }
  return true;
}

Atom::Atom(std::string predicate, std::vector<Term> args)
    : predicate_(std::move(predicate)), args_(std::move(args)) {}

bool Atom::is_ground() const {
  for (const Term& arg : args_) {
    if (!arg.is_ground()) return false;
  }
  return true;
}

void Atom::collect_variables(std::set<std::string>& out) const {
  for (const Term& arg : args_) arg.collect_variables(out);
}

std::set<std::string> Atom::variables() const {
  std::set<std::string> out;
  collect_variables(out);
  return out;
}

std::string Atom::to_string() const {
  if (args_.empty()) return predicate_;
  std::string out = predicate_;
  out += '(';
  for (std::size_t i = 0; i < args_.size(); ++i) {
    if (i > 0) out += ',';
    out += args_[i].to_string();
  }
  out += ')';
  return out;
}

bool operator==(const Atom& a, const Atom& b) {
  if (a.predicate_ != b.predicate_) return false;
  if (a.args_.size() != b.args_.size()) return false;
  for (std::size_t i = 0; i < a.args_.size(); ++i) {
    if (!(a.args_[i] == b.args_[i])) return false;
  }
  return true;
}

std::string Clause::to_string() const {
  std::string out = head.to_string();
  if (!body.empty()) {
    out += " | ";
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (i > 0) out += ", ";
      out += body[i].to_string();
    }
  }
  return out;
}

const Term* Substitution::lookup(const std::string& var) const {
  auto it = bindings_.find(var);
  return it == bindings_.end() ? nullptr : &it->second;
}

void Substitution::insert(const std::string& var, const Term& term) {
  if (term.is_variable() && term.symbol() == var) {
    bindings_.erase(var);
    return;
  }
  bindings_.insert_or_assign(var, term);
}

Term Substitution::apply(const Term& term) const {
  if (term.is_variable()) {
    const Term* bound = lookup(term.symbol());
    return bound ? *bound : term;
  }
  if (term.args().empty()) return term;
  std::vector<Term> args;
  args.reserve(term.args().size());
  for (const Term& arg : term.args()) args.push_back(apply(arg));
  return Term::compound(term.symbol(), std::move(args));
}

Atom Substitution::apply(const Atom& atom) const {
  if (empty()) return atom;
  std::vector<Term> args;
  args.reserve(atom.args().size());
  for (const Term& arg : atom.args()) args.push_back(apply(arg));
  return Atom(atom.predicate(), std::move(args));
}

Clause Substitution::apply(const Clause& clause) const {
  Clause out;
  out.id = clause.id;
  out.head = apply(clause.head);
  out.body = apply(clause.body);
  return out;
}

std::vector<Atom> Substitution::apply(const std::vector<Atom>& atoms) const {
  std::vector<Atom> out;
  out.reserve(atoms.size());
  for (const Atom& atom : atoms) out.push_back(apply(atom));
  return out;
}

Substitution compose(const Substitution& first, const Substitution& then) {
  Substitution out;
  for (const auto& [var, term] : first.bindings()) {
    out.insert(var, then.apply(term));
  }
  for (const auto& [var, term] : then.bindings()) {
    if (!first.lookup(var)) out.insert(var, term);
  }
  return out;
}

std::string Substitution::to_string() const {
  std::string out = "{";
  bool sep = false;
  for (const auto& [var, term] : bindings_) {
    if (sep) out += ", ";
    out += var + "/" + term.to_string();
    sep = true;
  }
  out += '}';
  return out;
}

namespace {

bool occurs(const std::string& var, const Term& term) {
  if (term.is_variable()) return term.symbol() == var;
  for (const Term& arg : term.args()) {
    if (occurs(var, arg)) return true;
  }
  return false;
}

// Binds var -> term and re-applies the new binding to every existing image.
// Keeps the substitution idempotent: no image mentions a bound variable.
void bind_variable(Substitution& subst, const std::string& var, const Term& term) {
  Substitution single;
  single.insert(var, term);
  Substitution updated;
  for (const auto& [existing, image] : subst.bindings()) {
    updated.insert(existing, single.apply(image));
  }
  updated.insert(var, term);
  subst = std::move(updated);
}

bool unify_step(const Term& a, const Term& b, Substitution& subst) {
  Term lhs = subst.apply(a);
  Term rhs = subst.apply(b);
  if (lhs.is_variable()) {
    if (rhs.is_variable() && rhs.symbol() == lhs.symbol()) return true;
    if (occurs(lhs.symbol(), rhs)) return false;
    bind_variable(subst, lhs.symbol(), rhs);
    return true;
  }
  if (rhs.is_variable()) {
    if (occurs(rhs.symbol(), lhs)) return false;
    bind_variable(subst, rhs.symbol(), lhs);
    return true;
  }
  if (lhs.symbol() != rhs.symbol()) return false;
  if (lhs.args().size() != rhs.args().size()) return false;
  for (std::size_t i = 0; i < lhs.args().size(); ++i) {
    if (!unify_step(lhs.args()[i], rhs.args()[i], subst)) return false;
  }
  return true;
}

}  // namespace

std::optional<Substitution> unify(const Atom& a, const Atom& b) {
  if (a.predicate() != b.predicate()) return std::nullopt;
  if (a.arity() != b.arity()) return std::nullopt;
  Substitution subst;
  for (std::size_t i = 0; i < a.args().size(); ++i) {
    if (!unify_step(a.args()[i], b.args()[i], subst)) return std::nullopt;
  }
  return subst;
}

std::optional<Substitution> unify_terms(const Term& a, const Term& b) {
  Substitution subst;
  if (!unify_step(a, b, subst)) return std::nullopt;
  return subst;
}

bool check_range_restricted(const Clause& clause) {
  std::set<std::string> head_vars = clause.head.variables();
  if (head_vars.empty()) return true;
  std::set<std::string> body_vars;
  for (const Atom& atom : clause.body) atom.collect_variables(body_vars);
  return std::includes(body_vars.begin(), body_vars.end(), head_vars.begin(),
                       head_vars.end());
}

Clause rename_apart(const Clause& clause, int& counter) {
  std::set<std::string> vars = clause.head.variables();
  for (const Atom& atom : clause.body) atom.collect_variables(vars);
  Substitution renaming;
  for (const std::string& var : vars) {
    renaming.insert(var, Term::variable("V#" + std::to_string(counter++)));
  }
  return renaming.apply(clause);
}

}  // namespace blp
