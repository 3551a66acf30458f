#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace blp {

// First-order terms. A term is a variable or a compound (functor plus
// arguments); constants are compounds of arity zero. Terms are immutable and
// share structure, so copies are cheap and thread-safe.
//
// An identifier names a variable iff its first character is an uppercase
// letter or an underscore; the parser enforces this, the kernel just stores
// the symbol.
class Term {
 public:
  static Term variable(std::string name);
  static Term compound(std::string functor, std::vector<Term> args = {});
  static Term constant(std::string name) { return compound(std::move(name)); }

  bool is_variable() const { return rep_->is_variable; }
  bool is_compound() const { return !rep_->is_variable; }
  bool is_constant() const { return is_compound() && args().empty(); }

  // Variable name or functor symbol.
  const std::string& symbol() const { return rep_->symbol; }
  const std::vector<Term>& args() const { return rep_->args; }

  bool is_ground() const;
  void collect_variables(std::set<std::string>& out) const;

  std::string to_string() const;

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }
  // Canonical-text ordering; injective on well-formed terms because variable
  // and functor symbols draw from disjoint lexical classes.
  friend bool operator<(const Term& a, const Term& b) {
    return a.to_string() < b.to_string();
  }

 private:
  struct Rep {
    bool is_variable;
    std::string symbol;
    std::vector<Term> args;
  };

  explicit Term(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}

  std::shared_ptr<const Rep> rep_;
};

// A predicate is identified by its name/arity pair; p/1 and p/2 are distinct.
struct PredicateId {
  std::string name;
  std::size_t arity = 0;

  std::string to_string() const {
    return name + "/" + std::to_string(arity);
  }

  friend bool operator==(const PredicateId& a, const PredicateId& b) {
    return a.arity == b.arity && a.name == b.name;
  }
  friend bool operator!=(const PredicateId& a, const PredicateId& b) {
    return !(a == b);
  }
  friend bool operator<(const PredicateId& a, const PredicateId& b) {
    if (a.name != b.name) return a.name < b.name;
    return a.arity < b.arity;
  }
};

class Atom {
 public:
  Atom() = default;  // placeholder value; real atoms carry a predicate
  Atom(std::string predicate, std::vector<Term> args = {});

  const std::string& predicate() const { return predicate_; }
  const std::vector<Term>& args() const { return args_; }
  std::size_t arity() const { return args_.size(); }
  PredicateId pred() const { return PredicateId{predicate_, args_.size()}; }

  bool is_ground() const;
  void collect_variables(std::set<std::string>& out) const;
  std::set<std::string> variables() const;

  std::string to_string() const;

  friend bool operator==(const Atom& a, const Atom& b);
  friend bool operator!=(const Atom& a, const Atom& b) { return !(a == b); }
  friend bool operator<(const Atom& a, const Atom& b) {
    return a.to_string() < b.to_string();
  }
  friend bool operator>(const Atom& a, const Atom& b) { return b < a; }

 private:
  std::string predicate_;
  std::vector<Term> args_;
};

// A definite clause `head | body1, ..., bodyn`. Facts have an empty body.
// Ids are unique within one Program and identify the associated cpd.
struct Clause {
  int id = -1;
  Atom head;
  std::vector<Atom> body;

  bool is_fact() const { return body.empty(); }
  std::string to_string() const;

  friend bool operator==(const Clause& a, const Clause& b) {
    return a.head == b.head && a.body == b.body;
  }
};

// A finite map from variable names to terms. Application replaces every
// occurrence of a bound variable simultaneously; unbound variables are left
// alone. Substitutions produced by unify() are idempotent.
class Substitution {
 public:
  Substitution() = default;

  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }
  const std::map<std::string, Term>& bindings() const { return bindings_; }
  const Term* lookup(const std::string& var) const;

  // Inserts var -> term verbatim. Drops identity bindings. unify() is
  // responsible for keeping its results idempotent.
  void insert(const std::string& var, const Term& term);

  Term apply(const Term& term) const;
  Atom apply(const Atom& atom) const;
  Clause apply(const Clause& clause) const;
  std::vector<Atom> apply(const std::vector<Atom>& atoms) const;

  // compose(s1, s2).apply(e) == s2.apply(s1.apply(e)) for every e.
  friend Substitution compose(const Substitution& first,
                              const Substitution& then);

  std::string to_string() const;

  friend bool operator==(const Substitution& a, const Substitution& b) {
    return a.bindings_ == b.bindings_;
  }

 private:
  std::map<std::string, Term> bindings_;
};

// Most general unifier of two atoms, produced by left-to-right argument
// traversal, with occurs-check. Absent when the atoms do not unify; an
// occurs-check hit counts as failure, not as an error.
std::optional<Substitution> unify(const Atom& a, const Atom& b);
std::optional<Substitution> unify_terms(const Term& a, const Term& b);

// True iff vars(head) is a subset of vars(body). Ground facts pass trivially.
bool check_range_restricted(const Clause& clause);

// Standardizes a clause apart by renaming every variable to a fresh "V#<n>"
// name. '#' cannot appear in source identifiers, so fresh names never collide
// with program variables. The counter is advanced past the names used.
Clause rename_apart(const Clause& clause, int& counter);

}  // namespace blp
