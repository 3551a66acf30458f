#pragma once

#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "blp/kernel.hpp"

namespace blp {

// Domain declaration for one Bayesian predicate. Discrete predicates carry a
// non-empty, duplicate-free state list; continuous predicates range over the
// reals.
struct DomainDecl {
  enum class Kind { Discrete, Continuous };

  PredicateId pred;
  Kind kind = Kind::Discrete;
  std::vector<std::string> states;

  bool is_discrete() const { return kind == Kind::Discrete; }
  bool is_continuous() const { return kind == Kind::Continuous; }
  std::size_t state_count() const { return states.size(); }
  // Index of a state name, or npos.
  std::size_t state_index(const std::string& state) const;
  // True for a two-state {true,false} domain in either order.
  bool is_boolean() const;

  friend bool operator==(const DomainDecl& a, const DomainDecl& b) {
    return a.pred == b.pred && a.kind == b.kind && a.states == b.states;
  }
};

// Linear mean expression over continuous body atoms of a clause:
// intercept + sum(coefficient * atom). Atoms are the clause's body atoms as
// written (possibly with variables); grounding happens per clause instance.
struct MeanExpr {
  double intercept = 0.0;
  std::vector<std::pair<Atom, double>> terms;

  friend bool operator==(const MeanExpr& a, const MeanExpr& b);
};

struct NormalSpec {
  MeanExpr mean;
  double variance = 0.0;

  friend bool operator==(const NormalSpec& a, const NormalSpec& b) {
    return a.variance == b.variance && a.mean == b.mean;
  }
};

// Conditional density payload for one clause. Discrete children carry a flat
// probability table (child states vary fastest, the first body atom slowest);
// continuous children carry one Gaussian spec per discrete-parent
// configuration in the same enumeration order.
struct CpdDecl {
  std::variant<std::vector<double>, std::vector<NormalSpec>> payload;

  bool is_discrete() const {
    return std::holds_alternative<std::vector<double>>(payload);
  }
  const std::vector<double>& table() const {
    return std::get<std::vector<double>>(payload);
  }
  const std::vector<NormalSpec>& normals() const {
    return std::get<std::vector<NormalSpec>>(payload);
  }

  friend bool operator==(const CpdDecl& a, const CpdDecl& b) {
    return a.payload == b.payload;
  }
};

// A parsed and validated Bayesian logic program.
class Program {
 public:
  Program() = default;
  Program(std::vector<Clause> clauses, std::map<PredicateId, DomainDecl> domains,
          std::map<PredicateId, std::string> rules, std::map<int, CpdDecl> cpds,
          std::set<PredicateId> closed_world);

  const std::vector<Clause>& clauses() const { return clauses_; }
  const std::map<PredicateId, DomainDecl>& domains() const { return domains_; }
  const std::map<PredicateId, std::string>& rules() const { return rules_; }
  const std::map<int, CpdDecl>& cpds() const { return cpds_; }
  const std::set<PredicateId>& closed_world() const { return closed_world_; }

  const Clause& clause(int id) const;
  const DomainDecl& domain(const PredicateId& pred) const;
  const DomainDecl& domain(const Atom& atom) const;
  const std::string& rule(const PredicateId& pred) const;
  const CpdDecl& cpd(int clause_id) const;

  // Clauses grouped by head predicate, in program order.
  std::vector<const Clause*> clauses_for(const PredicateId& pred) const;

  // Source form; parsing it back yields a structurally equal Program.
  std::string pretty() const;

  friend bool operator==(const Program& a, const Program& b);

 private:
  std::vector<Clause> clauses_;
  std::map<PredicateId, DomainDecl> domains_;
  std::map<PredicateId, std::string> rules_;
  std::map<int, CpdDecl> cpds_;
  std::set<PredicateId> closed_world_;
};

// Evidence values are either a discrete state name or a real number,
// type-checked against the atom's declared domain.
using EvidenceValue = std::variant<std::string, double>;

struct Query {
  std::vector<Atom> atoms;
  std::vector<std::pair<Atom, EvidenceValue>> evidence;
};

// Parses a .blp source text and validates every Program invariant: domains
// unique and well-formed, all clauses range-restricted, exactly one cpd per
// clause, cpd shapes and row sums consistent with the declared domains.
Program parse_program(const std::string& source);

// Parses "q1,...,qn" or "q1,...,qn | e1=v1,...,em=vm". All atoms must be
// ground; evidence values must type-check against the atom's domain.
Query parse_query(const Program& program, const std::string& text);

}  // namespace blp
