#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "blp/parser.hpp"
#include "blp/proofs.hpp"

namespace blp {

// Conditional probability table for a discrete node. `values` runs over
// (parents..., child) with the first parent varying slowest and the child
// state fastest; parent state counts come from the program's domains.
struct DiscreteTable {
  std::vector<Atom> parents;
  std::vector<double> values;

  friend bool operator==(const DiscreteTable& a, const DiscreteTable& b) {
    return a.parents == b.parents && a.values == b.values;
  }
};

// One Gaussian per discrete-parent configuration: mean is intercept plus a
// weighted sum of the continuous parents (in list order).
struct GaussianEntry {
  double intercept = 0.0;
  std::vector<double> weights;
  double variance = 0.0;

  friend bool operator==(const GaussianEntry& a, const GaussianEntry& b) {
    return a.intercept == b.intercept && a.weights == b.weights &&
           a.variance == b.variance;
  }
};

struct CondGaussian {
  std::vector<Atom> discrete_parents;
  std::vector<Atom> continuous_parents;
  // Indexed over discrete-parent configurations, first parent slowest.
  std::vector<GaussianEntry> entries;

  friend bool operator==(const CondGaussian& a, const CondGaussian& b) {
    return a.discrete_parents == b.discrete_parents &&
           a.continuous_parents == b.continuous_parents &&
           a.entries == b.entries;
  }
};

using Cpd = std::variant<DiscreteTable, CondGaussian>;

// All parents of a cpd; for conditional Gaussians the discrete parents come
// first.
std::vector<Atom> cpd_parents(const Cpd& cpd);

// Resolves predicate domains for ground atoms during combining.
class DomainLookup {
 public:
  explicit DomainLookup(const Program& program) : program_(&program) {}
  const DomainDecl& operator()(const Atom& atom) const {
    return program_->domain(atom);
  }

 private:
  const Program* program_;
};

// A combining rule maps the cpds of all ground clause instances sharing a
// head onto one cpd whose parents are exactly the union of the input parents.
// Inputs arrive with canonically ordered parent lists.
using CombiningRuleFn = std::function<Cpd(
    const Atom& child, const std::vector<Cpd>& inputs, const DomainLookup&)>;

class CombiningRuleRegistry {
 public:
  // identity (alias id), max, noisy_or.
  static CombiningRuleRegistry builtins();

  void add(const std::string& name, CombiningRuleFn rule);
  bool has(const std::string& name) const { return rules_.count(name) > 0; }
  const CombiningRuleFn& get(const std::string& name) const;

 private:
  std::map<std::string, CombiningRuleFn> rules_;
};

// Applies a combining rule. Inputs are first normalized to canonical
// (lexicographic) parent order; the output parent set is checked against the
// union of the input parent sets. Empty inputs yield an empty output.
std::optional<Cpd> combine(const CombiningRuleFn& rule, const Atom& child,
                           std::vector<Cpd> inputs, const DomainLookup& domains);

// Reorders a cpd's parent axes into canonical lexicographic order and
// collapses duplicate parents (a grounding can map two body atoms to the
// same ground atom).
Cpd normalize_cpd(const Atom& child, const Cpd& cpd, const DomainLookup& domains);

struct NetworkNode {
  Atom atom;
  DomainDecl domain;
  Cpd cpd;

  std::vector<Atom> parents() const { return cpd_parents(cpd); }
};

// A finite Bayesian network over ground atoms: acyclic, influence-closed,
// every node's parent list matching its in-edges exactly.
class SupportNetwork {
 public:
  SupportNetwork() = default;
  // Validates closure and acyclicity (CycleError on a cycle).
  explicit SupportNetwork(std::vector<NetworkNode> nodes);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const;
  bool empty() const { return nodes_.empty(); }

  bool contains(const Atom& atom) const { return index_.count(atom) > 0; }
  const NetworkNode& node(const Atom& atom) const;
  // Sorted by canonical atom text.
  const std::vector<NetworkNode>& nodes() const { return nodes_; }

  // Deterministic topological order, lexicographic tie-break.
  const std::vector<Atom>& topological_order() const { return topo_order_; }

  // Node sets of the undirected connected components, each sorted.
  std::vector<std::vector<Atom>> undirected_components() const;

  bool is_discrete() const;    // every node discrete
  bool is_continuous() const;  // every node continuous

 private:
  std::vector<NetworkNode> nodes_;
  std::map<Atom, std::size_t> index_;
  std::vector<Atom> topo_order_;
};

// Builds the support network of the given ground atoms: union solution graph,
// one cpd input per ground clause instance, the head predicate's combining
// rule applied per or-node, and-nodes dissolved into direct edges.
// UndefinedVariableError if any requested atom is unprovable.
SupportNetwork build_support_network(
    const Program& program, const std::vector<Atom>& atoms,
    const ProofLimits& limits = {},
    const CombiningRuleRegistry& registry = CombiningRuleRegistry::builtins());

// As above but over an already computed solution graph; requested atoms must
// all be provable in it.
SupportNetwork support_network_from_graph(const Program& program,
                                          const SolutionGraph& graph,
                                          const std::vector<Atom>& atoms,
                                          const CombiningRuleRegistry& registry);

// Removes every undirected component that contains no query atom (evidence-
// only components are redundant for the query). Query and evidence atoms must
// be nodes of the network.
SupportNetwork prune(const SupportNetwork& network,
                     const std::vector<Atom>& query_atoms,
                     const std::vector<Atom>& evidence_atoms);

}  // namespace blp
