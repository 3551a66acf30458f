#include "blp/netbuild.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <stdexcept>

#include "blp/errors.hpp"

namespace blp {

namespace {

std::size_t config_count(const std::vector<std::size_t>& cards) {
  std::size_t n = 1;
  for (std::size_t c : cards) n *= c;
  return n;
}

// Mixed-radix index with the first position varying slowest.
std::size_t config_index(const std::vector<std::size_t>& cards,
                         const std::vector<std::size_t>& states) {
  std::size_t index = 0;
  for (std::size_t i = 0; i < cards.size(); ++i) {
    index = index * cards[i] + states[i];
  }
  return index;
}

bool next_config(const std::vector<std::size_t>& cards,
                 std::vector<std::size_t>& states) {
  for (std::size_t i = cards.size(); i-- > 0;) {
    if (++states[i] < cards[i]) return true;
    states[i] = 0;
  }
  return false;
}

std::vector<std::size_t> cards_of(const std::vector<Atom>& atoms,
                                  const DomainLookup& domains) {
  std::vector<std::size_t> cards;
  cards.reserve(atoms.size());
  for (const Atom& atom : atoms) cards.push_back(domains(atom).state_count());
  return cards;
}

// Sorted, duplicate-free copy plus, per original position, the index of its
// representative in the result.
std::pair<std::vector<Atom>, std::vector<std::size_t>> canonical_parents(
    const std::vector<Atom>& parents) {
  std::vector<Atom> unique = parents;
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  std::vector<std::size_t> position(parents.size());
  for (std::size_t i = 0; i < parents.size(); ++i) {
    position[i] = static_cast<std::size_t>(
        std::lower_bound(unique.begin(), unique.end(), parents[i]) -
        unique.begin());
  }
  return {std::move(unique), std::move(position)};
}

DiscreteTable normalize_discrete(const Atom& child, const DiscreteTable& cpd,
                                 const DomainLookup& domains) {
  auto [unique, position] = canonical_parents(cpd.parents);
  if (unique == cpd.parents) return cpd;

  std::size_t child_card = domains(child).state_count();
  std::vector<std::size_t> old_cards = cards_of(cpd.parents, domains);
  std::vector<std::size_t> new_cards = cards_of(unique, domains);

  DiscreteTable out;
  out.parents = unique;
  out.values.resize(config_count(new_cards) * child_card);
  std::vector<std::size_t> states(unique.size(), 0);
  std::size_t new_config = 0;
  do {
    std::vector<std::size_t> old_states(cpd.parents.size());
    for (std::size_t i = 0; i < cpd.parents.size(); ++i) {
      old_states[i] = states[position[i]];
    }
    std::size_t old_config = config_index(old_cards, old_states);
    for (std::size_t s = 0; s < child_card; ++s) {
      out.values[new_config * child_card + s] =
          cpd.values[old_config * child_card + s];
    }
    ++new_config;
  } while (!states.empty() && next_config(new_cards, states));
  return out;
}

CondGaussian normalize_gaussian(const CondGaussian& cpd,
                                const DomainLookup& domains) {
  auto [unique_discrete, discrete_position] =
      canonical_parents(cpd.discrete_parents);
  auto [unique_continuous, continuous_position] =
      canonical_parents(cpd.continuous_parents);
  if (unique_discrete == cpd.discrete_parents &&
      unique_continuous == cpd.continuous_parents) {
    return cpd;
  }

  std::vector<std::size_t> old_cards = cards_of(cpd.discrete_parents, domains);
  std::vector<std::size_t> new_cards = cards_of(unique_discrete, domains);

  CondGaussian out;
  out.discrete_parents = unique_discrete;
  out.continuous_parents = unique_continuous;
  out.entries.resize(config_count(new_cards));
  std::vector<std::size_t> states(unique_discrete.size(), 0);
  std::size_t new_config = 0;
  do {
    std::vector<std::size_t> old_states(cpd.discrete_parents.size());
    for (std::size_t i = 0; i < cpd.discrete_parents.size(); ++i) {
      old_states[i] = states[discrete_position[i]];
    }
    const GaussianEntry& entry =
        cpd.entries[config_index(old_cards, old_states)];
    GaussianEntry remapped;
    remapped.intercept = entry.intercept;
    remapped.variance = entry.variance;
    remapped.weights.assign(unique_continuous.size(), 0.0);
    for (std::size_t i = 0; i < cpd.continuous_parents.size(); ++i) {
      remapped.weights[continuous_position[i]] += entry.weights[i];
    }
    out.entries[new_config] = std::move(remapped);
    ++new_config;
  } while (!states.empty() && next_config(new_cards, states));
  return out;
}

// Distribution of `table`'s child for one joint state of `joint_parents`,
// where the input conditions only on its own parents.
std::vector<double> project_row(const DiscreteTable& table,
                                std::size_t child_card,
                                const std::vector<Atom>& joint_parents,
                                const std::vector<std::size_t>& joint_states,
                                const DomainLookup& domains) {
  std::vector<std::size_t> own_states(table.parents.size());
  for (std::size_t i = 0; i < table.parents.size(); ++i) {
    auto it = std::lower_bound(joint_parents.begin(), joint_parents.end(),
                               table.parents[i]);
    own_states[i] =
        joint_states[static_cast<std::size_t>(it - joint_parents.begin())];
  }
  std::size_t offset =
      config_index(cards_of(table.parents, domains), own_states) * child_card;
  std::vector<double> row(child_card);
  for (std::size_t s = 0; s < child_card; ++s) {
    row[s] = table.values[offset + s];
  }
  return row;
}

std::vector<Atom> union_parents(const std::vector<Cpd>& inputs) {
  std::set<Atom> all;
  for (const Cpd& cpd : inputs) {
    for (const Atom& atom : cpd_parents(cpd)) all.insert(atom);
  }
  return std::vector<Atom>(all.begin(), all.end());
}

const DiscreteTable& require_discrete(const Atom& child, const Cpd& cpd,
                                      const char* rule) {
  const DiscreteTable* table = std::get_if<DiscreteTable>(&cpd);
  if (!table) {
    throw DomainError(std::string(rule) + " cannot combine Gaussian inputs of " +
                      child.to_string());
  }
  return *table;
}

Cpd rule_identity(const Atom& child, const std::vector<Cpd>& inputs,
                  const DomainLookup&) {
  if (inputs.size() != 1) {
    throw RuleArityError("identity combining rule for " + child.to_string() +
                         " needs exactly one ground clause instance, got " +
                         std::to_string(inputs.size()));
  }
  return inputs.front();
}

// Per joint parent configuration, selects the maximal input density under
// lexicographic comparison in declared child-state order. On the 0/1 tables
// of the logical embedding this reproduces disjunction.
Cpd rule_max(const Atom& child, const std::vector<Cpd>& inputs,
             const DomainLookup& domains) {
  std::size_t child_card = domains(child).state_count();
  std::vector<const DiscreteTable*> tables;
  for (const Cpd& cpd : inputs) {
    tables.push_back(&require_discrete(child, cpd, "max"));
  }
  DiscreteTable out;
  out.parents = union_parents(inputs);
  std::vector<std::size_t> cards = cards_of(out.parents, domains);
  out.values.resize(config_count(cards) * child_card);
  std::vector<std::size_t> states(out.parents.size(), 0);
  std::size_t config = 0;
  do {
    std::vector<double> best;
    for (const DiscreteTable* table : tables) {
      std::vector<double> row =
          project_row(*table, child_card, out.parents, states, domains);
      if (best.empty() || std::lexicographical_compare(
                              best.begin(), best.end(), row.begin(), row.end())) {
        best = std::move(row);
      }
    }
    for (std::size_t s = 0; s < child_card; ++s) {
      out.values[config * child_card + s] = best[s];
    }
    ++config;
  } while (!states.empty() && next_config(cards, states));
  return out;
}

Cpd rule_noisy_or(const Atom& child, const std::vector<Cpd>& inputs,
                  const DomainLookup& domains) {
  const DomainDecl& child_domain = domains(child);
  if (!child_domain.is_boolean()) {
    throw DomainError("noisy_or requires a {true,false} child domain, " +
                      child.to_string() + " has domain " +
                      child_domain.pred.to_string());
  }
  std::size_t child_true = child_domain.state_index("true");
  std::size_t child_false = child_domain.state_index("false");

  // Per input: its single boolean parent and the inhibition
  // 1 - p(child=true | parent=true).
  std::vector<std::pair<Atom, double>> causes;
  for (const Cpd& cpd : inputs) {
    const DiscreteTable& table = require_discrete(child, cpd, "noisy_or");
    if (table.parents.size() != 1) {
      throw DomainError("noisy_or inputs for " + child.to_string() +
                        " must have exactly one parent, got " +
                        std::to_string(table.parents.size()));
    }
    const Atom& parent = table.parents.front();
    const DomainDecl& parent_domain = domains(parent);
    if (!parent_domain.is_boolean()) {
      throw DomainError("noisy_or parent " + parent.to_string() +
                        " must have a {true,false} domain");
    }
    std::size_t parent_true = parent_domain.state_index("true");
    double activation = table.values[parent_true * 2 + child_true];
    causes.emplace_back(parent, 1.0 - activation);
  }
  // Multiply inhibitions in a fixed order, so the result is bit-identical
  // for any input ordering of the multiset.
  std::sort(causes.begin(), causes.end());

  DiscreteTable out;
  out.parents = union_parents(inputs);
  std::vector<std::size_t> cards = cards_of(out.parents, domains);
  out.values.resize(config_count(cards) * 2);
  std::vector<std::size_t> states(out.parents.size(), 0);
  std::size_t config = 0;
  do {
    double inhibition = 1.0;
    for (const auto& [parent, q] : causes) {
      auto it =
          std::lower_bound(out.parents.begin(), out.parents.end(), parent);
      std::size_t pos = static_cast<std::size_t>(it - out.parents.begin());
      std::size_t parent_true = domains(parent).state_index("true");
      if (states[pos] == parent_true) inhibition *= q;
    }
    out.values[config * 2 + child_false] = inhibition;
    out.values[config * 2 + child_true] = 1.0 - inhibition;
    ++config;
  } while (!states.empty() && next_config(cards, states));
  return out;
}

}  // namespace

std::vector<Atom> cpd_parents(const Cpd& cpd) {
  if (const DiscreteTable* table = std::get_if<DiscreteTable>(&cpd)) {
    return table->parents;
  }
  const CondGaussian& gaussian = std::get<CondGaussian>(cpd);
  std::vector<Atom> out = gaussian.discrete_parents;
  out.insert(out.end(), gaussian.continuous_parents.begin(),
             gaussian.continuous_parents.end());
  return out;
}

Cpd normalize_cpd(const Atom& child, const Cpd& cpd,
                  const DomainLookup& domains) {
  if (const DiscreteTable* table = std::get_if<DiscreteTable>(&cpd)) {
    return normalize_discrete(child, *table, domains);
  }
  return normalize_gaussian(std::get<CondGaussian>(cpd), domains);
}

CombiningRuleRegistry CombiningRuleRegistry::builtins() {
  CombiningRuleRegistry registry;
  registry.add("identity", rule_identity);
  registry.add("id", rule_identity);
  registry.add("max", rule_max);
  registry.add("noisy_or", rule_noisy_or);
  return registry;
}

void CombiningRuleRegistry::add(const std::string& name, CombiningRuleFn rule) {
  rules_[name] = std::move(rule);
}

const CombiningRuleFn& CombiningRuleRegistry::get(const std::string& name) const {
  auto it = rules_.find(name);
  if (it == rules_.end()) {
    throw UnknownRuleError("unknown combining rule '" + name + "'");
  }
  return it->second;
}

std::optional<Cpd> combine(const CombiningRuleFn& rule, const Atom& child,
                           std::vector<Cpd> inputs,
                           const DomainLookup& domains) {
  if (inputs.empty()) return std::nullopt;
  for (Cpd& cpd : inputs) cpd = normalize_cpd(child, cpd, domains);
  std::vector<Atom> expected = union_parents(inputs);
  Cpd combined = normalize_cpd(child, rule(child, inputs, domains), domains);
  std::vector<Atom> got = cpd_parents(combined);
  std::sort(got.begin(), got.end());
  if (got != expected) {
    throw DomainError("combining rule output for " + child.to_string() +
                      " does not condition on the union of input parents");
  }
  return combined;
}

SupportNetwork::SupportNetwork(std::vector<NetworkNode> nodes)
    : nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end(),
            [](const NetworkNode& a, const NetworkNode& b) {
              return a.atom < b.atom;
            });
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!index_.emplace(nodes_[i].atom, i).second) {
      throw ValidationError("duplicate network node " +
                            nodes_[i].atom.to_string());
    }
  }
  for (const NetworkNode& node : nodes_) {
    for (const Atom& parent : node.parents()) {
      if (!index_.count(parent)) {
        throw ValidationError("network is not influence-closed: parent " +
                              parent.to_string() + " of " +
                              node.atom.to_string() + " is missing");
      }
    }
  }
  // Kahn's algorithm with a lexicographic min-heap for a deterministic order.
  std::map<Atom, std::vector<Atom>> children;
  std::map<Atom, std::size_t> pending;
  for (const NetworkNode& node : nodes_) pending[node.atom] = 0;
  for (const NetworkNode& node : nodes_) {
    for (const Atom& parent : node.parents()) {
      children[parent].push_back(node.atom);
      ++pending[node.atom];
    }
  }
  std::priority_queue<Atom, std::vector<Atom>, std::greater<Atom>> ready;
  for (const auto& [atom, count] : pending) {
    if (count == 0) ready.push(atom);
  }
  while (!ready.empty()) {
    Atom atom = ready.top();
    ready.pop();
    topo_order_.push_back(atom);
    auto it = children.find(atom);
    if (it == children.end()) continue;
    for (const Atom& child : it->second) {
      if (--pending[child] == 0) ready.push(child);
    }
  }
  if (topo_order_.size() != nodes_.size()) {
    throw CycleError("support network contains a directed cycle");
  }
}

std::size_t SupportNetwork::edge_count() const {
  std::size_t count = 0;
  for (const NetworkNode& node : nodes_) count += node.parents().size();
  return count;
}

const NetworkNode& SupportNetwork::node(const Atom& atom) const {
  auto it = index_.find(atom);
  if (it == index_.end()) {
    throw std::out_of_range("no network node " + atom.to_string());
  }
  return nodes_[it->second];
}

std::vector<std::vector<Atom>> SupportNetwork::undirected_components() const {
  std::map<Atom, std::vector<Atom>> neighbors;
  for (const NetworkNode& node : nodes_) {
    for (const Atom& parent : node.parents()) {
      neighbors[parent].push_back(node.atom);
      neighbors[node.atom].push_back(parent);
    }
  }
  std::set<Atom> visited;
  std::vector<std::vector<Atom>> components;
  for (const NetworkNode& node : nodes_) {
    if (visited.count(node.atom)) continue;
    std::vector<Atom> component;
    std::vector<Atom> frontier{node.atom};
    visited.insert(node.atom);
    while (!frontier.empty()) {
      Atom current = frontier.back();
      frontier.pop_back();
      component.push_back(current);
      auto it = neighbors.find(current);
      if (it == neighbors.end()) continue;
      for (const Atom& next : it->second) {
        if (visited.insert(next).second) frontier.push_back(next);
      }
    }
    std::sort(component.begin(), component.end());
    components.push_back(std::move(component));
  }
  return components;
}

bool SupportNetwork::is_discrete() const {
  for (const NetworkNode& node : nodes_) {
    if (!node.domain.is_discrete()) return false;
  }
  return true;
}

bool SupportNetwork::is_continuous() const {
  for (const NetworkNode& node : nodes_) {
    if (!node.domain.is_continuous()) return false;
  }
  return true;
}

namespace {

// Builds the cpd contributed by one ground clause instance. Body atoms map
// positionally onto the instance's ground body.
Cpd instance_cpd(const Program& program, const SolutionGraph::AndNode& instance) {
  const Clause& clause = program.clause(instance.clause_id);
  const CpdDecl& decl = program.cpd(instance.clause_id);
  if (decl.is_discrete()) {
    DiscreteTable table;
    table.parents = instance.body;
    table.values = decl.table();
    return table;
  }
  CondGaussian gaussian;
  std::vector<std::size_t> continuous_positions;
  for (std::size_t i = 0; i < clause.body.size(); ++i) {
    if (program.domain(clause.body[i]).is_discrete()) {
      gaussian.discrete_parents.push_back(instance.body[i]);
    } else {
      gaussian.continuous_parents.push_back(instance.body[i]);
      continuous_positions.push_back(i);
    }
  }
  for (const NormalSpec& spec : decl.normals()) {
    GaussianEntry entry;
    entry.intercept = spec.mean.intercept;
    entry.variance = spec.variance;
    entry.weights.assign(gaussian.continuous_parents.size(), 0.0);
    for (const auto& [atom, weight] : spec.mean.terms) {
      // First matching continuous body atom; duplicates of the same ground
      // parent are merged later by normalization.
      for (std::size_t j = 0; j < continuous_positions.size(); ++j) {
        if (clause.body[continuous_positions[j]] == atom) {
          entry.weights[j] += weight;
          break;
        }
      }
    }
    gaussian.entries.push_back(std::move(entry));
  }
  return gaussian;
}

}  // namespace

SupportNetwork support_network_from_graph(const Program& program,
                                          const SolutionGraph& graph,
                                          const std::vector<Atom>& atoms,
                                          const CombiningRuleRegistry& registry) {
  for (const Atom& atom : atoms) {
    if (!graph.has_or_node(atom) || graph.and_children(atom).empty()) {
      throw UndefinedVariableError(
          atom.to_string() +
          " is not a proper random variable (empty solution graph); "
          "the answer to the query is undefined");
    }
  }
  DomainLookup domains(program);
  std::vector<NetworkNode> nodes;
  for (const auto& [atom, and_children] : graph.or_nodes()) {
    if (and_children.empty()) {
      throw std::logic_error("or node " + atom.to_string() +
                             " has no proof in the solution graph");
    }
    std::vector<Cpd> inputs;
    for (std::size_t and_id : and_children) {
      inputs.push_back(instance_cpd(program, graph.and_nodes()[and_id]));
    }
    const CombiningRuleFn& rule = registry.get(program.rule(atom.pred()));
    std::optional<Cpd> combined = combine(rule, atom, std::move(inputs), domains);
    NetworkNode node{atom, program.domain(atom), std::move(*combined)};
    nodes.push_back(std::move(node));
  }
  return SupportNetwork(std::move(nodes));
}

SupportNetwork build_support_network(const Program& program,
                                     const std::vector<Atom>& atoms,
                                     const ProofLimits& limits,
                                     const CombiningRuleRegistry& registry) {
  SolutionGraph graph = solution_graph(program, atoms, limits);
  return support_network_from_graph(program, graph, atoms, registry);
}

SupportNetwork prune(const SupportNetwork& network,
                     const std::vector<Atom>& query_atoms,
                     const std::vector<Atom>& evidence_atoms) {
  for (const Atom& atom : query_atoms) {
    if (!network.contains(atom)) {
      throw ValidationError("query atom " + atom.to_string() +
                            " is not a network node");
    }
  }
  for (const Atom& atom : evidence_atoms) {
    if (!network.contains(atom)) {
      throw ValidationError("evidence atom " + atom.to_string() +
                            " is not a network node");
    }
  }
  std::set<Atom> keep;
  for (const std::vector<Atom>& component : network.undirected_components()) {
    bool has_query = false;
    for (const Atom& atom : query_atoms) {
      if (std::binary_search(component.begin(), component.end(), atom)) {
        has_query = true;
        break;
      }
    }
    if (has_query) keep.insert(component.begin(), component.end());
  }
  std::vector<NetworkNode> nodes;
  for (const NetworkNode& node : network.nodes()) {
    if (keep.count(node.atom)) nodes.push_back(node);
  }
  return SupportNetwork(std::move(nodes));
}

}  // namespace blp
