#include "blp/infer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include "blp/errors.hpp"

namespace blp {

namespace {

constexpr double kMinNormalizer = 1e-300;
constexpr double kZeroVariance = 1e-12;
constexpr double kEvidenceSlack = 1e-6;

std::size_t product(const std::vector<std::size_t>& cards) {
  std::size_t n = 1;
  for (std::size_t c : cards) n *= c;
  return n;
}

bool next_state(const std::vector<std::size_t>& cards,
                std::vector<std::size_t>& states) {
  for (std::size_t i = cards.size(); i-- > 0;) {
    if (++states[i] < cards[i]) return true;
    states[i] = 0;
  }
  return false;
}

}  // namespace

Factor::Factor() : values_{1.0} {}

Factor::Factor(std::vector<Atom> variables,
               std::vector<std::size_t> cardinalities,
               std::vector<double> values)
    : variables_(std::move(variables)),
      cardinalities_(std::move(cardinalities)),
      values_(std::move(values)) {
  if (variables_.size() != cardinalities_.size()) {
    throw std::invalid_argument("factor variable/cardinality mismatch");
  }
  if (values_.size() != product(cardinalities_)) {
    throw std::invalid_argument("factor table size mismatch");
  }
}

bool Factor::has_variable(const Atom& atom) const {
  return std::find(variables_.begin(), variables_.end(), atom) !=
         variables_.end();
}

double Factor::value_at(const std::vector<std::size_t>& states) const {
  std::size_t index = 0;
  for (std::size_t i = 0; i < cardinalities_.size(); ++i) {
    index = index * cardinalities_[i] + states[i];
  }
  return values_[index];
}

Factor Factor::multiply(const Factor& other) const {
  // Sorted union keeps products deterministic regardless of argument order.
  std::vector<Atom> joint = variables_;
  std::vector<std::size_t> joint_cards = cardinalities_;
  for (std::size_t i = 0; i < other.variables_.size(); ++i) {
    if (!has_variable(other.variables_[i])) {
      joint.push_back(other.variables_[i]);
      joint_cards.push_back(other.cardinalities_[i]);
    }
  }
  std::vector<std::size_t> order(joint.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return joint[a] < joint[b]; });
  std::vector<Atom> vars;
  std::vector<std::size_t> cards;
  for (std::size_t i : order) {
    vars.push_back(joint[i]);
    cards.push_back(joint_cards[i]);
  }

  auto positions = [&](const std::vector<Atom>& sub) {
    std::vector<std::size_t> pos;
    for (const Atom& atom : sub) {
      pos.push_back(static_cast<std::size_t>(
          std::find(vars.begin(), vars.end(), atom) - vars.begin()));
    }
    return pos;
  };
  std::vector<std::size_t> left_pos = positions(variables_);
  std::vector<std::size_t> right_pos = positions(other.variables_);

  std::vector<double> values(product(cards));
  std::vector<std::size_t> states(vars.size(), 0);
  std::vector<std::size_t> left_states(variables_.size());
  std::vector<std::size_t> right_states(other.variables_.size());
  std::size_t index = 0;
  do {
    for (std::size_t i = 0; i < left_pos.size(); ++i) {
      left_states[i] = states[left_pos[i]];
    }
    for (std::size_t i = 0; i < right_pos.size(); ++i) {
      right_states[i] = states[right_pos[i]];
    }
    values[index++] = value_at(left_states) * other.value_at(right_states);
  } while (!states.empty() && next_state(cards, states));
  if (vars.empty()) values[0] = values_[0] * other.values_[0];
  return Factor(std::move(vars), std::move(cards), std::move(values));
}

Factor Factor::marginalize_out(const Atom& variable) const {
  auto it = std::find(variables_.begin(), variables_.end(), variable);
  if (it == variables_.end()) return *this;
  std::size_t axis = static_cast<std::size_t>(it - variables_.begin());
  std::vector<Atom> vars;
  std::vector<std::size_t> cards;
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (i == axis) continue;
    vars.push_back(variables_[i]);
    cards.push_back(cardinalities_[i]);
  }
  std::vector<double> values(product(cards), 0.0);
  std::vector<std::size_t> states(variables_.size(), 0);
  std::size_t index = 0;
  do {
    std::size_t out_index = 0;
    for (std::size_t i = 0; i < variables_.size(); ++i) {
      if (i == axis) continue;
      out_index = out_index * cardinalities_[i] + states[i];
    }
    values[out_index] += values_[index++];
  } while (!states.empty() && next_state(cardinalities_, states));
  return Factor(std::move(vars), std::move(cards), std::move(values));
}

Factor Factor::restrict_to(const Atom& variable, std::size_t state) const {
  auto it = std::find(variables_.begin(), variables_.end(), variable);
  if (it == variables_.end()) return *this;
  std::size_t axis = static_cast<std::size_t>(it - variables_.begin());
  std::vector<Atom> vars;
  std::vector<std::size_t> cards;
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (i == axis) continue;
    vars.push_back(variables_[i]);
    cards.push_back(cardinalities_[i]);
  }
  std::vector<double> values;
  values.reserve(product(cards));
  std::vector<std::size_t> states(variables_.size(), 0);
  std::size_t index = 0;
  do {
    if (states[axis] == state) values.push_back(values_[index]);
    ++index;
  } while (!states.empty() && next_state(cardinalities_, states));
  return Factor(std::move(vars), std::move(cards), std::move(values));
}

Factor Factor::reorder(const std::vector<Atom>& order) const {
  if (order == variables_) return *this;
  std::vector<std::size_t> source(order.size());
  std::vector<std::size_t> cards(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto it = std::find(variables_.begin(), variables_.end(), order[i]);
    if (it == variables_.end()) {
      throw std::invalid_argument("reorder variable not in factor");
    }
    source[i] = static_cast<std::size_t>(it - variables_.begin());
    cards[i] = cardinalities_[source[i]];
  }
  if (order.size() != variables_.size()) {
    throw std::invalid_argument("reorder must keep all variables");
  }
  std::vector<double> values(values_.size());
  std::vector<std::size_t> states(order.size(), 0);
  std::vector<std::size_t> original(order.size());
  std::size_t index = 0;
  do {
    for (std::size_t i = 0; i < order.size(); ++i) {
      original[source[i]] = states[i];
    }
    values[index++] = value_at(original);
  } while (!states.empty() && next_state(cards, states));
  return Factor(order, std::move(cards), std::move(values));
}

double Factor::sum() const {
  double total = 0.0;
  for (double v : values_) total += v;
  return total;
}

void Factor::normalize() {
  double total = sum();
  if (!(total > kMinNormalizer)) {
    throw InconsistentEvidenceError(
        "evidence has probability 0 (normalizer " + std::to_string(total) +
        ")");
  }
  for (double& v : values_) v /= total;
}

namespace {

const DiscreteTable& discrete_cpd(const NetworkNode& node) {
  const DiscreteTable* table = std::get_if<DiscreteTable>(&node.cpd);
  if (!table) {
    throw TypeError("node " + node.atom.to_string() + " is not discrete");
  }
  return *table;
}

// p(child = state | parents as assigned) for a discrete node.
double cpd_value(const SupportNetwork& network, const NetworkNode& node,
                 const std::map<Atom, std::size_t>& assignment) {
  const DiscreteTable& table = discrete_cpd(node);
  std::size_t child_card = node.domain.state_count();
  std::size_t index = 0;
  for (const Atom& parent : table.parents) {
    index = index * network.node(parent).domain.state_count() +
            assignment.at(parent);
  }
  return table.values[index * child_card + assignment.at(node.atom)];
}

Factor node_factor(const SupportNetwork& network, const NetworkNode& node) {
  const DiscreteTable& table = discrete_cpd(node);
  std::vector<Atom> vars = table.parents;
  vars.push_back(node.atom);
  std::vector<std::size_t> cards;
  for (const Atom& parent : table.parents) {
    cards.push_back(network.node(parent).domain.state_count());
  }
  cards.push_back(node.domain.state_count());
  return Factor(std::move(vars), std::move(cards), table.values);
}

std::size_t state_index_or_throw(const DomainDecl& domain,
                                 const Atom& atom, const std::string& state) {
  std::size_t index = domain.state_index(state);
  if (index == static_cast<std::size_t>(-1)) {
    throw TypeError("state '" + state + "' is not in the domain of " +
                    atom.to_string());
  }
  return index;
}

}  // namespace

Factor enumerate_joint(const SupportNetwork& network,
                       std::size_t max_joint_states) {
  std::vector<Atom> vars;
  std::vector<std::size_t> cards;
  std::size_t total = 1;
  for (const NetworkNode& node : network.nodes()) {
    if (!node.domain.is_discrete()) {
      throw TypeError("enumerate_joint requires a discrete network, " +
                      node.atom.to_string() + " is continuous");
    }
    vars.push_back(node.atom);
    cards.push_back(node.domain.state_count());
    if (total > max_joint_states / std::max<std::size_t>(1, node.domain.state_count())) {
      throw ResourceExceeded("joint state space exceeds " +
                             std::to_string(max_joint_states));
    }
    total *= node.domain.state_count();
  }
  std::vector<double> values(total, 1.0);
  std::vector<std::size_t> states(vars.size(), 0);
  std::map<Atom, std::size_t> assignment;
  std::size_t index = 0;
  do {
    for (std::size_t i = 0; i < vars.size(); ++i) assignment[vars[i]] = states[i];
    double p = 1.0;
    for (const NetworkNode& node : network.nodes()) {
      p *= cpd_value(network, node, assignment);
    }
    values[index++] = p;
  } while (!states.empty() && next_state(cards, states));
  if (vars.empty()) values = {1.0};
  return Factor(std::move(vars), std::move(cards), std::move(values));
}

Factor variable_elimination(const SupportNetwork& network,
                            const std::vector<Atom>& query,
                            const DiscreteEvidence& evidence) {
  if (!network.is_discrete()) {
    throw TypeError("variable elimination requires an all-discrete network");
  }
  for (const Atom& atom : query) network.node(atom);
  std::map<Atom, std::size_t> observed;
  for (const auto& [atom, state] : evidence) {
    observed[atom] =
        state_index_or_throw(network.node(atom).domain, atom, state);
  }

  std::vector<Factor> factors;
  for (const NetworkNode& node : network.nodes()) {
    Factor factor = node_factor(network, node);
    for (const auto& [atom, state] : observed) {
      factor = factor.restrict_to(atom, state);
    }
    factors.push_back(std::move(factor));
  }

  // Query atoms that are themselves observed re-enter at the end as point
  // masses; they take no part in elimination.
  std::set<Atom> keep;
  for (const Atom& atom : query) {
    if (!observed.count(atom)) keep.insert(atom);
  }

  std::set<Atom> to_eliminate;
  for (const Factor& factor : factors) {
    for (const Atom& atom : factor.variables()) {
      if (!keep.count(atom)) to_eliminate.insert(atom);
    }
  }

  while (!to_eliminate.empty()) {
    // Min-degree: fewest distinct neighbors in the current factor graph.
    std::map<Atom, std::set<Atom>> neighbors;
    for (const Factor& factor : factors) {
      for (const Atom& a : factor.variables()) {
        for (const Atom& b : factor.variables()) {
          if (!(a == b)) neighbors[a].insert(b);
        }
      }
    }
    const Atom* best = nullptr;
    std::size_t best_degree = 0;
    for (const Atom& candidate : to_eliminate) {
      std::size_t degree = neighbors[candidate].size();
      if (!best || degree < best_degree ||
          (degree == best_degree && candidate < *best)) {
        best = &candidate;
        best_degree = degree;
      }
    }
    Atom victim = *best;
    to_eliminate.erase(victim);

    Factor joined;
    std::vector<Factor> rest;
    for (Factor& factor : factors) {
      if (factor.has_variable(victim)) {
        joined = joined.multiply(factor);
      } else {
        rest.push_back(std::move(factor));
      }
    }
    rest.push_back(joined.marginalize_out(victim));
    factors = std::move(rest);
  }

  Factor result;
  for (const Factor& factor : factors) result = result.multiply(factor);
  result.normalize();

  // Restore observed query variables as point masses.
  for (const Atom& atom : query) {
    auto it = observed.find(atom);
    if (it == observed.end()) continue;
    std::size_t card = network.node(atom).domain.state_count();
    std::vector<double> point(card, 0.0);
    point[it->second] = 1.0;
    result = result.multiply(Factor({atom}, {card}, std::move(point)));
  }
  return result.reorder(query);
}

double GaussianBelief::mean_of(const Atom& atom) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i] == atom) return mean[i];
  }
  throw std::out_of_range("no variable " + atom.to_string());
}

double GaussianBelief::variance_of(const Atom& atom) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i] == atom) return covariance[i][i];
  }
  throw std::out_of_range("no variable " + atom.to_string());
}

namespace {

// Linear-Gaussian view of (a slice of) a network: per node an intercept,
// noise variance and weights over continuous parents.
struct LinearGaussianSystem {
  std::vector<Atom> variables;  // topological order
  std::map<Atom, std::size_t> index;
  std::vector<double> intercept;
  std::vector<double> noise;
  std::vector<std::vector<std::pair<std::size_t, double>>> parent_weights;
};

// Selects the Gaussian entry of a node for a joint discrete configuration
// (empty for pure linear-Gaussian networks).
const GaussianEntry& entry_for(const SupportNetwork& network,
                               const CondGaussian& cpd,
                               const std::map<Atom, std::size_t>& config) {
  std::size_t index = 0;
  for (const Atom& parent : cpd.discrete_parents) {
    index = index * network.node(parent).domain.state_count() +
            config.at(parent);
  }
  return cpd.entries[index];
}

LinearGaussianSystem linear_system(const SupportNetwork& network,
                                   const std::map<Atom, std::size_t>& config) {
  LinearGaussianSystem system;
  for (const Atom& atom : network.topological_order()) {
    const NetworkNode& node = network.node(atom);
    if (!node.domain.is_continuous()) continue;
    system.index[atom] = system.variables.size();
    system.variables.push_back(atom);
  }
  system.intercept.resize(system.variables.size());
  system.noise.resize(system.variables.size());
  system.parent_weights.resize(system.variables.size());
  for (std::size_t i = 0; i < system.variables.size(); ++i) {
    const NetworkNode& node = network.node(system.variables[i]);
    const CondGaussian* cpd = std::get_if<CondGaussian>(&node.cpd);
    if (!cpd) {
      throw TypeError("continuous node " + node.atom.to_string() +
                      " lacks a Gaussian cpd");
    }
    const GaussianEntry& entry = entry_for(network, *cpd, config);
    system.intercept[i] = entry.intercept;
    system.noise[i] = entry.variance;
    for (std::size_t j = 0; j < cpd->continuous_parents.size(); ++j) {
      system.parent_weights[i].emplace_back(
          system.index.at(cpd->continuous_parents[j]), entry.weights[j]);
    }
  }
  return system;
}

GaussianBelief joint_moments(const LinearGaussianSystem& system) {
  std::size_t n = system.variables.size();
  GaussianBelief belief;
  belief.variables = system.variables;
  belief.mean.assign(n, 0.0);
  belief.covariance.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    double mu = system.intercept[i];
    for (const auto& [parent, weight] : system.parent_weights[i]) {
      mu += weight * belief.mean[parent];
    }
    belief.mean[i] = mu;
    for (std::size_t j = 0; j < i; ++j) {
      double cov = 0.0;
      for (const auto& [parent, weight] : system.parent_weights[i]) {
        cov += weight * belief.covariance[parent][j];
      }
      belief.covariance[i][j] = cov;
      belief.covariance[j][i] = cov;
    }
    double var = system.noise[i];
    for (const auto& [p, wp] : system.parent_weights[i]) {
      for (const auto& [q, wq] : system.parent_weights[i]) {
        var += wp * wq * belief.covariance[p][q];
      }
    }
    belief.covariance[i][i] = var;
  }
  return belief;
}

// Conditions jointly Gaussian moments on one observation (rank-1 update).
// Observing a zero-variance variable is a no-op when consistent and an error
// otherwise.
void condition_on(GaussianBelief& belief, std::size_t index, double value) {
  double variance = belief.covariance[index][index];
  if (variance <= kZeroVariance) {
    if (std::abs(value - belief.mean[index]) >
        kEvidenceSlack * std::max(1.0, std::abs(belief.mean[index]))) {
      throw SingularEvidenceError(
          "evidence " + belief.variables[index].to_string() + " = " +
          std::to_string(value) + " contradicts its deterministic value " +
          std::to_string(belief.mean[index]));
    }
    return;
  }
  std::size_t n = belief.variables.size();
  std::vector<double> column(n);
  for (std::size_t i = 0; i < n; ++i) column[i] = belief.covariance[i][index];
  double shift = (value - belief.mean[index]) / variance;
  for (std::size_t i = 0; i < n; ++i) {
    belief.mean[i] += column[i] * shift;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      belief.covariance[i][j] -= column[i] * column[j] / variance;
    }
  }
}

GaussianBelief marginal_of(const GaussianBelief& belief,
                           const std::vector<Atom>& query) {
  std::vector<std::size_t> pick;
  for (const Atom& atom : query) {
    auto it = std::find(belief.variables.begin(), belief.variables.end(), atom);
    if (it == belief.variables.end()) {
      throw TypeError("query atom " + atom.to_string() +
                      " is not a continuous network node");
    }
    pick.push_back(static_cast<std::size_t>(it - belief.variables.begin()));
  }
  GaussianBelief out;
  out.variables = query;
  out.mean.resize(pick.size());
  out.covariance.assign(pick.size(), std::vector<double>(pick.size(), 0.0));
  for (std::size_t i = 0; i < pick.size(); ++i) {
    out.mean[i] = belief.mean[pick[i]];
    for (std::size_t j = 0; j < pick.size(); ++j) {
      out.covariance[i][j] = belief.covariance[pick[i]][pick[j]];
    }
  }
  return out;
}

GaussianBelief gaussian_on_system(const LinearGaussianSystem& system,
                                  const std::vector<Atom>& query,
                                  const ContinuousEvidence& evidence) {
  GaussianBelief joint = joint_moments(system);
  for (const auto& [atom, value] : evidence) {
    auto it = system.index.find(atom);
    if (it == system.index.end()) {
      throw TypeError("evidence atom " + atom.to_string() +
                      " is not a continuous network node");
    }
    condition_on(joint, it->second, value);
  }
  return marginal_of(joint, query);
}

}  // namespace

GaussianBelief gaussian_query(const SupportNetwork& network,
                              const std::vector<Atom>& query,
                              const ContinuousEvidence& evidence) {
  for (const NetworkNode& node : network.nodes()) {
    if (!node.domain.is_continuous()) {
      throw TypeError("gaussian_query requires a continuous network, " +
                      node.atom.to_string() + " is discrete");
    }
    const CondGaussian* cpd = std::get_if<CondGaussian>(&node.cpd);
    if (!cpd || !cpd->discrete_parents.empty()) {
      throw TypeError("gaussian_query requires linear-Gaussian cpds");
    }
  }
  return gaussian_on_system(linear_system(network, {}), query, evidence);
}

namespace {

struct SplitEvidence {
  DiscreteEvidence discrete;
  ContinuousEvidence continuous;
};

SplitEvidence split_evidence(const SupportNetwork& network,
                             const std::vector<std::pair<Atom, EvidenceValue>>&
                                 evidence) {
  SplitEvidence out;
  for (const auto& [atom, value] : evidence) {
    if (!network.contains(atom)) continue;  // pruned: independent of the query
    if (std::holds_alternative<double>(value)) {
      out.continuous.emplace_back(atom, std::get<double>(value));
    } else {
      out.discrete.emplace_back(atom, std::get<std::string>(value));
    }
  }
  return out;
}

// All joint configurations of the discrete nodes with nonzero probability
// under the discrete evidence, with their joint weights. Zero-probability
// branches are cut eagerly.
struct DiscreteConfig {
  std::map<Atom, std::size_t> states;
  double weight = 0.0;
};

std::vector<DiscreteConfig> enumerate_discrete_configs(
    const SupportNetwork& network, const DiscreteEvidence& evidence,
    std::size_t max_configs) {
  std::vector<Atom> discrete_nodes;
  for (const Atom& atom : network.topological_order()) {
    if (network.node(atom).domain.is_discrete()) {
      discrete_nodes.push_back(atom);
    }
  }
  std::map<Atom, std::size_t> required;
  for (const auto& [atom, state] : evidence) {
    required[atom] =
        state_index_or_throw(network.node(atom).domain, atom, state);
  }

  std::vector<DiscreteConfig> configs;
  std::size_t leaves = 0;
  std::map<Atom, std::size_t> assignment;

  // Depth-first over topological order so parents are assigned before
  // children and weights accumulate as products of cpd entries.
  std::function<void(std::size_t, double)> descend = [&](std::size_t depth,
                                                         double weight) {
    if (depth == discrete_nodes.size()) {
      if (++leaves > max_configs) {
        throw ResourceExceeded("discrete configuration count exceeds " +
                               std::to_string(max_configs));
      }
      configs.push_back(DiscreteConfig{assignment, weight});
      return;
    }
    const Atom& atom = discrete_nodes[depth];
    const NetworkNode& node = network.node(atom);
    auto fixed = required.find(atom);
    for (std::size_t s = 0; s < node.domain.state_count(); ++s) {
      if (fixed != required.end() && fixed->second != s) continue;
      assignment[atom] = s;
      double p = cpd_value(network, node, assignment) * weight;
      if (p > 0.0) descend(depth + 1, p);
    }
    assignment.erase(atom);
  };
  descend(0, 1.0);
  return configs;
}

DiscreteAnswer factor_to_answer(const SupportNetwork& network,
                                const Factor& factor) {
  DiscreteAnswer answer;
  answer.variables = factor.variables();
  for (const Atom& atom : factor.variables()) {
    answer.states.push_back(network.node(atom).domain.states);
  }
  answer.values = factor.values();
  return answer;
}

std::vector<std::pair<Atom, std::string>> config_labels(
    const SupportNetwork& network, const std::map<Atom, std::size_t>& config) {
  std::vector<std::pair<Atom, std::string>> labels;
  for (const auto& [atom, state] : config) {
    labels.emplace_back(atom, network.node(atom).domain.states[state]);
  }
  return labels;
}

QueryAnswer answer_on_network(const SupportNetwork& network,
                              const std::vector<Atom>& query_atoms,
                              const SplitEvidence& evidence,
                              const AnswerOptions& options) {
  bool all_discrete = network.is_discrete();
  bool all_continuous = network.is_continuous();

  if (options.engine == AnswerOptions::Engine::VariableElimination &&
      !all_discrete) {
    throw UnsupportedModelError(
        "--engine ve requires an all-discrete support network");
  }
  if (options.engine == AnswerOptions::Engine::Gaussian && all_discrete) {
    throw UnsupportedModelError(
        "--engine gaussian requires continuous nodes in the support network");
  }

  if (all_discrete) {
    if (!evidence.continuous.empty()) {
      throw TypeError("continuous evidence on a discrete network");
    }
    return factor_to_answer(
        network, variable_elimination(network, query_atoms, evidence.discrete));
  }

  if (all_continuous) {
    return gaussian_query(network, query_atoms, evidence.continuous);
  }

  // Conditional-Gaussian network: exact enumeration over the discrete joint.
  std::vector<DiscreteConfig> configs = enumerate_discrete_configs(
      network, evidence.discrete, options.infer_limits.max_discrete_configs);
  double total = 0.0;
  for (const DiscreteConfig& config : configs) total += config.weight;
  if (!(total > kMinNormalizer)) {
    throw InconsistentEvidenceError("discrete evidence has probability 0");
  }

  std::vector<Atom> discrete_query;
  std::vector<Atom> continuous_query;
  for (const Atom& atom : query_atoms) {
    if (network.node(atom).domain.is_discrete()) {
      discrete_query.push_back(atom);
    } else {
      continuous_query.push_back(atom);
    }
  }

  if (!evidence.continuous.empty() && configs.size() > 1) {
    throw UnsupportedModelError(
        "continuous evidence on a conditional-Gaussian network with more "
        "than one feasible discrete configuration");
  }
  if (options.engine == AnswerOptions::Engine::Gaussian && configs.size() > 1) {
    throw UnsupportedModelError(
        "--engine gaussian requires the network to reduce to a single "
        "linear-Gaussian system");
  }

  if (continuous_query.empty()) {
    // Continuous children marginalize out of the joint exactly, so the
    // discrete weights already answer the query.
    std::vector<std::size_t> cards;
    for (const Atom& atom : discrete_query) {
      cards.push_back(network.node(atom).domain.state_count());
    }
    std::vector<double> values(product(cards), 0.0);
    for (const DiscreteConfig& config : configs) {
      std::size_t index = 0;
      for (std::size_t i = 0; i < discrete_query.size(); ++i) {
        index = index * cards[i] + config.states.at(discrete_query[i]);
      }
      values[index] += config.weight / total;
    }
    return factor_to_answer(network,
                            Factor(discrete_query, cards, std::move(values)));
  }

  if (configs.size() == 1) {
    // Degenerate mixture: one linear-Gaussian system, so continuous evidence
    // conditions exactly.
    LinearGaussianSystem system = linear_system(network, configs[0].states);
    GaussianBelief belief =
        gaussian_on_system(system, continuous_query, evidence.continuous);
    if (discrete_query.empty()) return belief;
    MixtureAnswer mixture;
    mixture.variables = continuous_query;
    mixture.components.push_back(
        MixtureComponent{1.0, config_labels(network, configs[0].states),
                         std::move(belief)});
    return mixture;
  }

  MixtureAnswer mixture;
  mixture.variables = continuous_query;
  for (const DiscreteConfig& config : configs) {
    LinearGaussianSystem system = linear_system(network, config.states);
    GaussianBelief belief = gaussian_on_system(system, continuous_query, {});
    mixture.components.push_back(MixtureComponent{
        config.weight / total, config_labels(network, config.states),
        std::move(belief)});
  }
  return mixture;
}

}  // namespace

AnswerResult answer_query(const Program& program, const Query& query,
                          const AnswerOptions& options) {
  // Requested atoms: query atoms first, then evidence atoms, duplicates
  // dropped.
  std::vector<Atom> requested;
  auto add = [&](const Atom& atom) {
    if (std::find(requested.begin(), requested.end(), atom) == requested.end()) {
      requested.push_back(atom);
    }
  };
  for (const Atom& atom : query.atoms) add(atom);
  for (const auto& [atom, value] : query.evidence) add(atom);

  SolutionGraph graph =
      solution_graph(program, requested, options.proof_limits);

  // Unprovable atoms are undefined unless their predicate opted into the
  // closed-world reading, in which case they are deterministically false.
  std::vector<Atom> provable;
  std::vector<Atom> closed_world_false;
  for (const Atom& atom : requested) {
    if (graph.has_or_node(atom) && !graph.and_children(atom).empty()) {
      provable.push_back(atom);
    } else if (program.closed_world().count(atom.pred())) {
      closed_world_false.push_back(atom);
    } else {
      throw UndefinedVariableError(
          atom.to_string() +
          " is not a proper random variable; the answer to the query is "
          "undefined");
    }
  }

  auto is_closed_world_false = [&](const Atom& atom) {
    return std::find(closed_world_false.begin(), closed_world_false.end(),
                     atom) != closed_world_false.end();
  };

  // Evidence on a closed-world-false atom must say "false"; it then carries
  // no information.
  std::vector<std::pair<Atom, EvidenceValue>> live_evidence;
  for (const auto& [atom, value] : query.evidence) {
    if (!is_closed_world_false(atom)) {
      live_evidence.emplace_back(atom, value);
      continue;
    }
    const std::string* state = std::get_if<std::string>(&value);
    if (!state || *state != "false") {
      throw InconsistentEvidenceError(
          "evidence contradicts closed-world atom " + atom.to_string() +
          " (deterministically false)");
    }
  }

  std::vector<Atom> live_query;
  std::vector<Atom> false_query;
  for (const Atom& atom : query.atoms) {
    if (is_closed_world_false(atom)) {
      false_query.push_back(atom);
    } else {
      live_query.push_back(atom);
    }
  }

  AnswerResult result;
  if (!live_query.empty() || !live_evidence.empty()) {
    SupportNetwork network = support_network_from_graph(
        program, graph, provable, options.registry);
    if (options.prune_network && !live_query.empty()) {
      std::vector<Atom> evidence_atoms;
      for (const auto& [atom, value] : live_evidence) {
        (void)value;
        evidence_atoms.push_back(atom);
      }
      network = prune(network, live_query, evidence_atoms);
    }
    result.network = std::move(network);
  }

  if (live_query.empty()) {
    // Every query atom is a closed-world false: a deterministic answer.
    DiscreteAnswer answer;
    for (const Atom& atom : false_query) {
      const DomainDecl& domain = program.domain(atom);
      answer.variables.push_back(atom);
      answer.states.push_back(domain.states);
    }
    std::vector<std::size_t> cards(false_query.size(), 2);
    answer.values.assign(product(cards), 0.0);
    std::size_t index = 0;
    for (std::size_t i = 0; i < false_query.size(); ++i) {
      const DomainDecl& domain = program.domain(false_query[i]);
      index = index * 2 + domain.state_index("false");
    }
    answer.values[index] = 1.0;
    result.answer = std::move(answer);
    return result;
  }

  SplitEvidence evidence = split_evidence(result.network, live_evidence);
  QueryAnswer answer =
      answer_on_network(result.network, live_query, evidence, options);

  if (!false_query.empty()) {
    DiscreteAnswer* discrete = std::get_if<DiscreteAnswer>(&answer);
    if (!discrete) {
      throw UnsupportedModelError(
          "cannot join closed-world false atoms with a continuous answer");
    }
    // Extend the joint with deterministic false axes.
    for (const Atom& atom : false_query) {
      const DomainDecl& domain = program.domain(atom);
      std::vector<double> extended;
      extended.reserve(discrete->values.size() * domain.state_count());
      for (double v : discrete->values) {
        for (std::size_t s = 0; s < domain.state_count(); ++s) {
          extended.push_back(s == domain.state_index("false") ? v : 0.0);
        }
      }
      discrete->variables.push_back(atom);
      discrete->states.push_back(domain.states);
      discrete->values = std::move(extended);
    }
  }
  result.answer = std::move(answer);
  return result;
}

}  // namespace blp
