#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "blp/netbuild.hpp"
#include "blp/parser.hpp"

namespace blp {

// A non-negative potential over an ordered list of discrete network nodes.
// Values run with the first variable slowest and the last fastest, matching
// the cpd convention.
class Factor {
 public:
  Factor();  // scalar 1
  Factor(std::vector<Atom> variables, std::vector<std::size_t> cardinalities,
         std::vector<double> values);

  const std::vector<Atom>& variables() const { return variables_; }
  const std::vector<std::size_t>& cardinalities() const {
    return cardinalities_;
  }
  const std::vector<double>& values() const { return values_; }
  bool has_variable(const Atom& atom) const;

  double value_at(const std::vector<std::size_t>& states) const;

  // Pointwise product over the sorted union of the variables.
  Factor multiply(const Factor& other) const;
  Factor marginalize_out(const Atom& variable) const;
  // Fixes a variable to one state and drops the axis.
  Factor restrict_to(const Atom& variable, std::size_t state) const;
  Factor reorder(const std::vector<Atom>& order) const;

  double sum() const;
  // Scales to total mass 1; throws InconsistentEvidenceError when the mass
  // is below 1e-300.
  void normalize();

 private:
  std::vector<Atom> variables_;
  std::vector<std::size_t> cardinalities_;
  std::vector<double> values_;
};

struct InferLimits {
  std::size_t max_joint_states = std::size_t(1) << 20;
  std::size_t max_discrete_configs = std::size_t(1) << 16;
};

// The full joint of an all-discrete network as a plain product over all
// configurations; the brute-force oracle for the discrete engine.
Factor enumerate_joint(const SupportNetwork& network,
                       std::size_t max_joint_states = std::size_t(1) << 20);

using DiscreteEvidence = std::vector<std::pair<Atom, std::string>>;

// Exact p(query | evidence) on an all-discrete network by variable
// elimination; min-degree order with lexicographic tie-break.
Factor variable_elimination(const SupportNetwork& network,
                            const std::vector<Atom>& query,
                            const DiscreteEvidence& evidence);

// Joint Gaussian moments over an ordered variable list.
struct GaussianBelief {
  std::vector<Atom> variables;
  std::vector<double> mean;
  std::vector<std::vector<double>> covariance;

  double mean_of(const Atom& atom) const;
  double variance_of(const Atom& atom) const;
};

using ContinuousEvidence = std::vector<std::pair<Atom, double>>;

// Exact moments of `query` given `evidence` on a linear-Gaussian network
// (every node continuous, no discrete parents anywhere).
GaussianBelief gaussian_query(const SupportNetwork& network,
                              const std::vector<Atom>& query,
                              const ContinuousEvidence& evidence);

struct DiscreteAnswer {
  std::vector<Atom> variables;
  std::vector<std::vector<std::string>> states;  // per variable
  std::vector<double> values;  // first variable slowest, sums to 1
};

struct MixtureComponent {
  double weight = 0.0;
  // Joint state of the network's discrete nodes this component conditions on.
  std::vector<std::pair<Atom, std::string>> configuration;
  GaussianBelief belief;
};

struct MixtureAnswer {
  std::vector<Atom> variables;  // continuous query variables
  std::vector<MixtureComponent> components;  // weights sum to 1
};

using QueryAnswer = std::variant<DiscreteAnswer, GaussianBelief, MixtureAnswer>;

struct AnswerOptions {
  ProofLimits proof_limits{};
  InferLimits infer_limits{};
  bool prune_network = true;
  enum class Engine { Auto, VariableElimination, Gaussian } engine = Engine::Auto;
  CombiningRuleRegistry registry = CombiningRuleRegistry::builtins();
};

struct AnswerResult {
  QueryAnswer answer;
  SupportNetwork network;  // the pruned support network the answer used
};

// Full query pipeline: support network over query and evidence atoms,
// pruning, then dispatch. Discrete networks go to variable elimination,
// linear-Gaussian networks to moment propagation, conditional-Gaussian
// networks to exact enumeration over discrete configurations.
AnswerResult answer_query(const Program& program, const Query& query,
                          const AnswerOptions& options = {});

}  // namespace blp
