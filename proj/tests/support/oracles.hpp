#pragma once

// Independent oracles used to cross-check the engine. Everything here is
// deliberately written against different representations and algorithms than
// the library: moments come from explicit noise-source coefficient vectors,
// conditioning goes through a Gauss-Jordan Schur complement, and discrete
// tables are reduced with plain index loops rather than Factor operations.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "blp/kernel.hpp"
#include "blp/netbuild.hpp"
#include "blp/parser.hpp"

namespace blp::testing {

struct Moments {
  std::vector<double> mean;
  std::vector<std::vector<double>> covariance;
};

// A linear-Gaussian network spec: node i may only have parents j < i.
struct LgNode {
  std::string name;
  std::vector<std::size_t> parents;
  std::vector<double> weights;
  double intercept = 0.0;
  double variance = 0.0;
};

struct LgSpec {
  std::vector<LgNode> nodes;
};

// Exact joint moments via per-node coefficient vectors over the independent
// noise sources.
Moments lg_moments(const LgSpec& spec);

// Conditions jointly Gaussian moments with an explicit Schur complement
// (Gauss-Jordan inverse of the evidence block).
Moments condition_moments(const Moments& joint,
                          const std::vector<std::pair<std::size_t, double>>&
                              evidence,
                          const std::vector<std::size_t>& query);

// Monte-Carlo ancestral sampling moments.
Moments lg_mc_moments(const LgSpec& spec, std::size_t samples,
                      std::uint64_t seed);

// Builds a support network of continuous 0-ary nodes from an LgSpec.
SupportNetwork lg_network(const LgSpec& spec);

// Random DAG with weights in [-1,1], intercepts in [100,200] and variances
// in [0.5,5].
LgSpec random_lg_spec(std::uint64_t seed, std::size_t max_nodes);

// The pedigree of the shipped height program, coded independently:
// 12 people, founders N(175,60), children averaging their parents with
// noise variance 60.
struct PedigreeOracle {
  PedigreeOracle();

  const std::vector<std::string>& people() const { return people_; }
  std::size_t index_of(const std::string& person) const;
  const Moments& joint() const { return joint_; }

  // Conditional moments of `query` people given observed heights.
  Moments conditional(const std::vector<std::string>& query,
                      const std::vector<std::pair<std::string, double>>&
                          evidence) const;

 private:
  std::vector<std::string> people_;
  Moments joint_;
};

// p(effect | cause states) per the noisy-or product formula, for single-cause
// activations p_k = p(effect=true | cause_k=true). States are booleans.
double noisy_or_true_probability(const std::vector<double>& activations,
                                 const std::vector<bool>& cause_states);

// Plain-loop reductions over a flat joint table (first variable slowest).
struct JointTable {
  std::vector<std::size_t> cards;
  std::vector<double> values;
};

JointTable restrict_table(const JointTable& table, std::size_t axis,
                          std::size_t state);
JointTable marginalize_table(const JointTable& table, std::size_t axis);
void normalize_table(JointTable& table);

// Random all-discrete support network over 0-ary boolean predicates n0..nk.
SupportNetwork random_discrete_network(std::uint64_t seed,
                                       std::size_t max_nodes);

// Random stratified function-free logical program (deterministic 0/1 cpds,
// max combining rule) plus a sample of ground atoms to probe, as source text.
struct LogicalProgramSample {
  std::string source;
  std::vector<Atom> probes;  // mix of provable and unprovable candidates
};

LogicalProgramSample random_logical_program(std::uint64_t seed);

}  // namespace blp::testing
