#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "blp/parser.hpp"

namespace blp {

// A Herbrand interpretation: a set of ground atoms.
using Interpretation = std::set<Atom>;

struct SemanticsLimits {
  std::size_t max_iterations = 10000;
  std::size_t max_atoms = 1000000;
  std::size_t ancestor_bound = 100000;
};

// One application of the immediate-consequence operator: all clause heads
// whose fully grounded bodies lie inside `interpretation`. Facts are always
// included. Throws ResourceExceeded when the result would exceed max_atoms.
Interpretation immediate_consequence(const Program& program,
                                     const Interpretation& interpretation,
                                     std::size_t max_atoms = 1000000);

// Least fixpoint of the immediate-consequence operator, from the empty
// interpretation. Throws ResourceExceeded when the bounds are hit first
// (the model may be infinite).
Interpretation least_herbrand_model(const Program& program,
                                    std::size_t max_iterations = 10000,
                                    std::size_t max_atoms = 1000000);

// Directed graph of the direct-influence relation over the least Herbrand
// model: edge (A,B) iff some ground clause instance with head B contains A in
// its body and lies entirely inside the model.
struct DependencyGraph {
  std::set<Atom> nodes;
  std::set<std::pair<Atom, Atom>> edges;

  bool has_edge(const Atom& from, const Atom& to) const {
    return edges.count({from, to}) > 0;
  }
  std::vector<Atom> parents_of(const Atom& node) const;
};

// Pre: `model` is a fixpoint of immediate_consequence for `program`.
DependencyGraph dependency_graph(const Program& program,
                                 const Interpretation& model);

struct WellDefinednessReport {
  enum class Status { WellDefined, IllDefined, Undetermined };
  enum class Reason { None, EmptyModel, CycleFound, InfiniteInfluenceSuspected };

  Status status = Status::WellDefined;
  Reason reason = Reason::None;
  // CycleFound: atoms along the witness cycle; consecutive pairs (and
  // last->first) are dependency-graph edges.
  std::vector<Atom> cycle;
  // InfiniteInfluenceSuspected: the atom whose ancestor enumeration blew the
  // bound, and that bound.
  std::optional<Atom> suspect;
  std::size_t bound = 0;
  std::string detail;

  bool well_defined() const { return status == Status::WellDefined; }
  std::string to_string() const;
};

// Semi-decision procedure for Definition-4.8 well-definedness: non-empty
// model, acyclic dependency graph, finite influence sets. When the model
// cannot be computed within the bounds the verdict falls back to a sound
// partial analysis (any cycle or oversized ancestor set found in a partial
// model is real) or to Undetermined.
WellDefinednessReport check_well_defined(const Program& program,
                                         const SemanticsLimits& limits = {});

}  // namespace blp
