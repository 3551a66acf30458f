#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "blp/parser.hpp"

namespace blp {

struct ProofLimits {
  std::size_t max_depth = 512;
  std::size_t max_nodes = 100000;
};

// A complete SLD tree under leftmost-atom selection with clauses tried in
// program order. Every edge records the clause used (standardized apart) and
// the MGU of that resolution step.
class SldTree {
 public:
  struct Node {
    std::vector<Atom> goal;
    int parent = -1;
    std::size_t depth = 0;
    // Edge labels from the parent (unset for the root).
    int clause_id = -1;
    std::optional<Clause> renamed_clause;
    Substitution mgu;
    std::vector<int> children;

    bool is_success() const { return goal.empty(); }
  };

  explicit SldTree(std::vector<Node> nodes, std::vector<int> success_leaves)
      : nodes_(std::move(nodes)), success_leaves_(std::move(success_leaves)) {}

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(int index) const { return nodes_[index]; }
  const Node& root() const { return nodes_.front(); }
  const std::vector<int>& success_leaves() const { return success_leaves_; }
  std::size_t success_count() const { return success_leaves_.size(); }

  // Node indices from the root to `leaf`, inclusive.
  std::vector<int> path_from_root(int leaf) const;

  // Composition of the edge MGUs along the path to a success leaf.
  Substitution answer_substitution(int leaf) const;

  // One node per line, indentation tracking depth, used-clause annotated.
  std::string dump() const;

 private:
  std::vector<Node> nodes_;
  std::vector<int> success_leaves_;
};

SldTree build_sld_tree(const Program& program, const std::vector<Atom>& goal,
                       const ProofLimits& limits = {});

// Collapsed AND/OR graph of all proofs of a set of ground atoms. Or-nodes are
// ground atoms; and-nodes are ground clause instances keyed by
// (clause id, ground body), which determines the head under range
// restriction.
class SolutionGraph {
 public:
  struct AndNode {
    int clause_id = -1;
    Atom head;
    std::vector<Atom> body;
  };

  // Inserts the instance and its or-nodes; duplicates collapse.
  void add_instance(int clause_id, const Atom& head,
                    const std::vector<Atom>& body);

  bool has_or_node(const Atom& atom) const { return or_nodes_.count(atom) > 0; }
  const std::map<Atom, std::vector<std::size_t>>& or_nodes() const {
    return or_nodes_;
  }
  const std::vector<AndNode>& and_nodes() const { return and_nodes_; }
  const std::vector<std::size_t>& and_children(const Atom& or_node) const;

  std::size_t or_count() const { return or_nodes_.size(); }
  std::size_t and_count() const { return and_nodes_.size(); }
  bool empty() const { return or_nodes_.empty(); }

 private:
  std::map<Atom, std::vector<std::size_t>> or_nodes_;
  std::vector<AndNode> and_nodes_;
  std::map<std::pair<int, std::vector<Atom>>, std::size_t> and_index_;
};

// Union of the solution graphs of the given ground atoms, built by replaying
// every successful SLD path. Unprovable atoms contribute nothing. Throws
// ResourceExceeded when a tree blows the limits (the query is then not
// well-defined within them).
SolutionGraph solution_graph(const Program& program,
                             const std::vector<Atom>& atoms,
                             const ProofLimits& limits = {});

}  // namespace blp
