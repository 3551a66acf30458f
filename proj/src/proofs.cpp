#include "blp/proofs.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

#include "blp/errors.hpp"

namespace blp {

std::vector<int> SldTree::path_from_root(int leaf) const {
  std::vector<int> path;
  for (int index = leaf; index != -1; index = nodes_[index].parent) {
    path.push_back(index);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

Substitution SldTree::answer_substitution(int leaf) const {
  Substitution answer;
  for (int index : path_from_root(leaf)) {
    if (nodes_[index].parent == -1) continue;
    answer = compose(answer, nodes_[index].mgu);
  }
  return answer;
}

std::string SldTree::dump() const {
  std::ostringstream out;
  // Depth-first, children in creation order, matching the resolution order.
  std::vector<int> stack{0};
  while (!stack.empty()) {
    int index = stack.back();
    stack.pop_back();
    const Node& node = nodes_[index];
    for (std::size_t i = 0; i < node.depth; ++i) out << "  ";
    if (node.goal.empty()) {
      out << "success";
    } else {
      out << "?- ";
      for (std::size_t i = 0; i < node.goal.size(); ++i) {
        if (i > 0) out << ", ";
        out << node.goal[i].to_string();
      }
    }
    if (node.parent != -1) out << "  (c" << node.clause_id << ")";
    out << '\n';
    for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) {
      stack.push_back(*it);
    }
  }
  return out.str();
}

SldTree build_sld_tree(const Program& program, const std::vector<Atom>& goal,
                       const ProofLimits& limits) {
  if (goal.empty()) {
    throw ValidationError("SLD tree requires a non-empty goal");
  }
  std::vector<SldTree::Node> nodes;
  std::vector<int> successes;
  int fresh_counter = 0;

  SldTree::Node root;
  root.goal = goal;
  nodes.push_back(std::move(root));

  // Depth-first expansion; the tree is complete, so the visit order only
  // affects node numbering, which we keep depth-first for readable dumps.
  std::vector<int> stack{0};
  while (!stack.empty()) {
    int index = stack.back();
    stack.pop_back();
    if (nodes[index].goal.empty()) {
      successes.push_back(index);
      continue;
    }
    Atom selected = nodes[index].goal.front();
    std::size_t depth = nodes[index].depth;
    std::vector<int> children;
    for (const Clause& clause : program.clauses()) {
      Clause renamed = rename_apart(clause, fresh_counter);
      std::optional<Substitution> mgu = unify(selected, renamed.head);
      if (!mgu) continue;
      if (depth >= limits.max_depth) {
        throw ResourceExceeded("SLD tree exceeds depth " +
                               std::to_string(limits.max_depth));
      }
      SldTree::Node child;
      child.parent = index;
      child.depth = depth + 1;
      child.clause_id = clause.id;
      child.renamed_clause = renamed;
      child.mgu = *mgu;
      std::vector<Atom> next_goal;
      next_goal.reserve(renamed.body.size() + nodes[index].goal.size() - 1);
      for (const Atom& atom : renamed.body) {
        next_goal.push_back(mgu->apply(atom));
      }
      for (std::size_t i = 1; i < nodes[index].goal.size(); ++i) {
        next_goal.push_back(mgu->apply(nodes[index].goal[i]));
      }
      child.goal = std::move(next_goal);
      if (nodes.size() >= limits.max_nodes) {
        throw ResourceExceeded("SLD tree exceeds " +
                               std::to_string(limits.max_nodes) + " nodes");
      }
      nodes.push_back(std::move(child));
      children.push_back(static_cast<int>(nodes.size()) - 1);
    }
    nodes[index].children = children;
    for (auto it = children.rbegin(); it != children.rend(); ++it) {
      stack.push_back(*it);
    }
  }
  return SldTree(std::move(nodes), std::move(successes));
}

void SolutionGraph::add_instance(int clause_id, const Atom& head,
                                 const std::vector<Atom>& body) {
  auto key = std::make_pair(clause_id, body);
  auto it = and_index_.find(key);
  std::size_t and_id;
  if (it != and_index_.end()) {
    and_id = it->second;
  } else {
    and_id = and_nodes_.size();
    and_nodes_.push_back(AndNode{clause_id, head, body});
    and_index_.emplace(std::move(key), and_id);
  }
  std::vector<std::size_t>& children = or_nodes_[head];
  if (std::find(children.begin(), children.end(), and_id) == children.end()) {
    children.push_back(and_id);
    std::sort(children.begin(), children.end());
  }
  for (const Atom& atom : body) {
    or_nodes_[atom];  // body atoms are or-nodes even before their proof edge
  }
}

const std::vector<std::size_t>& SolutionGraph::and_children(
    const Atom& or_node) const {
  static const std::vector<std::size_t> kEmpty;
  auto it = or_nodes_.find(or_node);
  return it == or_nodes_.end() ? kEmpty : it->second;
}

SolutionGraph solution_graph(const Program& program,
                             const std::vector<Atom>& atoms,
                             const ProofLimits& limits) {
  SolutionGraph graph;
  for (const Atom& atom : atoms) {
    if (!atom.is_ground()) {
      throw NonGroundQueryError("solution graphs require ground atoms, got " +
                                atom.to_string());
    }
    SldTree tree = build_sld_tree(program, {atom}, limits);
    for (int leaf : tree.success_leaves()) {
      Substitution answer = tree.answer_substitution(leaf);
      for (int index : tree.path_from_root(leaf)) {
        const SldTree::Node& node = tree.node(index);
        if (node.parent == -1) continue;
        Clause instance = answer.apply(*node.renamed_clause);
        if (!instance.head.is_ground()) {
          throw std::logic_error("answer substitution left " +
                                 instance.head.to_string() + " non-ground");
        }
        for (const Atom& body_atom : instance.body) {
          if (!body_atom.is_ground()) {
            throw std::logic_error("answer substitution left " +
                                   body_atom.to_string() + " non-ground");
          }
        }
        graph.add_instance(node.clause_id, instance.head, instance.body);
      }
    }
  }
  return graph;
}

}  // namespace blp
