#include "blp/semantics.hpp"

#include <algorithm>
#include <stdexcept>
#include <functional>
#include <map>

#include "blp/errors.hpp"

namespace blp {

namespace {

using PredicateIndex = std::map<PredicateId, std::vector<Atom>>;

PredicateIndex index_by_predicate(const Interpretation& atoms) {
  PredicateIndex index;
  for (const Atom& atom : atoms) index[atom.pred()].push_back(atom);
  return index;
}

// Enumerates substitutions grounding `body[from..]` against ground atoms from
// `pick`, where `pick(i)` supplies the candidate atoms for position i.
// Used with different pickers for naive, semi-naive and dependency-graph
// grounding.
void join_body(const std::vector<Atom>& body, std::size_t from,
               const Substitution& subst,
               const std::function<const std::vector<Atom>*(std::size_t)>& pick,
               const std::function<void(const Substitution&)>& emit) {
  if (from == body.size()) {
    emit(subst);
    return;
  }
  const std::vector<Atom>* candidates = pick(from);
  if (candidates == nullptr) return;
  Atom pattern = subst.apply(body[from]);
  for (const Atom& ground : *candidates) {
    std::optional<Substitution> mgu = unify(pattern, ground);
    if (!mgu) continue;
    join_body(body, from + 1, compose(subst, *mgu), pick, emit);
  }
}

struct FixpointResult {
  Interpretation model;
  bool completed = false;
  std::size_t iterations = 0;
};

FixpointResult compute_fixpoint(const Program& program, std::size_t max_iterations,
                                std::size_t max_atoms) {
  FixpointResult result;
  Interpretation& model = result.model;
  Interpretation delta;
  for (const Clause& clause : program.clauses()) {
    if (clause.is_fact()) delta.insert(clause.head);
  }
  model = delta;
  result.iterations = 1;
  if (model.size() > max_atoms) return result;

  while (result.iterations < max_iterations) {
    if (delta.empty()) {
      result.completed = true;
      return result;
    }
    PredicateIndex full = index_by_predicate(model);
    PredicateIndex recent = index_by_predicate(delta);
    Interpretation next_delta;
    for (const Clause& clause : program.clauses()) {
      if (clause.is_fact()) continue;
      // Semi-naive: require at least one body atom from the last delta.
      for (std::size_t pivot = 0; pivot < clause.body.size(); ++pivot) {
        auto pick = [&](std::size_t i) -> const std::vector<Atom>* {
          const PredicateIndex& source = (i == pivot) ? recent : full;
          auto it = source.find(clause.body[i].pred());
          return it == source.end() ? nullptr : &it->second;
        };
        join_body(clause.body, 0, Substitution{}, pick,
                  [&](const Substitution& subst) {
                    Atom head = subst.apply(clause.head);
                    if (!head.is_ground()) {
                      throw std::logic_error("derived atom " +
                                             head.to_string() +
                                             " is not ground");
                    }
                    if (!model.count(head)) next_delta.insert(head);
                  });
      }
    }
    ++result.iterations;
    if (next_delta.empty()) {
      result.completed = true;
      return result;
    }
    for (const Atom& atom : next_delta) model.insert(atom);
    delta = std::move(next_delta);
    if (model.size() > max_atoms) return result;
  }
  return result;
}

// Iterative depth-first cycle search; models from hit bounds can be deep, so
// no recursion.
std::optional<std::vector<Atom>> find_cycle(const DependencyGraph& graph) {
  std::map<Atom, std::vector<Atom>> children;
  for (const auto& [from, to] : graph.edges) children[from].push_back(to);

  enum class Color { White, Gray, Black };
  std::map<Atom, Color> color;
  for (const Atom& node : graph.nodes) color[node] = Color::White;

  static const std::vector<Atom> kNoChildren;
  auto children_of = [&](const Atom& node) -> const std::vector<Atom>& {
    auto it = children.find(node);
    return it == children.end() ? kNoChildren : it->second;
  };

  struct Frame {
    Atom node;
    std::size_t next_child = 0;
  };

  for (const Atom& start : graph.nodes) {
    if (color[start] != Color::White) continue;
    std::vector<Frame> stack{{start, 0}};
    color[start] = Color::Gray;
    while (!stack.empty()) {
      Frame& frame = stack.back();
      const std::vector<Atom>& next_nodes = children_of(frame.node);
      if (frame.next_child == next_nodes.size()) {
        color[frame.node] = Color::Black;
        stack.pop_back();
        continue;
      }
      const Atom& next = next_nodes[frame.next_child++];
      if (color[next] == Color::Gray) {
        std::vector<Atom> cycle;
        bool in_cycle = false;
        for (const Frame& f : stack) {
          if (f.node == next) in_cycle = true;
          if (in_cycle) cycle.push_back(f.node);
        }
        return cycle;
      }
      if (color[next] == Color::White) {
        color[next] = Color::Gray;
        stack.push_back({next, 0});
      }
    }
  }
  return std::nullopt;
}

DependencyGraph edges_within(const Program& program,
                             const Interpretation& atoms) {
  DependencyGraph graph;
  graph.nodes = atoms;
  PredicateIndex index = index_by_predicate(atoms);
  for (const Clause& clause : program.clauses()) {
    if (clause.is_fact()) continue;
    auto pick = [&](std::size_t i) -> const std::vector<Atom>* {
      auto it = index.find(clause.body[i].pred());
      return it == index.end() ? nullptr : &it->second;
    };
    join_body(clause.body, 0, Substitution{}, pick,
              [&](const Substitution& subst) {
                Atom head = subst.apply(clause.head);
                if (!atoms.count(head)) return;
                for (const Atom& body_atom : clause.body) {
                  graph.edges.emplace(subst.apply(body_atom), head);
                }
              });
  }
  return graph;
}

}  // namespace

Interpretation immediate_consequence(const Program& program,
                                     const Interpretation& interpretation,
                                     std::size_t max_atoms) {
  Interpretation result;
  PredicateIndex index = index_by_predicate(interpretation);
  for (const Clause& clause : program.clauses()) {
    if (clause.is_fact()) {
      result.insert(clause.head);
      continue;
    }
    auto pick = [&](std::size_t i) -> const std::vector<Atom>* {
      auto it = index.find(clause.body[i].pred());
      return it == index.end() ? nullptr : &it->second;
    };
    join_body(clause.body, 0, Substitution{}, pick,
              [&](const Substitution& subst) {
                Atom head = subst.apply(clause.head);
                if (!head.is_ground()) {
                  throw std::logic_error("derived atom " + head.to_string() +
                                         " is not ground");
                }
                result.insert(head);
              });
    if (result.size() > max_atoms) {
      throw ResourceExceeded("immediate consequence exceeds " +
                             std::to_string(max_atoms) + " atoms");
    }
  }
  return result;
}

Interpretation least_herbrand_model(const Program& program,
                                    std::size_t max_iterations,
                                    std::size_t max_atoms) {
  FixpointResult result = compute_fixpoint(program, max_iterations, max_atoms);
  if (!result.completed) {
    throw ResourceExceeded(
        "least Herbrand model not reached within " +
        std::to_string(max_iterations) + " iterations / " +
        std::to_string(max_atoms) + " atoms (model may be infinite)");
  }
  return result.model;
}

std::vector<Atom> DependencyGraph::parents_of(const Atom& node) const {
  std::vector<Atom> out;
  for (const auto& [from, to] : edges) {
    if (to == node) out.push_back(from);
  }
  return out;
}

DependencyGraph dependency_graph(const Program& program,
                                 const Interpretation& model) {
  return edges_within(program, model);
}

std::string WellDefinednessReport::to_string() const {
  switch (status) {
    case Status::WellDefined:
      return "WellDefined";
    case Status::Undetermined:
      return "Undetermined(" + detail + ")";
    case Status::IllDefined:
      break;
  }
  switch (reason) {
    case Reason::EmptyModel:
      return "IllDefined(EmptyModel)";
    case Reason::CycleFound: {
      std::string path;
      for (const Atom& atom : cycle) {
        if (!path.empty()) path += " -> ";
        path += atom.to_string();
      }
      if (!cycle.empty()) path += " -> " + cycle.front().to_string();
      return "IllDefined(CycleFound: " + path + ")";
    }
    case Reason::InfiniteInfluenceSuspected:
      return "IllDefined(InfiniteInfluenceSuspected: " +
             (suspect ? suspect->to_string() : std::string("?")) + ", bound " +
             std::to_string(bound) + ")";
    case Reason::None:
      break;
  }
  return "IllDefined";
}

WellDefinednessReport check_well_defined(const Program& program,
                                         const SemanticsLimits& limits) {
  WellDefinednessReport report;
  FixpointResult fixpoint =
      compute_fixpoint(program, limits.max_iterations, limits.max_atoms);

  if (fixpoint.completed && fixpoint.model.empty()) {
    report.status = WellDefinednessReport::Status::IllDefined;
    report.reason = WellDefinednessReport::Reason::EmptyModel;
    return report;
  }

  // Atoms in a partial model are genuine members of the least Herbrand model
  // (the operator is monotone), so any cycle or oversized ancestor set found
  // below is a real witness even when the fixpoint was not reached.
  DependencyGraph graph = edges_within(program, fixpoint.model);
  if (auto cycle = find_cycle(graph)) {
    report.status = WellDefinednessReport::Status::IllDefined;
    report.reason = WellDefinednessReport::Reason::CycleFound;
    report.cycle = std::move(*cycle);
    return report;
  }

  if (fixpoint.completed) {
    // Finite model and acyclic graph: every ancestor set is finite.
    report.status = WellDefinednessReport::Status::WellDefined;
    return report;
  }

  std::map<Atom, std::vector<Atom>> parents;
  for (const auto& [from, to] : graph.edges) parents[to].push_back(from);

  // Longest ancestor path per node (the graph is acyclic here). A path of
  // length > bound already witnesses > bound distinct ancestors, and deep
  // nodes are the best candidates for the exhaustive scan below.
  std::map<Atom, std::size_t> depth;
  {
    std::vector<Atom> order;  // parents before children
    std::map<Atom, std::size_t> pending;
    std::vector<Atom> ready;
    for (const Atom& node : graph.nodes) {
      std::size_t n = parents.count(node) ? parents.at(node).size() : 0;
      pending[node] = n;
      if (n == 0) ready.push_back(node);
    }
    std::map<Atom, std::vector<Atom>> children;
    for (const auto& [from, to] : graph.edges) children[from].push_back(to);
    while (!ready.empty()) {
      Atom node = ready.back();
      ready.pop_back();
      order.push_back(node);
      auto it = children.find(node);
      if (it == children.end()) continue;
      for (const Atom& child : it->second) {
        if (--pending[child] == 0) ready.push_back(child);
      }
    }
    for (const Atom& node : order) {
      std::size_t best = 0;
      auto it = parents.find(node);
      if (it != parents.end()) {
        for (const Atom& parent : it->second) {
          best = std::max(best, depth[parent] + 1);
        }
      }
      depth[node] = best;
      if (best > limits.ancestor_bound) {
        report.status = WellDefinednessReport::Status::IllDefined;
        report.reason =
            WellDefinednessReport::Reason::InfiniteInfluenceSuspected;
        report.suspect = node;
        report.bound = limits.ancestor_bound;
        return report;
      }
    }
  }

  // Exhaustive ancestor counts, deepest nodes first, under a global work
  // budget so a huge partial model degrades to Undetermined instead of
  // stalling.
  std::vector<Atom> by_depth(graph.nodes.begin(), graph.nodes.end());
  std::sort(by_depth.begin(), by_depth.end(), [&](const Atom& a, const Atom& b) {
    if (depth[a] != depth[b]) return depth[a] > depth[b];
    return a < b;
  });
  std::size_t budget = 20000000;
  for (const Atom& node : by_depth) {
    std::set<Atom> seen;
    std::vector<Atom> frontier{node};
    while (!frontier.empty() && seen.size() <= limits.ancestor_bound) {
      if (budget == 0) break;
      Atom current = frontier.back();
      frontier.pop_back();
      auto it = parents.find(current);
      if (it == parents.end()) continue;
      for (const Atom& parent : it->second) {
        if (budget > 0) --budget;
        if (seen.insert(parent).second) frontier.push_back(parent);
      }
    }
    if (seen.size() > limits.ancestor_bound) {
      report.status = WellDefinednessReport::Status::IllDefined;
      report.reason = WellDefinednessReport::Reason::InfiniteInfluenceSuspected;
      report.suspect = node;
      report.bound = limits.ancestor_bound;
      return report;
    }
    if (budget == 0) break;
  }

  report.status = WellDefinednessReport::Status::Undetermined;
  report.detail = "fixpoint not reached within " +
                  std::to_string(limits.max_iterations) + " iterations / " +
                  std::to_string(limits.max_atoms) + " atoms";
  return report;
}

}  // namespace blp
