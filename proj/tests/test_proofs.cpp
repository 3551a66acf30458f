#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <tuple>

#include "doctest.h"

#include "blp/errors.hpp"
#include "blp/proofs.hpp"
#include "blp/semantics.hpp"
#include "support/oracles.hpp"
#include "support/paths.hpp"

using namespace blp;
using blp::testing::load_program;

namespace {

Atom ga(const std::string& pred, std::vector<std::string> constants = {}) {
  std::vector<Term> args;
  for (std::string& name : constants) args.push_back(Term::constant(name));
  return Atom(pred, std::move(args));
}

Atom odd_s0() {
  return Atom("odd", {Term::compound("s", {Term::constant("0")})});
}

}  // namespace

TEST_CASE("height(gwenn) has exactly one successful path") {
  Program program = load_program("height.blp");
  SldTree tree = build_sld_tree(program, {ga("height", {"gwenn"})});
  REQUIRE(tree.success_count() == 1);

  // The proof runs through ann and unknown2.
  int leaf = tree.success_leaves()[0];
  Substitution answer = tree.answer_substitution(leaf);
  SolutionGraph graph = solution_graph(program, {ga("height", {"gwenn"})});
  CHECK(graph.has_or_node(ga("mother", {"ann", "gwenn"})));
  CHECK(graph.has_or_node(ga("father", {"unknown2", "gwenn"})));
  (void)answer;
}

TEST_CASE("unprovable goals yield zero successful paths") {
  Program program = load_program("height.blp");
  SldTree tree = build_sld_tree(program, {ga("height", {"nobody"})});
  CHECK(tree.success_count() == 0);
}

TEST_CASE("odd(s(0)) proof has resolution length three") {
  Program program = load_program("evenodd.blp");
  SldTree tree = build_sld_tree(program, {odd_s0()});
  REQUIRE(tree.success_count() == 1);
  // Nodes on the path: odd(s(0)), even(0), success.
  CHECK(tree.path_from_root(tree.success_leaves()[0]).size() == 3);
}

TEST_CASE("infinite SLD trees hit the limits loudly") {
  Program cycle = load_program("illdefined_cycle.blp");
  ProofLimits limits;
  limits.max_depth = 64;
  limits.max_nodes = 5000;
  CHECK_THROWS_AS(build_sld_tree(cycle, {ga("r", {"a"})}, limits),
                  ResourceExceeded);

  Program infinite = load_program("illdefined_infinite.blp");
  CHECK_THROWS_AS(build_sld_tree(infinite, {ga("r", {"a"})}, limits),
                  ResourceExceeded);
}

TEST_CASE("solution graph of height(fred)") {
  Program program = load_program("height.blp");
  SolutionGraph graph = solution_graph(program, {ga("height", {"fred"})});

  std::set<Atom> expected{ga("height", {"fred"}), ga("mother", {"ann", "fred"}),
                          ga("father", {"unknown1", "fred"}),
                          ga("height", {"ann"}), ga("height", {"unknown1"})};
  std::set<Atom> actual;
  for (const auto& [atom, children] : graph.or_nodes()) {
    (void)children;
    actual.insert(atom);
  }
  CHECK(actual == expected);

  // One clause instance proves height(fred); the facts prove the rest.
  CHECK(graph.and_children(ga("height", {"fred"})).size() == 1);
  const SolutionGraph::AndNode& instance =
      graph.and_nodes()[graph.and_children(ga("height", {"fred"}))[0]];
  CHECK(instance.body.size() == 4);

  CHECK(graph.and_children(ga("height", {"ann"})).size() == 1);
  CHECK(graph.and_nodes()[graph.and_children(ga("height", {"ann"}))[0]]
            .body.empty());
}

TEST_CASE("unprovable atoms contribute an empty graph") {
  Program program = load_program("height.blp");
  SolutionGraph graph = solution_graph(program, {ga("height", {"nobody"})});
  CHECK(graph.empty());

  // The union over a provable and an unprovable atom only covers the former.
  SolutionGraph partial = solution_graph(
      program, {ga("height", {"nobody"}), ga("height", {"ann"})});
  CHECK(partial.or_count() == 1);
}

TEST_CASE("duplicate proofs collapse; twin clauses stay distinct") {
  // p(a) provable through q twice via two identical-bodied clauses.
  Program program = parse_program(R"(
domain(p/1, discrete, [true, false]).
domain(q/1, discrete, [true, false]).
combining_rule(p/1, max).
q(a).
p(X) | q(X).
p(X) | q(X).
cpd(q(a), [1.0, 0.0]).
cpd((p(X) | q(X)), [1.0, 0.0, 0.0, 1.0]).
cpd((p(X) | q(X)), [0.5, 0.5, 0.0, 1.0]).
)");
  SolutionGraph graph = solution_graph(program, {ga("p", {"a"})});
  // Two and-nodes for p(a): one per clause id, same ground body.
  CHECK(graph.and_children(ga("p", {"a"})).size() == 2);

  // Replaying the same query twice adds nothing.
  SolutionGraph twice =
      solution_graph(program, {ga("p", {"a"}), ga("p", {"a"})});
  CHECK(twice.and_count() == graph.and_count());
}

TEST_CASE("or-and edges equal ground instances inside the model") {
  // Properties 5.10/5.11 checked exhaustively on random function-free
  // programs: build the union solution graph of every provable atom and
  // compare its and-nodes against all ground clause instances whose atoms
  // lie in the least Herbrand model.
  std::mt19937_64 rng(17);
  for (int round = 0; round < 20; ++round) {
    blp::testing::LogicalProgramSample sample =
        blp::testing::random_logical_program(rng());
    Program program = parse_program(sample.source);
    Interpretation model = least_herbrand_model(program);
    if (model.empty()) continue;

    std::vector<Atom> all_atoms(model.begin(), model.end());
    SolutionGraph graph = solution_graph(program, all_atoms);

    // Every model atom is an or-node with at least one proof.
    for (const Atom& atom : model) {
      CHECK(graph.has_or_node(atom));
      CHECK(graph.and_children(atom).size() > 0);
    }

    // Property 5.11: the and-nodes are exactly the ground clause instances
    // whose atoms all lie in the model, enumerated here by brute force.
    std::set<std::string> constants;
    std::function<void(const Term&)> walk = [&](const Term& term) {
      if (term.is_constant()) constants.insert(term.symbol());
      for (const Term& arg : term.args()) walk(arg);
    };
    for (const Clause& clause : program.clauses()) {
      for (const Term& arg : clause.head.args()) walk(arg);
      for (const Atom& atom : clause.body) {
        for (const Term& arg : atom.args()) walk(arg);
      }
    }
    std::vector<std::string> pool(constants.begin(), constants.end());
    if (pool.empty()) pool.push_back("a");

    std::set<std::tuple<int, std::string, std::string>> expected_instances;
    for (const Clause& clause : program.clauses()) {
      std::set<std::string> vars = clause.head.variables();
      for (const Atom& atom : clause.body) atom.collect_variables(vars);
      std::vector<std::string> var_list(vars.begin(), vars.end());
      std::vector<std::size_t> state(var_list.size(), 0);
      for (;;) {
        Substitution subst;
        for (std::size_t i = 0; i < var_list.size(); ++i) {
          subst.insert(var_list[i], Term::constant(pool[state[i]]));
        }
        Clause instance = subst.apply(clause);
        bool inside = model.count(instance.head) > 0;
        for (const Atom& atom : instance.body) {
          if (!model.count(atom)) inside = false;
        }
        if (inside) {
          std::string body_text;
          for (const Atom& atom : instance.body) {
            body_text += atom.to_string() + ";";
          }
          expected_instances.emplace(clause.id, instance.head.to_string(),
                                     body_text);
        }
        std::size_t i = 0;
        for (; i < state.size(); ++i) {
          if (++state[i] < pool.size()) break;
          state[i] = 0;
        }
        if (i == state.size()) break;
      }
    }
    std::set<std::tuple<int, std::string, std::string>> actual_instances;
    for (const SolutionGraph::AndNode& node : graph.and_nodes()) {
      std::string body_text;
      for (const Atom& atom : node.body) body_text += atom.to_string() + ";";
      actual_instances.emplace(node.clause_id, node.head.to_string(),
                               body_text);
    }
    CHECK(actual_instances == expected_instances);

    // The and-node set keyed by (clause, body) must match the dependency
    // structure: grandchildren of each or-node equal its dependency-graph
    // parents (Property 5.12).
    DependencyGraph dependency = dependency_graph(program, model);
    for (const Atom& atom : model) {
      std::set<Atom> grandchildren;
      for (std::size_t and_id : graph.and_children(atom)) {
        for (const Atom& body_atom : graph.and_nodes()[and_id].body) {
          grandchildren.insert(body_atom);
        }
      }
      std::set<Atom> parents;
      for (const Atom& parent : dependency.parents_of(atom)) {
        parents.insert(parent);
      }
      CHECK(grandchildren == parents);
    }
  }
}

TEST_CASE("tree construction is deterministic") {
  Program program = load_program("height.blp");
  SldTree first = build_sld_tree(program, {ga("height", {"john"})});
  SldTree second = build_sld_tree(program, {ga("height", {"john"})});
  CHECK(first.dump() == second.dump());
  CHECK(first.nodes().size() == second.nodes().size());
}

TEST_CASE("tree dump is a readable golden") {
  Program program = load_program("evenodd.blp");
  SldTree tree = build_sld_tree(program, {odd_s0()});
  CHECK(tree.dump() ==
        "?- odd(s(0))\n"
        "  ?- even(0)  (c2)\n"
        "    success  (c0)\n");
}

TEST_CASE("goals must be non-empty and ground for graphs") {
  Program program = load_program("height.blp");
  CHECK_THROWS_AS(build_sld_tree(program, {}), ValidationError);
  CHECK_THROWS_AS(
      solution_graph(program, {Atom("height", {Term::variable("X")})}),
      NonGroundQueryError);
}

TEST_CASE("every solution-graph atom lies in the least Herbrand model") {
  std::mt19937_64 rng(271);
  for (int round = 0; round < 15; ++round) {
    blp::testing::LogicalProgramSample sample =
        blp::testing::random_logical_program(rng());
    Program program = parse_program(sample.source);
    Interpretation model = least_herbrand_model(program);
    for (const Atom& probe : sample.probes) {
      SolutionGraph graph = solution_graph(program, {probe});
      for (const auto& [atom, children] : graph.or_nodes()) {
        (void)children;
        CHECK(model.count(atom) == 1);
      }
    }
  }
}
