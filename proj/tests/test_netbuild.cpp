#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"

#include "blp/errors.hpp"
#include "blp/netbuild.hpp"
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

// Boolean single-parent input: p(child=true|parent=true)=activation,
// p(child=true|parent=false)=0.
Cpd cause_input(const std::string& parent, double activation) {
  DiscreteTable table;
  table.parents = {Atom(parent)};
  table.values = {activation, 1.0 - activation, 0.0, 1.0};
  return table;
}

// A program supplying boolean 0-ary domains b0..b9 for rule unit tests.
Program boolean_context() {
  std::string source;
  for (int i = 0; i < 10; ++i) {
    std::string name = "b" + std::to_string(i);
    source += "domain(" + name + "/0, discrete, [true, false]).\n";
  }
  source += "b0.\ncpd(b0, [1.0, 0.0]).\n";
  return parse_program(source);
}

std::set<std::pair<Atom, Atom>> edge_set(const SupportNetwork& network) {
  std::set<std::pair<Atom, Atom>> out;
  for (const NetworkNode& node : network.nodes()) {
    for (const Atom& parent : node.parents()) {
      out.emplace(parent, node.atom);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("identity returns its single input, canonically ordered") {
  Program context = boolean_context();
  DomainLookup domains(context);
  Cpd input = cause_input("b1", 0.9);
  auto combined = combine(CombiningRuleRegistry::builtins().get("identity"),
                          Atom("b0"), {input}, domains);
  REQUIRE(combined.has_value());
  CHECK(*std::get_if<DiscreteTable>(&*combined) ==
        std::get<DiscreteTable>(input));

  CHECK_THROWS_AS(combine(CombiningRuleRegistry::builtins().get("identity"),
                          Atom("b0"), {input, input}, domains),
                  RuleArityError);
}

TEST_CASE("empty input yields empty output for every builtin") {
  Program context = boolean_context();
  DomainLookup domains(context);
  for (const char* name : {"identity", "max", "noisy_or"}) {
    auto combined = combine(CombiningRuleRegistry::builtins().get(name),
                            Atom("b0"), {}, domains);
    CHECK_FALSE(combined.has_value());
  }
}

TEST_CASE("unknown rules are rejected by name") {
  CHECK_THROWS_AS(CombiningRuleRegistry::builtins().get("nosuchrule"),
                  UnknownRuleError);
  // And at build time through a program that names one.
  Program program = parse_program(R"(
domain(p/0, discrete, [true, false]).
combining_rule(p/0, frobnicate).
p.
cpd(p, [1.0, 0.0]).
)");
  CHECK_THROWS_AS(build_support_network(program, {ga("p")}),
                  UnknownRuleError);
}

TEST_CASE("noisy_or multiplies independent inhibitions") {
  Program context = boolean_context();
  DomainLookup domains(context);
  auto combined = combine(
      CombiningRuleRegistry::builtins().get("noisy_or"), Atom("b0"),
      {cause_input("b1", 0.9), cause_input("b2", 0.8)}, domains);
  REQUIRE(combined.has_value());
  const DiscreteTable& table = std::get<DiscreteTable>(*combined);
  REQUIRE(table.parents == std::vector<Atom>{Atom("b1"), Atom("b2")});
  // Configurations run (b1,b2) = (t,t),(t,f),(f,t),(f,f); child true first.
  CHECK(table.values[0] == doctest::Approx(0.98).epsilon(1e-12));
  CHECK(table.values[2] == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(table.values[4] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(table.values[6] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("noisy_or matches the product formula for 1..4 causes") {
  Program context = boolean_context();
  DomainLookup domains(context);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> prob(0.0, 1.0);
  for (int causes = 1; causes <= 4; ++causes) {
    for (int round = 0; round < 20; ++round) {
      std::vector<double> activations;
      std::vector<Cpd> inputs;
      for (int k = 0; k < causes; ++k) {
        double p = prob(rng);
        activations.push_back(p);
        inputs.push_back(cause_input("b" + std::to_string(k + 1), p));
      }
      auto combined =
          combine(CombiningRuleRegistry::builtins().get("noisy_or"),
                  Atom("b0"), inputs, domains);
      const DiscreteTable& table = std::get<DiscreteTable>(*combined);
      // Exhaust every cause configuration.
      for (std::size_t config = 0; config < (std::size_t(1) << causes);
           ++config) {
        std::vector<bool> states(causes);
        for (int k = 0; k < causes; ++k) {
          // State index 0 is "true" in the declared order.
          states[k] = ((config >> (causes - 1 - k)) & 1) == 0;
        }
        double expected =
            blp::testing::noisy_or_true_probability(activations, states);
        CHECK(table.values[config * 2] ==
              doctest::Approx(expected).epsilon(1e-12));
        CHECK(table.values[config * 2] + table.values[config * 2 + 1] ==
              doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("noisy_or rejects unsuitable inputs") {
  Program context = parse_program(R"(
domain(tri/0, discrete, [low, mid, high]).
domain(b1/0, discrete, [true, false]).
domain(b0/0, discrete, [true, false]).
b0.
cpd(b0, [1.0, 0.0]).
)");
  DomainLookup domains(context);
  const CombiningRuleFn& rule =
      CombiningRuleRegistry::builtins().get("noisy_or");
  // Non-boolean child.
  CHECK_THROWS_AS(combine(rule, Atom("tri"), {cause_input("b1", 0.5)}, domains),
                  DomainError);
  // Multi-parent input.
  DiscreteTable two_parents;
  two_parents.parents = {Atom("b0"), Atom("b1")};
  two_parents.values = {1, 0, 1, 0, 1, 0, 0, 1};
  CHECK_THROWS_AS(combine(rule, Atom("b0"), {Cpd(two_parents)}, domains),
                  DomainError);
}

TEST_CASE("max reproduces disjunction on logical tables") {
  Program context = boolean_context();
  DomainLookup domains(context);
  auto combined =
      combine(CombiningRuleRegistry::builtins().get("max"), Atom("b0"),
              {cause_input("b1", 1.0), cause_input("b2", 1.0)}, domains);
  const DiscreteTable& table = std::get<DiscreteTable>(*combined);
  // (t,t),(t,f),(f,t) -> true; (f,f) -> false: the OR truth table.
  std::vector<double> expected{1, 0, 1, 0, 1, 0, 0, 1};
  CHECK(table.values == expected);
}

TEST_CASE("max is order-invariant on random inputs") {
  Program context = boolean_context();
  DomainLookup domains(context);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> prob(0.0, 1.0);
  const CombiningRuleFn& rule = CombiningRuleRegistry::builtins().get("max");
  for (int round = 0; round < 50; ++round) {
    std::vector<Cpd> inputs;
    for (int k = 1; k <= 3; ++k) {
      double p = prob(rng);
      double q = prob(rng);
      DiscreteTable table;
      table.parents = {Atom("b" + std::to_string(k))};
      table.values = {p, 1 - p, q, 1 - q};
      inputs.push_back(table);
    }
    auto forward = combine(rule, Atom("b0"), inputs, domains);
    std::vector<Cpd> shuffled = inputs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto backward = combine(rule, Atom("b0"), shuffled, domains);
    CHECK(std::get<DiscreteTable>(*forward) ==
          std::get<DiscreteTable>(*backward));

    // Associativity against pairwise application: max over a set equals
    // max of (max of first two) with the third.
    auto first_two =
        combine(rule, Atom("b0"), {inputs[0], inputs[1]}, domains);
    auto nested =
        combine(rule, Atom("b0"), {*first_two, inputs[2]}, domains);
    CHECK(std::get<DiscreteTable>(*forward) ==
          std::get<DiscreteTable>(*nested));
  }
}

TEST_CASE("combined tables stay normalized and rule axioms hold") {
  Program context = boolean_context();
  DomainLookup domains(context);
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> prob(0.0, 1.0);
  for (const char* name : {"max", "noisy_or"}) {
    const CombiningRuleFn& rule = CombiningRuleRegistry::builtins().get(name);
    for (int round = 0; round < 40; ++round) {
      std::vector<Cpd> inputs;
      std::set<Atom> expected_union;
      int k = 1 + static_cast<int>(rng() % 4);
      for (int i = 0; i < k; ++i) {
        std::string parent =
            "b" + std::to_string(1 + static_cast<int>(rng() % 5));
        inputs.push_back(cause_input(parent, prob(rng)));
        expected_union.insert(Atom(parent));
      }
      auto combined = combine(rule, Atom("b0"), inputs, domains);
      REQUIRE(combined.has_value());
      const DiscreteTable& table = std::get<DiscreteTable>(*combined);
      // Output parents equal the union of input parents.
      std::set<Atom> actual(table.parents.begin(), table.parents.end());
      CHECK(actual == expected_union);
      // Rows normalize.
      for (std::size_t offset = 0; offset < table.values.size(); offset += 2) {
        CHECK(table.values[offset] + table.values[offset + 1] ==
              doctest::Approx(1.0).epsilon(1e-9));
        CHECK(table.values[offset] >= 0.0);
        CHECK(table.values[offset + 1] >= 0.0);
      }
    }
  }
}

TEST_CASE("support network of height(fred) has 5 nodes and 4 edges") {
  Program program = load_program("height.blp");
  SupportNetwork network =
      build_support_network(program, {ga("height", {"fred"})});
  CHECK(network.node_count() == 5);
  CHECK(network.edge_count() == 4);
  for (const auto& [parent, child] : edge_set(network)) {
    (void)parent;
    CHECK(child == ga("height", {"fred"}));
  }
  // The combined cpd of the root conditions on all four parents.
  const NetworkNode& fred = network.node(ga("height", {"fred"}));
  const CondGaussian& cpd = std::get<CondGaussian>(fred.cpd);
  CHECK(cpd.discrete_parents.size() == 2);
  CHECK(cpd.continuous_parents.size() == 2);
  CHECK(cpd.entries.size() == 4);
}

TEST_CASE("union query spans two components; pruning removes the redundant one") {
  Program program = load_program("height.blp");
  SupportNetwork both = build_support_network(
      program, {ga("height", {"fred"}), ga("height", {"eric"})});
  CHECK(both.node_count() == 10);
  CHECK(both.undirected_components().size() == 2);

  SupportNetwork only_fred =
      build_support_network(program, {ga("height", {"fred"})});
  SupportNetwork pruned =
      prune(both, {ga("height", {"fred"})}, {ga("height", {"eric"})});
  CHECK(pruned.node_count() == only_fred.node_count());
  CHECK(edge_set(pruned) == edge_set(only_fred));

  // No evidence, single component: untouched.
  SupportNetwork same = prune(only_fred, {ga("height", {"fred"})}, {});
  CHECK(same.node_count() == only_fred.node_count());

  // Evidence inside the query component: untouched.
  SupportNetwork kept =
      prune(only_fred, {ga("height", {"fred"})}, {ga("height", {"ann"})});
  CHECK(kept.node_count() == only_fred.node_count());
}

TEST_CASE("unprovable atoms are undefined at build time") {
  Program program = load_program("height.blp");
  CHECK_THROWS_AS(build_support_network(program, {ga("height", {"nobody"})}),
                  UndefinedVariableError);
  CHECK_THROWS_AS(
      build_support_network(
          program, {ga("height", {"fred"}), ga("height", {"nobody"})}),
      UndefinedVariableError);
}

TEST_CASE("network union property over random atom subsets") {
  Program program = load_program("height.blp");
  Interpretation model = least_herbrand_model(program);
  std::vector<Atom> atoms(model.begin(), model.end());
  std::mt19937_64 rng(3);
  for (int round = 0; round < 12; ++round) {
    std::vector<Atom> a, b;
    for (const Atom& atom : atoms) {
      if (rng() % 4 == 0) a.push_back(atom);
      if (rng() % 4 == 0) b.push_back(atom);
    }
    if (a.empty() || b.empty()) continue;
    std::vector<Atom> unioned = a;
    unioned.insert(unioned.end(), b.begin(), b.end());

    SupportNetwork na = build_support_network(program, a);
    SupportNetwork nb = build_support_network(program, b);
    SupportNetwork nu = build_support_network(program, unioned);

    std::set<Atom> expected_nodes;
    for (const NetworkNode& node : na.nodes()) expected_nodes.insert(node.atom);
    for (const NetworkNode& node : nb.nodes()) expected_nodes.insert(node.atom);
    std::set<Atom> actual_nodes;
    for (const NetworkNode& node : nu.nodes()) actual_nodes.insert(node.atom);
    CHECK(actual_nodes == expected_nodes);

    std::set<std::pair<Atom, Atom>> expected_edges = edge_set(na);
    for (const auto& edge : edge_set(nb)) expected_edges.insert(edge);
    CHECK(edge_set(nu) == expected_edges);
  }
}

TEST_CASE("network nodes equal the influence closure of the query") {
  Program program = load_program("height.blp");
  Interpretation model = least_herbrand_model(program);
  DependencyGraph graph = dependency_graph(program, model);

  std::mt19937_64 rng(9);
  std::vector<Atom> atoms(model.begin(), model.end());
  for (int round = 0; round < 10; ++round) {
    std::vector<Atom> request;
    for (const Atom& atom : atoms) {
      if (rng() % 5 == 0) request.push_back(atom);
    }
    if (request.empty()) request.push_back(ga("height", {"john"}));

    SupportNetwork network = build_support_network(program, request);

    std::set<Atom> closure;
    std::vector<Atom> frontier = request;
    while (!frontier.empty()) {
      Atom current = frontier.back();
      frontier.pop_back();
      if (!closure.insert(current).second) continue;
      for (const Atom& parent : graph.parents_of(current)) {
        frontier.push_back(parent);
      }
    }
    std::set<Atom> nodes;
    for (const NetworkNode& node : network.nodes()) nodes.insert(node.atom);
    CHECK(nodes == closure);
  }
}

TEST_CASE("identity over multiple instances fails loudly") {
  // Two clauses prove q(a) but q's combining rule stays identity.
  Program program = parse_program(R"(
domain(p/1, discrete, [true, false]).
domain(q/1, discrete, [true, false]).
p(a).
q(X) | p(X).
q(X) | p(X).
cpd(p(a), [1.0, 0.0]).
cpd((q(X) | p(X)), [1.0, 0.0, 0.0, 1.0]).
cpd((q(X) | p(X)), [1.0, 0.0, 0.0, 1.0]).
)");
  CHECK_THROWS_AS(build_support_network(program, {ga("q", {"a"})}),
                  RuleArityError);
}

TEST_CASE("duplicate ground parents collapse to the consistent diagonal") {
  // One grounding maps both body atoms onto q(a).
  Program program = parse_program(R"(
domain(p/1, discrete, [true, false]).
domain(q/1, discrete, [true, false]).
q(a).
p(X) | q(X), q(X).
cpd(q(a), [0.7, 0.3]).
cpd((p(X) | q(X), q(X)), [0.9, 0.1, 0.5, 0.5, 0.5, 0.5, 0.2, 0.8]).
)");
  SupportNetwork network = build_support_network(program, {ga("p", {"a"})});
  const DiscreteTable& table =
      std::get<DiscreteTable>(network.node(ga("p", {"a"})).cpd);
  REQUIRE(table.parents == std::vector<Atom>{ga("q", {"a"})});
  // Diagonal of the original table: (t,t) and (f,f) rows.
  CHECK(table.values == std::vector<double>{0.9, 0.1, 0.2, 0.8});
}

TEST_CASE("cyclic hand-built networks are rejected") {
  DomainDecl boolean;
  boolean.kind = DomainDecl::Kind::Discrete;
  boolean.states = {"true", "false"};

  DiscreteTable a_cpd;
  a_cpd.parents = {Atom("b")};
  a_cpd.values = {0.5, 0.5, 0.5, 0.5};
  DiscreteTable b_cpd;
  b_cpd.parents = {Atom("a")};
  b_cpd.values = {0.5, 0.5, 0.5, 0.5};

  DomainDecl da = boolean;
  da.pred = PredicateId{"a", 0};
  DomainDecl db = boolean;
  db.pred = PredicateId{"b", 0};

  std::vector<NetworkNode> nodes;
  nodes.push_back(NetworkNode{Atom("a"), da, a_cpd});
  nodes.push_back(NetworkNode{Atom("b"), db, b_cpd});
  CHECK_THROWS_AS(SupportNetwork(std::move(nodes)), CycleError);
}

TEST_CASE("networks must be influence-closed") {
  DomainDecl da;
  da.pred = PredicateId{"a", 0};
  da.kind = DomainDecl::Kind::Discrete;
  da.states = {"true", "false"};
  DiscreteTable cpd;
  cpd.parents = {Atom("missing")};
  cpd.values = {0.5, 0.5, 0.5, 0.5};
  std::vector<NetworkNode> nodes;
  nodes.push_back(NetworkNode{Atom("a"), da, cpd});
  CHECK_THROWS_AS(SupportNetwork(std::move(nodes)), ValidationError);
}

TEST_CASE("topological order is deterministic and respects edges") {
  Program program = load_program("height.blp");
  SupportNetwork network =
      build_support_network(program, {ga("height", {"john"})});
  const std::vector<Atom>& order = network.topological_order();
  CHECK(order.size() == network.node_count());
  std::map<Atom, std::size_t> position;
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;
  for (const NetworkNode& node : network.nodes()) {
    for (const Atom& parent : node.parents()) {
      CHECK(position.at(parent) < position.at(node.atom));
    }
  }
}

TEST_CASE("noisy_or is input-order invariant") {
  Program context = boolean_context();
  DomainLookup domains(context);
  const CombiningRuleFn& rule =
      CombiningRuleRegistry::builtins().get("noisy_or");
  std::mt19937_64 rng(314);
  std::uniform_real_distribution<double> prob(0.0, 1.0);
  for (int round = 0; round < 30; ++round) {
    std::vector<Cpd> inputs;
    for (int k = 1; k <= 3; ++k) {
      inputs.push_back(cause_input("b" + std::to_string(k), prob(rng)));
    }
    auto forward = combine(rule, Atom("b0"), inputs, domains);
    std::vector<Cpd> shuffled = inputs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto backward = combine(rule, Atom("b0"), shuffled, domains);
    CHECK(std::get<DiscreteTable>(*forward) ==
          std::get<DiscreteTable>(*backward));
  }
}

TEST_CASE("gaussian cpd normalization keeps variances and merges duplicates") {
  Program context = parse_program(R"(
domain(h/1, continuous, real).
domain(d/1, discrete, [true, false]).
h(a). h(b). d(a).
cpd(h(a), [normal(0, 1)]).
cpd(h(b), [normal(0, 1)]).
cpd(d(a), [1.0, 0.0]).
)");
  DomainLookup domains(context);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> weight(-2.0, 2.0);
  std::uniform_real_distribution<double> var(0.0, 5.0);
  for (int round = 0; round < 25; ++round) {
    CondGaussian cpd;
    cpd.discrete_parents = {ga("d", {"a"}), ga("d", {"a"})};
    cpd.continuous_parents = {ga("h", {"b"}), ga("h", {"a"}), ga("h", {"b"})};
    for (int entry_i = 0; entry_i < 4; ++entry_i) {
      GaussianEntry entry;
      entry.intercept = weight(rng);
      entry.variance = var(rng);
      entry.weights = {weight(rng), weight(rng), weight(rng)};
      cpd.entries.push_back(entry);
    }
    Cpd normalized = normalize_cpd(ga("h", {"a"}), cpd, domains);
    const CondGaussian& out = std::get<CondGaussian>(normalized);
    REQUIRE(out.discrete_parents.size() == 1);
    REQUIRE(out.continuous_parents ==
            std::vector<Atom>{ga("h", {"a"}), ga("h", {"b"})});
    REQUIRE(out.entries.size() == 2);
    for (std::size_t e = 0; e < 2; ++e) {
      // Duplicate discrete parents pick up the diagonal entries (0 -> (t,t)
      // at index 0, 1 -> (f,f) at index 3).
      const GaussianEntry& source = cpd.entries[e == 0 ? 0 : 3];
      CHECK(out.entries[e].variance == source.variance);
      CHECK(out.entries[e].variance >= 0.0);
      CHECK(out.entries[e].intercept == source.intercept);
      CHECK(out.entries[e].weights[0] == source.weights[1]);
      CHECK(out.entries[e].weights[1] == source.weights[0] + source.weights[2]);
    }
  }
}
