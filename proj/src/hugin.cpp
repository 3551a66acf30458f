#include "blp/hugin.hpp"

#include <map>
#include <sstream>

#include "blp/errors.hpp"
#include "blp/text.hpp"

namespace blp {

std::string mangle_node_name(const Atom& atom) {
  std::string out;
  for (char c : atom.to_string()) {
    if (c == '(' || c == ')') continue;
    out += (c == ',') ? '_' : c;
  }
  return out;
}

namespace {

std::string mean_expression(const GaussianEntry& entry,
                            const std::vector<std::string>& parent_names) {
  std::string out;
  bool first = true;
  auto append = [&](double value, const std::string& suffix) {
    if (first) {
      out += format_double(value) + suffix;
      first = false;
      return;
    }
    if (value < 0.0) {
      out += " - " + format_double(-value) + suffix;
    } else {
      out += " + " + format_double(value) + suffix;
    }
  };
  bool all_zero_weights = true;
  for (double w : entry.weights) {
    if (w != 0.0) all_zero_weights = false;
  }
  if (entry.intercept != 0.0 || all_zero_weights) {
    append(entry.intercept, "");
  }
  for (std::size_t i = 0; i < entry.weights.size(); ++i) {
    if (entry.weights[i] == 0.0) continue;
    append(entry.weights[i], " * " + parent_names[i]);
  }
  return out;
}

}  // namespace

std::string export_hugin_net(const SupportNetwork& network) {
  std::map<Atom, std::string> names;
  std::map<std::string, Atom> taken;
  for (const NetworkNode& node : network.nodes()) {
    std::string name = mangle_node_name(node.atom);
    auto [it, inserted] = taken.emplace(name, node.atom);
    if (!inserted) {
      throw NameCollisionError("atoms " + it->second.to_string() + " and " +
                               node.atom.to_string() +
                               " both mangle to identifier '" + name + "'");
    }
    names.emplace(node.atom, std::move(name));
  }

  std::ostringstream out;
  out << "net\n{\n  node_size = (100 40);\n}\n";

  for (const Atom& atom : network.topological_order()) {
    const NetworkNode& node = network.node(atom);
    if (node.domain.is_discrete()) {
      out << "\ndiscrete node " << names.at(atom) << "\n{\n  states = (";
      for (const std::string& state : node.domain.states) {
        out << " \"" << state << "\"";
      }
      out << " );\n  label = \"" << atom.to_string() << "\";\n}\n";
    } else {
      out << "\ncontinuous node " << names.at(atom) << "\n{\n  label = \""
          << atom.to_string() << "\";\n}\n";
    }
  }

  for (const Atom& atom : network.topological_order()) {
    const NetworkNode& node = network.node(atom);
    std::vector<Atom> parents = node.parents();
    out << "\npotential ( " << names.at(atom);
    if (!parents.empty()) {
      out << " |";
      for (const Atom& parent : parents) out << ' ' << names.at(parent);
    }
    out << " )\n{\n  data = (";
    if (const DiscreteTable* table = std::get_if<DiscreteTable>(&node.cpd)) {
      for (double value : table->values) out << ' ' << format_double(value);
    } else {
      const CondGaussian& gaussian = std::get<CondGaussian>(node.cpd);
      std::vector<std::string> parent_names;
      for (const Atom& parent : gaussian.continuous_parents) {
        parent_names.push_back(names.at(parent));
      }
      for (const GaussianEntry& entry : gaussian.entries) {
        out << " normal( " << mean_expression(entry, parent_names) << ", "
            << format_double(entry.variance) << " )";
      }
    }
    out << " );\n}\n";
  }
  return out.str();
}

}  // namespace blp
