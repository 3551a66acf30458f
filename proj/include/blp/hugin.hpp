#pragma once

#include <string>

#include "blp/netbuild.hpp"

namespace blp {

// Node identifier in a NET document: the atom's text with '(' and ')'
// removed and ',' mapped to '_'.
std::string mangle_node_name(const Atom& atom);

// Serializes a support network in the Hugin NET subset: header, one node
// block per network node and one potential block per node, all in
// deterministic topological order (ties broken lexicographically).
// NameCollisionError if two distinct atoms mangle to the same identifier.
std::string export_hugin_net(const SupportNetwork& network);

}  // namespace blp
