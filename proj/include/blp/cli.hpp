#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "blp/infer.hpp"

namespace blp {

// Human-readable rendering of a query answer.
std::string answer_text(const QueryAnswer& answer);

// JSON rendering: {"kind": "discrete"|"gaussian"|"mixture", "variables": ...,
// payload per kind}. Numbers round-trip to full double precision.
std::string answer_json(const QueryAnswer& answer);

// Command-line entry point. Subcommands: check, query, shell.
// Exit status 0 on success, 1 on user error, 2 on resource or internal error.
int run_cli(const std::vector<std::string>& args, std::istream& in,
            std::ostream& out, std::ostream& err);

}  // namespace blp
