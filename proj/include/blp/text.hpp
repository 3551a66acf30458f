#pragma once

#include <string>
#include <vector>

namespace blp {

// Shortest decimal form that round-trips through double. Used everywhere a
// number reaches program text, NET exports or JSON, so that re-parsing
// reproduces the exact bits.
std::string format_double(double value);

std::string join(const std::vector<std::string>& parts,
                 const std::string& separator);

}  // namespace blp
