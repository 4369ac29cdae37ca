#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace thorin::cli {

// Exit codes: 0 success, 1 malformed JSON, 2 validation or precondition failure (and usage
// errors), 3 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace thorin::cli
