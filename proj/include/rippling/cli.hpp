#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rippling {

/// Runs one command line (without the program name). Returns 0 on success,
/// 1 for a legitimate negative answer (no match, open proof), 2 for usage or
/// input errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rippling
