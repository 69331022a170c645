#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace densplit {

/// Runs one command; `args` excludes the program name. Returns 0 on success,
/// 1 when a checked property fails, 2 on usage or precondition errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace densplit
