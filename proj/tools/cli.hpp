#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lehi::cli {

/// Runs the `lehi` command line. Errors are reported on `err` as a single
/// "error: <message>" line and a nonzero return value.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lehi::cli
