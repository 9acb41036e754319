#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dts {

// Runs one command-line invocation. All output (results, reports, and error
// documents) goes to `out` as a single JSON document; exit codes are
// 0 = true / passed, 1 = false / failed, 2 = error.
int run_cli(const std::vector<std::string>& args, std::ostream& out);

}  // namespace dts
