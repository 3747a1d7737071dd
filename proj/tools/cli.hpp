#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mggo::cli {

/// Runs the `mggo` command line with `args` (program name excluded).
/// Results go to `out`; failures are reported on `err` as
/// {"error": {"kind": ..., "message": ...}} and yield a non-zero code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Git-style blob SHA-1 of `bytes` ("blob <size>\0" prefix), lowercase hex.
std::string git_blob_sha1(const std::string& bytes);

}  // namespace mggo::cli
