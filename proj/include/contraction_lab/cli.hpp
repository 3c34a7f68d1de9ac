#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace contraction_lab {

enum ExitCode : int {
  kExitPass = 0,
  kExitVerdictFailure = 1,
  kExitInconclusive = 2,
  kExitNoCertificate = 3,
  kExitUsage = 64,
};

/// Runs one command line (`args` excludes the program name). Reports go to
/// `out`, diagnostics to `err`; artifacts are written under --out.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace contraction_lab
