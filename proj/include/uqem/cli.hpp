#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uqem {

inline constexpr const char* kSeedEnvVar = "UQEM_SEED";

/// Exit codes: 0 success, 1 usage or configuration error, 2 numerical or
/// infeasibility error.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace uqem
