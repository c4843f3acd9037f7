#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace hiht {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

// Every key accepted in a config file or through --set.
const std::vector<std::string>& valid_config_keys();

// Entry point shared by the hiht executable and the tests.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hiht
