#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace mfk::cli {

// args excludes the program name. Exit codes: 0 ok, 1 validation error, 2 runtime error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Fills defaults and normalizes a study config for `command` (converge, transfer,
// mcshane-check, modulus, simulate). Unknown keys are rejected with CONFIG_INVALID.
nlohmann::json resolve_config(std::string_view command, const nlohmann::json& raw);

// Study named by the config's "command" key, else inferred from its keys.
std::string detect_command(const nlohmann::json& raw);

}  // namespace mfk::cli
