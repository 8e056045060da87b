#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace lwhcli {

const std::vector<std::string>& suite_names();

// Runs one named suite (or "all"); the report carries every check and an overall "pass".
nlohmann::json run_suite(const std::string& name, long L);

}  // namespace lwhcli
