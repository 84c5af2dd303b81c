#pragma once

#include <string>
#include <utility>
#include <vector>

namespace heatctl {

// Files under data/, keyed by path relative to it ("presets/x.json"),
// compiled in at build time.
[[nodiscard]] const std::vector<std::pair<std::string, std::string>>& embedded_files();

}  // namespace heatctl
