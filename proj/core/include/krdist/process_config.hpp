#pragma once

#include <string>
#include <vector>

#include "krdist/experiments.hpp"
#include "krdist/kv_config.hpp"
#include "krdist/stpp.hpp"

namespace krdist {

// Reads [process<suffix>] and, for processes with a location law,
// [law<suffix>] (uniform on [0,1]^dim when absent).
ProcessSpec parse_process(const KvDocument& doc, const std::string& suffix = "");

ProcessSpec load_process_spec(const std::string& path);

// "geometric:lo:hi:k" or a comma separated list of increasing times.
std::vector<double> parse_t_grid(const std::string& text);

// [experiment] plus the process sections.
RateExperimentConfig parse_rate_config(const KvDocument& doc, const std::string& suffix = "");

}  // namespace krdist
