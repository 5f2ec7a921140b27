#pragma once

#include <string>

#include "sqqss/config.hpp"

namespace sqqss {

struct PresetOutput {
  std::string csv_path;
  std::string summary;  // newline-terminated report lines
};

/// Runs the configured experiment and writes its CSV. An empty out_path
/// defaults to "<preset name>.csv" in the working directory. Output is
/// deterministic given the config, including byte-identical CSV files.
PresetOutput run_preset(const ExperimentConfig& config,
                        const std::string& out_path = "");

}  // namespace sqqss
