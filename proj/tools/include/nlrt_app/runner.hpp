#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "nlrt_app/config.hpp"
#include "nlrt_app/csv.hpp"

namespace nlrt::app {

enum ExitCode : int { exit_ok = 0, exit_failed = 1, exit_config = 2, exit_io = 3, exit_numeric = 4 };

struct Bundle {
  std::map<std::string, Csv> tables;  // file name -> body
  double non_crossing_rate = 0.0;
  bool failed = false;
  std::vector<std::string> notes;  // human-readable verdict lines
};

/// Runs the experiment without touching the file system.
Bundle execute(const ExperimentConfig& config);

/// execute() plus writing <output>/<table>.csv and <output>/manifest.json.
int run(const ExperimentConfig& config, std::ostream& log);

}  // namespace nlrt::app
