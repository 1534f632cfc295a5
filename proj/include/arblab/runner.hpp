#pragma once

#include <string>

#include "arblab/config.hpp"

namespace arblab {

// Executes one experiment subcommand, writing its reports (and the effective
// config) under options.out_dir. Returns 0 on success; throws ValidationError
// on bad input and ContractError on a violated numerical contract.
int run(const std::string& subcommand, const ExperimentConfig& cfg);

bool is_known_subcommand(const std::string& subcommand);

}  // namespace arblab
