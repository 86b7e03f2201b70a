#ifndef ETS_CLI_HPP
#define ETS_CLI_HPP

#include <string>
#include <vector>

#include "ets/scenario.hpp"

// Command implementations behind the command-line tool: calibrate, solve,
// diagnose, compare. Exit codes: 0 success, 2 validation failure,
// 3 non-convergence, 4 infeasibility.

namespace ets::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNotConverged = 3;
inline constexpr int kExitInfeasible = 4;

struct Archive {
  scenario::ScenarioConfig config;
  nash::World world;
  nash::EquilibriumSolution solution;
};

void write_archive(const std::string& dir, const scenario::ScenarioConfig& cfg,
                   const nash::World& world, const nash::EquilibriumSolution& solution);
Archive load_archive(const std::string& dir);

int cmd_calibrate(const std::string& data_dir, const std::string& out_params_file);
int cmd_solve(const scenario::ScenarioConfig& cfg);
int cmd_diagnose(const std::string& archive_dir, const std::string& archive_no_ets_dir,
                 const std::string& out_dir);
int cmd_compare(const std::vector<std::string>& archive_dirs, const std::string& out_dir);

}  // namespace ets::cli

#endif
