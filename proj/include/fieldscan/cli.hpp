#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fieldscan/artifacts.hpp"

namespace fieldscan::cli {

// Entry point behind the `fieldscan` binary; returns the process exit code.
// Every failure path prints one `error: ...` line on stderr and returns
// nonzero without leaving partial artifacts behind.
int run(int argc, const char* const* argv);

// Pieces shared by subcommands and the test/acceptance harness.

worldgen::FieldWorld build_world(const config::RunConfig& cfg);

struct PreparedRun {
    worldgen::FieldWorld world;
    planner::CoveragePlan plan;
    mission::MissionConfig mission_config;
};
PreparedRun prepare(const config::RunConfig& cfg);

// fly: mission + artifact writing into run_dir.
mission::MissionLog fly_into(const config::RunConfig& cfg,
                             const std::filesystem::path& run_dir,
                             bool quiet = false);

// eval: replay a finished run directory and write eval artifacts.
evaluation::EvalReport eval_run_dir(const std::filesystem::path& run_dir,
                                    bool quiet = false);

// Loads config snapshot + manifests back from a run directory.
struct LoadedRun {
    config::RunConfig cfg;
    mission::MissionLog log;
};
LoadedRun load_run_dir(const std::filesystem::path& run_dir);

}  // namespace fieldscan::cli
