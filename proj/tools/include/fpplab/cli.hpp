#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpp/edge_field.hpp"
#include "fpp/errors.hpp"
#include "fpp/game.hpp"

namespace fpplab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

/// Exit status for a library error: 2 for configuration and validation
/// problems, 1 for everything else.
int exit_code_for(fpp::ErrorCode code);

/// Field described by `d`, `L` or `box.lo`/`box.hi`, `dist.*` and `seed`.
fpp::EdgeField field_from_config(const fpp::KeyValueConfig& cfg, int threads);

nlohmann::ordered_json plan_to_json(const fpp::EscapePlan& plan);
nlohmann::ordered_json trace_to_json(const fpp::GameTrace& trace);

/// Full command line, argv[0] included. Never throws; returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fpplab
