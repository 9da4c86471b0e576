#pragma once

#include <iosfwd>
#include <string>

#include "entrans/config.hpp"

namespace entrans {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitSolver = 2, kExitNotSolvable = 3 };

// Each command writes into cfg.outputDir (created if missing) together with
// config.cfg, the effective configuration, and returns an exit code. Errors
// are reported on `err` and mapped to exit codes, never thrown.
int cmdFit(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmdTransport(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmdEvolve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmdSample(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmdCertify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmdContour(const RunConfig& cfg, std::ostream& out, std::ostream& err);

int runCommand(const std::string& name, const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace entrans
