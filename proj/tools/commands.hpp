#pragma once

#include <ostream>

#include "config.hpp"

namespace fraclab::cli {

// Each returns the process exit code (0 pass, 1 fail). Configuration
// problems surface as exceptions and are mapped to 2 by the caller.
int run_eigen(const RunConfig& cfg, std::ostream& out);
int run_verify(const RunConfig& cfg, std::ostream& out);
int run_certify(const RunConfig& cfg, std::ostream& out);
int run_semilinear(const RunConfig& cfg, std::ostream& out);
int run_fraclap(const RunConfig& cfg, std::ostream& out);

int dispatch(const RunConfig& cfg, std::ostream& out);

/// Exit code for an exception escaping a command.
int exit_code_for(const std::exception& e);

/// `path` with `_tag` inserted before the extension.
std::string tagged_path(const std::string& path, const std::string& tag);

}  // namespace fraclab::cli
