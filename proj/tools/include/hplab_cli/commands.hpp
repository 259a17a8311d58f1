#pragma once

#include "hplab_cli/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hplab::cli {

/// A failure inside one pipeline stage, with the stage name attached.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, std::string kind, const std::string& what, int code)
        : std::runtime_error(what), stage_(std::move(stage)), kind_(std::move(kind)), code_(code)
    {
    }
    const std::string& stage() const { return stage_; }
    const std::string& kind() const { return kind_; }
    int exit_code() const { return code_; }
    Json record() const;

private:
    std::string stage_, kind_;
    int code_;
};

const std::vector<std::string>& subcommands();

/// Runs a fully resolved experiment and returns the artifact paths in write order.
std::vector<std::filesystem::path> execute(ExperimentConfig cfg);

/// Command-line entry point. Prints artifact paths to `out`; on failure prints
/// a one-line JSON error record to `err` and returns a nonzero code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hplab::cli
