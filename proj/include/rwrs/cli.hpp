#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace rwrs::cli {

using json = nlohmann::ordered_json;

/// Configuration problem: exit code 2, no artifacts written.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
/// Output problem: exit code 4.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Executes one fully resolved experiment config. Returns the process exit
/// code: 0 on success, 3 when a solver reports a non-converged/flagged result
/// (artifacts are still written in that case).
int run(const json& config);

/// Validates without executing (malformed input must not leave artifacts).
void validate(const json& config);

/// b specifications: a plain number, or "auto-smalldev:theta" for
/// b_n = n^{-1/2} (log n)^theta.
double resolve_b(const json& bspec, double n, bool* smalldev, double* theta);

std::string format_double(double x);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                               std::vector<std::string>* header);

}  // namespace rwrs::cli
