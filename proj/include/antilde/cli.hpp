#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace antilde {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitConfig = 2;

inline constexpr const char* kReportFormatVersion = "antilde-report-1";

struct RunConfig {
    std::string command; ///< geometry, building-verify, validate, search, coinvariants, abelianization, certify, all
    int n = 2;
    int p = 2; ///< also the residue order q
    int precision = 2;
    std::optional<std::filesystem::path> presentation;
    std::filesystem::path out = ".";
    std::uint64_t seed = 1;
    bool unbounded = false;
    std::size_t max_results = 0; ///< search limit, 0 for all

    static const std::vector<std::string>& commands();
    /// True when n = 2, p in {2, 3} and precision <= 3.
    bool within_envelope() const noexcept;
};

/// Runs one command, writing one report per stage under config.out. Progress
/// goes to `log`, errors and warnings to `err`. Returns the exit status.
int run(const RunConfig& config, std::ostream& log, std::ostream& err);

/// Parses argv and calls run().
int cli_main(int argc, char** argv);

} // namespace antilde
