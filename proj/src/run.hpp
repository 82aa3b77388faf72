#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

namespace hpa::cli {

enum ExitCode { kOk = 0, kOtherFailure = 1, kNumericFailure = 2, kConfigFailure = 3 };

struct RunRequest {
    std::string subcommand;
    std::optional<std::string> config_text;   // JSON text of --config
    nlohmann::json overrides = nlohmann::json::object(); // flag values, applied on top of the config
    std::filesystem::path out_dir = "out";
    std::optional<std::uint64_t> seed;
};

// Executes one subcommand and writes its artifacts plus run_manifest.json into out_dir.
int run(const RunRequest& req, std::ostream& log);

// "disk", "disk:2", "ellipse:2,1", "pnorm:4:1,1", "square", "square:2", "polygon:x,y;x,y;..."
nlohmann::json body_from_flag(const std::string& spec);

// "body", "power:2", optionally suffixed with ":inverted"
nlohmann::json weight_from_flag(const std::string& spec);

} // namespace hpa::cli
