#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace mfc {

// schema or parse failure in a run configuration; the CLI maps it to exit code 2
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// flat view of an INI-style file: "section.key" -> raw value
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(const std::string& text);
ConfigMap load_config_file(const std::string& path);

extern const char* const kToolVersion;

struct RunConfig {
    std::string subcommand;
    ConfigMap values;
    std::string out_dir = "out";
    std::size_t workers = 1;
    std::uint64_t master_seed = 0;
};

// loads and schema-validates the file for one subcommand; unknown keys are
// rejected. Seed resolution order: [run] seed, then the MFC_SEED variable.
RunConfig make_run_config(const std::string& subcommand, const std::string& config_path,
                          const std::string& out_override, std::size_t workers);

struct RunManifest {
    std::string subcommand;
    std::uint64_t master_seed = 0;
    std::string tool_version;
    std::map<std::string, std::string> file_hashes;  // artifact name -> sha1
    double duration_seconds = 0.0;
};

// executes the requested pipeline, writes CSV/SVG artifacts plus manifest.json
// into the output directory, and returns the manifest
RunManifest run(const RunConfig& config);

}  // namespace mfc
