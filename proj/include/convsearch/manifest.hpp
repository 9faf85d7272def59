#pragma once

#include <map>
#include <string>

#include <json.hpp>

namespace convsearch {

// Replay record written next to every command's outputs: the effective
// configuration, the seed when one applies, and SHA-256 checksums of every
// input and output file. Re-running the command with the embedded config
// must reproduce the outputs byte for byte.
struct Manifest {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    std::map<std::string, std::string> inputs;   // path -> sha256
    std::map<std::string, std::string> outputs;  // path -> sha256

    void add_input(const std::string& path);
    void add_output(const std::string& path);

    void save(const std::string& path) const;
    static Manifest load(const std::string& path);
};

}  // namespace convsearch
