#include "convsearch/manifest.hpp"

#include "convsearch/error.hpp"
#include "convsearch/io.hpp"

namespace convsearch {

void Manifest::add_input(const std::string& path) { inputs[path] = sha256_file(path); }

void Manifest::add_output(const std::string& path) { outputs[path] = sha256_file(path); }

void Manifest::save(const std::string& path) const {
    nlohmann::json j;
    j["command"] = command;
    j["config"] = config;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    write_text_file(path, j.dump(2) + "\n");
}

Manifest Manifest::load(const std::string& path) {
    const nlohmann::json j = nlohmann::json::parse(read_text_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ParseError(path + ": malformed manifest");
    Manifest m;
    m.command = j.value("command", "");
    m.config = j.value("config", nlohmann::json::object());
    for (const auto& [k, v] : j.value("inputs", nlohmann::json::object()).items())
        m.inputs[k] = v.get<std::string>();
    for (const auto& [k, v] : j.value("outputs", nlohmann::json::object()).items())
        m.outputs[k] = v.get<std::string>();
    return m;
}

}  // namespace convsearch
