#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace trident::config {

// Sectioned key = value text configuration. Sections and keys are schema
// checked before any work starts; unknown names are rejected outright.
class RunConfig {
public:
    static RunConfig parse_file(const std::filesystem::path& path);
    static RunConfig parse_text(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key,
                      double fallback) const;
    long get_int(const std::string& section, const std::string& key,
                 long fallback) const;

    void set(const std::string& section, const std::string& key,
             const std::string& value);

    std::string serialize() const;

private:
    // section -> key -> value
    std::map<std::string, std::map<std::string, std::string>> values_;
};

}  // namespace trident::config
