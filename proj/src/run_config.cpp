#include "trident/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace trident::config {

namespace {

// Every key the runner understands, by section. The schema gate keeps typos
// from silently configuring nothing.
const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s = {
        {"data",
         {"root", "manifest", "rf_sample_rate", "files", "difficulty",
          "class_balance", "p_daylight", "p_urban", "p_los", "frame_px",
          "seed"}},
        {"models",
         {"audio", "video", "rf", "shrink", "weights_dir"}},
        {"fusion",
         {"type", "modalities", "gmu_hidden", "epochs", "lr", "weights"}},
        {"augment", {"scenario", "config", "probes", "seed"}},
        {"train",
         {"epochs", "batch_size", "lr_min", "lr_max", "seed", "modality",
          "arch"}},
        {"eval", {"report", "scenario", "split"}},
        {"bench", {"iterations", "warmup", "samples"}},
    };
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig RunConfig::parse_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            if (!schema().count(section))
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": unknown section [" + section + "]");
            cfg.values_.try_emplace(section);
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        if (section.empty())
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": key outside any section");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (!schema().at(section).count(key))
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": unknown key \"" + key + "\" in [" +
                                     section + "]");
        if (cfg.values_[section].count(key))
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": duplicate key \"" + key + "\"");
        cfg.values_[section][key] = value;
    }
    return cfg;
}

RunConfig RunConfig::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str());
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
    const auto it = values_.find(section);
    return it != values_.end() && it->second.count(key) > 0;
}

std::string RunConfig::get(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
    const auto it = values_.find(section);
    if (it == values_.end()) return fallback;
    const auto kit = it->second.find(key);
    return kit == it->second.end() ? fallback : kit->second;
}

double RunConfig::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key, "");
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::runtime_error("config [" + section + "] " + key +
                                 ": not a number: \"" + v + "\"");
    }
}

long RunConfig::get_int(const std::string& section, const std::string& key,
                        long fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key, "");
    try {
        std::size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::runtime_error("config [" + section + "] " + key +
                                 ": not an integer: \"" + v + "\"");
    }
}

void RunConfig::set(const std::string& section, const std::string& key,
                    const std::string& value) {
    if (!schema().count(section) || !schema().at(section).count(key))
        throw std::runtime_error("unknown config key [" + section + "] " + key);
    values_[section][key] = value;
}

std::string RunConfig::serialize() const {
    std::ostringstream out;
    for (const auto& [section, kv] : values_) {
        out << "[" << section << "]\n";
        for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
        out << "\n";
    }
    return out.str();
}

}  // namespace trident::config
