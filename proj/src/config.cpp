#include "phi4/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace phi4 {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

void flatten_json(const nlohmann::json& j, const std::string& prefix,
                  std::map<std::string, std::string>& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
            flatten_json(it.value(), key, out);
        }
    } else if (j.is_array()) {
        std::ostringstream os;
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) os << ",";
            if (j[i].is_number())
                os << j[i].dump();
            else
                os << j[i].get<std::string>();
        }
        out[prefix] = os.str();
    } else if (j.is_string()) {
        out[prefix] = j.get<std::string>();
    } else {
        out[prefix] = j.dump();
    }
}

}  // namespace

Config Config::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("Config: cannot open " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        if (c == '{') return from_json_text(text);
        break;
    }
    return from_text(text);
}

Config Config::from_text(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("Config: malformed line: " + line);
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!section.empty()) key = section + "." + key;
        cfg.kv_[key] = value;
    }
    return cfg;
}

Config Config::from_json_text(const std::string& text) {
    Config cfg;
    flatten_json(nlohmann::json::parse(text), "", cfg.kv_);
    return cfg;
}

std::string Config::get_string(const std::string& key, const std::string& def) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? def : it->second;
}

double Config::get_double(const std::string& key, double def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    try {
        return std::stod(it->second);
    } catch (...) {
        throw std::runtime_error("Config: key '" + key + "' is not a number: " + it->second);
    }
}

int Config::get_int(const std::string& key, int def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    try {
        return std::stoi(it->second);
    } catch (...) {
        throw std::runtime_error("Config: key '" + key + "' is not an integer: " + it->second);
    }
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    try {
        return std::stoull(it->second);
    } catch (...) {
        throw std::runtime_error("Config: key '" + key + "' is not an integer: " + it->second);
    }
}

bool Config::get_bool(const std::string& key, bool def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::runtime_error("Config: key '" + key + "' is not a boolean: " + it->second);
}

std::vector<double> Config::get_list(const std::string& key,
                                     const std::vector<double>& def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    std::vector<double> out;
    std::istringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

std::string Config::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : kv_) j[k] = v;
    return j.dump(2);
}

}  // namespace phi4
