#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace phi4 {

/// Flat dotted-key configuration.  Two interchangeable file formats:
///   - plain text "key = value" lines, '#' comments, [section] headers
///     prefixing the keys that follow;
///   - a JSON object (nested objects flatten to dotted keys).
/// A file whose first non-space character is '{' is parsed as JSON.
class Config {
  public:
    Config() = default;

    static Config load(const std::filesystem::path& file);
    static Config from_text(const std::string& text);
    static Config from_json_text(const std::string& text);

    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    std::string get_string(const std::string& key, const std::string& def) const;
    double get_double(const std::string& key, double def) const;
    int get_int(const std::string& key, int def) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t def) const;
    bool get_bool(const std::string& key, bool def) const;
    std::vector<double> get_list(const std::string& key, const std::vector<double>& def) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

    /// Resolved config as a JSON object (manifest payload); loadable again
    /// via Config::load, so a manifest re-runs the experiment byte-identically.
    std::string to_json() const;

  private:
    std::map<std::string, std::string> kv_;
};

/// Collects constraint violations; empty means valid.
struct ConfigValidation {
    std::vector<std::string> errors;
    bool ok() const { return errors.empty(); }
    void require(bool cond, const std::string& message) {
        if (!cond) errors.push_back(message);
    }
};

}  // namespace phi4
