#pragma once

#include <map>
#include <string>
#include <vector>

namespace akmmd {

/// Line-oriented `key = value` configuration with `#` comments.
/// Every key can be overridden by a same-named command-line flag
/// (`--key value` or `--key=value`).
class Config {
public:
    void load_file(const std::string& path);
    /// Consumes `--key value` / `--key=value` pairs.
    void apply_flags(const std::vector<std::string>& args);
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;
    std::string get_str(const std::string& key, const std::string& def) const;
    double get_double(const std::string& key, double def) const;
    int get_int(const std::string& key, int def) const;
    long long get_ll(const std::string& key, long long def) const;
    bool get_bool(const std::string& key, bool def) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

}  // namespace akmmd
