#include "akmmd/config.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace akmmd {

namespace {
std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}
}  // namespace

void Config::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: missing '=' at " + path + ":" +
                                     std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("config: empty key at " + path + ":" +
                                     std::to_string(lineno));
        kv_[key] = val;
    }
}

void Config::apply_flags(const std::vector<std::string>& args) {
    for (size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.rfind("--", 0) != 0)
            throw std::runtime_error("config: expected --key, got '" + a + "'");
        std::string key = a.substr(2);
        const auto eq = key.find('=');
        if (eq != std::string::npos) {
            kv_[key.substr(0, eq)] = key.substr(eq + 1);
        } else {
            if (i + 1 >= args.size())
                throw std::runtime_error("config: flag --" + key + " needs a value");
            kv_[key] = args[++i];
        }
    }
}

void Config::set(const std::string& key, const std::string& value) {
    kv_[key] = value;
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::get_str(const std::string& key, const std::string& def) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? def : it->second;
}

double Config::get_double(const std::string& key, double def) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size())
        throw std::runtime_error("config: bad number for " + key);
    return v;
}

int Config::get_int(const std::string& key, int def) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    return (int)std::stoll(it->second);
}

long long Config::get_ll(const std::string& key, long long def) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    return std::stoll(it->second);
}

bool Config::get_bool(const std::string& key, bool def) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw std::runtime_error("config: bad boolean for " + key);
}

}  // namespace akmmd
