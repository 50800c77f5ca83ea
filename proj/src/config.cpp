#include "config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace conewalk {

namespace {
std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_')) return false;
    return k.front() != '.' && k.back() != '.';
}
}  // namespace

Config Config::parse(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value', got '" + t + "'");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (!valid_key(key))
            throw ConfigError("config line " + std::to_string(lineno) + ": bad key '" + key + "'");
        c.kv_[key] = value;
    }
    return c;
}

Config Config::load_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

std::string Config::serialize() const {
    std::string out;
    for (const auto& [k, v] : kv_) {
        out += k;
        out += " = ";
        out += v;
        out += "\n";
    }
    return out;
}

void Config::set(const std::string& key, const std::string& value) {
    if (!valid_key(key)) throw ConfigError("bad config key '" + key + "'");
    kv_[key] = value;
}

std::string Config::get_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing required config key '" + key + "'");
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

int64_t Config::get_int(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        size_t pos;
        int64_t r = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return r;
    } catch (...) {
        throw ConfigError("config key '" + key + "': expected integer, got '" + v + "'");
    }
}

int64_t Config::get_int(const std::string& key, int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

double Config::get_real(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        size_t pos;
        double r = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return r;
    } catch (...) {
        throw ConfigError("config key '" + key + "': expected number, got '" + v + "'");
    }
}

double Config::get_real(const std::string& key, double fallback) const {
    return has(key) ? get_real(key) : fallback;
}

uint64_t Config::get_u64(const std::string& key, uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get_string(key);
    try {
        size_t pos;
        uint64_t r = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return r;
    } catch (...) {
        throw ConfigError("config key '" + key + "': expected unsigned integer, got '" + v + "'");
    }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string v = get_string(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config key '" + key + "': expected boolean, got '" + v + "'");
}

std::vector<double> Config::get_reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& part : split(get_string(key), ',')) {
        try {
            out.push_back(std::stod(part));
        } catch (...) {
            throw ConfigError("config key '" + key + "': expected number list, got '" + part + "'");
        }
    }
    return out;
}

std::vector<int64_t> Config::get_ints(const std::string& key) const {
    std::vector<int64_t> out;
    for (const auto& part : split(get_string(key), ',')) {
        try {
            out.push_back(std::stoll(part));
        } catch (...) {
            throw ConfigError("config key '" + key + "': expected integer list, got '" + part + "'");
        }
    }
    return out;
}

std::vector<std::vector<double>> Config::get_points(const std::string& key) const {
    std::vector<std::vector<double>> out;
    for (const auto& group : split(get_string(key), ';')) {
        std::vector<double> pt;
        for (const auto& part : split(group, ',')) {
            try {
                pt.push_back(std::stod(part));
            } catch (...) {
                throw ConfigError("config key '" + key + "': expected point list, got '" + part + "'");
            }
        }
        out.push_back(std::move(pt));
    }
    return out;
}

std::vector<std::string> Config::get_names(const std::string& key) const {
    return split(get_string(key), ',');
}

}  // namespace conewalk
