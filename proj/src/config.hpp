#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace conewalk {

/// Error in loading or validating an experiment configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key-value configuration with dotted section keys.
///
/// Grammar (one entry per line):
///   key = value          key: dotted identifiers, value: rest of line
///   # comment            blank lines and comments are ignored
///
/// Values are scalars or comma-separated lists; points use comma-separated
/// coordinates and point lists use semicolons ("0,2; 0,4; 1,3").
/// parse(serialize(c)) == c holds for every config (keys are emitted sorted).
class Config {
  public:
    Config() = default;

    static Config parse(const std::string& text);
    static Config load_file(const std::string& path);
    std::string serialize() const;

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    void set(const std::string& key, const std::string& value);

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    int64_t get_int(const std::string& key) const;
    int64_t get_int(const std::string& key, int64_t fallback) const;
    double get_real(const std::string& key) const;
    double get_real(const std::string& key, double fallback) const;
    uint64_t get_u64(const std::string& key, uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    /// "1,2,3" -> {1,2,3}
    std::vector<double> get_reals(const std::string& key) const;
    std::vector<int64_t> get_ints(const std::string& key) const;
    /// "0,2; 0,4" -> two points
    std::vector<std::vector<double>> get_points(const std::string& key) const;
    /// "a,b,c" -> {"a","b","c"}
    std::vector<std::string> get_names(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

    bool operator==(const Config& o) const { return kv_ == o.kv_; }

  private:
    std::map<std::string, std::string> kv_;
};

}  // namespace conewalk
