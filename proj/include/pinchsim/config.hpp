#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pinchsim {

// Invalid configuration / validation failure; the CLI maps this (and
// std::invalid_argument / std::domain_error) to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Line-oriented `key = value` text with '#' comments. Later assignments win,
// so flag overrides are applied by re-setting keys after the file is loaded.
class KeyValueConfig {
 public:
  void load_file(const std::filesystem::path& path);  // throws ConfigError
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;

  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_double_list(const std::string& key,
                                      std::vector<double> fallback) const;

  // Throws ConfigError naming the first key not present in `allowed`.
  void require_known_keys(std::span<const std::string_view> allowed) const;

  // Insertion-ordered (first-assignment order) key/value view.
  std::vector<std::pair<std::string, std::string>> items() const;

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::string> values_;
};

}  // namespace pinchsim
