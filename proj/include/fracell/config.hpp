#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fracell/grid.hpp"

namespace fracell {

enum class Command { Solve, Kernel, Extension, Halfline, Probe, Converge };

Command parse_command(const std::string& name);
std::string to_string(Command c);

/// Resolved run configuration: every known key with its default or given
/// value, validated against the key table. Values stay as text; the typed
/// getters convert on access.
class RunConfig {
 public:
  Command command = Command::Solve;

  /// Parses `key = value` lines ('#' starts a comment) and then applies the
  /// overrides in order. Unknown keys and out-of-range values throw an Error
  /// naming the key.
  static RunConfig parse(Command command, const std::string& file_text,
                         const std::vector<std::pair<std::string, std::string>>& overrides = {});

  void set(const std::string& key, const std::string& value);

  const std::string& text(const std::string& key) const;
  int integer(const std::string& key) const;
  double real(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  bool flag(const std::string& key) const;

  /// Canonical "command=...\nkey=value\n..." with keys sorted. The output
  /// directory is left out so that results do not depend on where they go.
  std::string canonical() const;
  /// FNV-1a 64-bit hash of canonical(), as 16 hex digits.
  std::string hash() const;

  const std::map<std::string, std::string>& values() const { return values_; }

  Grid grid() const;

 private:
  std::map<std::string, std::string> values_;
};

struct KeyInfo {
  std::string name;
  std::string default_value;
  std::string help;
};

/// All recognised keys with defaults, in documentation order.
const std::vector<KeyInfo>& config_keys();

/// Module name to version string.
const std::map<std::string, std::string>& module_versions();

std::uint64_t fnv1a64(const std::string& data);

}  // namespace fracell
