#include "fracell/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

namespace fracell {

namespace {

enum class Kind { Int, Real, RealList, Choice, Text, Flag };

struct KeySpec {
  KeyInfo info;
  Kind kind;
  double lo = -INFINITY;
  double hi = INFINITY;
  std::vector<std::string> choices;
};

const std::vector<KeySpec>& specs() {
  static const std::vector<KeySpec> table = {
      {{"dim", "1", "space dimension (1 or 2)"}, Kind::Int, 1, 2, {}},
      {{"nodes", "129", "nodes along axis 0"}, Kind::Int, 5, 8193, {}},
      {{"nodes_y", "0", "nodes along axis 1 (0: same as nodes)"}, Kind::Int, 0, 8193, {}},
      {{"extent", "1", "box length along axis 0"}, Kind::Real, 1e-6, 1e6, {}},
      {{"extent_y", "0", "box length along axis 1 (0: same as extent)"}, Kind::Real, 0, 1e6, {}},
      {{"bc", "dirichlet", "dirichlet, neumann, or mixed (neumann in x_0, dirichlet in x_1)"},
       Kind::Choice, 0, 0, {"dirichlet", "neumann", "mixed"}},
      {{"coefficient", "identity", "identity, sine (1 + amplitude sin 2 pi x) or diagonal (a11, a22)"},
       Kind::Choice, 0, 0, {"identity", "sine", "diagonal"}},
      {{"amplitude", "0.5", "amplitude of the sine coefficient"}, Kind::Real, 0, 0.99, {}},
      {{"a11", "1", "diagonal coefficient along axis 0"}, Kind::Real, 1e-6, 1e6, {}},
      {{"a22", "1", "diagonal coefficient along axis 1"}, Kind::Real, 1e-6, 1e6, {}},
      {{"s", "0.5", "fractional order(s), comma separated, each in (0, 1]"}, Kind::RealList, 1e-6, 1, {}},
      {{"rhs", "sine", "data: sine, one, eigen1, cusp (|x-x0|^alpha (1+x)), spike (L^p surrogate)"},
       Kind::Choice, 0, 0, {"sine", "one", "eigen1", "cusp", "spike"}},
      {{"alpha", "0.2", "Holder exponent of cusp data"}, Kind::Real, 0, 1, {}},
      {{"p", "3", "integrability exponent of spike data"}, Kind::Real, 1, 1e6, {}},
      {{"operation", "solve", "solve: apply L^{-s}; apply: apply L^s"}, Kind::Choice, 0, 0, {"solve", "apply"}},
      {{"quad_tol", "1e-10", "target relative error of calibrated quadrature rules"}, Kind::Real, 1e-15, 1e-2, {}},
      {{"kernel", "ks", "ks, gs, wt or poisson"}, Kind::Choice, 0, 0, {"ks", "gs", "wt", "poisson"}},
      {{"t", "0.01", "heat kernel time"}, Kind::Real, 1e-12, 1e6, {}},
      {{"y", "0.1", "Poisson kernel height"}, Kind::Real, 1e-12, 1e6, {}},
      {{"margin", "0.25", "kernel fit: minimum distance of both points to every face"}, Kind::Real, 0, 1e6, {}},
      {{"min_dist_h", "2", "kernel fit: minimum pair distance in grid spacings"}, Kind::Real, 0, 1e6, {}},
      {{"max_dist", "0.1", "kernel fit: maximum pair distance"}, Kind::Real, 0, 1e6, {}},
      {{"triplets", "1", "write the kernel as (i, j, value) triplets"}, Kind::Flag, 0, 0, {}},
      {{"layers", "64", "extension mesh layers"}, Kind::Int, 4, 100000, {}},
      {{"height", "0", "extension truncation height (0: automatic)"}, Kind::Real, 0, 1e6, {}},
      {{"gamma", "0", "extension grading exponent (0: max(3, 1/s))"}, Kind::Real, 0, 100, {}},
      {{"fit_layers", "3", "layers used by the incremental-quotient DtN fit"}, Kind::Int, 2, 64, {}},
      {{"halfline_rhs", "one", "one or indicator"}, Kind::Choice, 0, 0, {"one", "indicator"}},
      {{"reflection", "odd", "odd (Dirichlet) or even (Neumann)"}, Kind::Choice, 0, 0, {"odd", "even"}},
      {{"points", "40", "half-line sample points"}, Kind::Int, 4, 100000, {}},
      {{"truncation", "16", "truncated half-line length"}, Kind::Real, 1, 1e6, {}},
      {{"probe", "interior", "interior, boundary, layer, gate, harnack, caccioppoli or trace"},
       Kind::Choice, 0, 0, {"interior", "boundary", "layer", "gate", "harnack", "caccioppoli", "trace"}},
      {{"mode", "oscillation", "Campanato mode: oscillation, anchored, linear or raw"},
       Kind::Choice, 0, 0, {"oscillation", "anchored", "linear", "raw"}},
      {{"x0", "0.5", "probe centre along axis 0 (axis 1 uses the box middle)"}, Kind::Real, 0, 1e6, {}},
      {{"d_min_h", "2", "boundary fit: smallest distance in grid spacings"}, Kind::Real, 0, 1e6, {}},
      {{"d_max_h", "16", "boundary fit: largest distance in grid spacings"}, Kind::Real, 0, 1e6, {}},
      {{"radius", "0.2", "Harnack ball radius / inequality ball radius"}, Kind::Real, 1e-9, 1e6, {}},
      {{"samples", "10", "random data sets for the inequality probes"}, Kind::Int, 1, 10000, {}},
      {{"tolerance", "0", "override of the pass tolerance (0: built-in default)"}, Kind::Real, 0, 1e6, {}},
      {{"study", "extension", "converge study: extension or bilinear"}, Kind::Choice, 0, 0,
       {"extension", "bilinear"}},
      {{"levels", "3", "refinement levels for converge"}, Kind::Int, 2, 8, {}},
      {{"seed", "1", "seed of every randomized choice"}, Kind::Int, 0, 2147483647, {}},
      {{"out", "out", "output directory"}, Kind::Text, 0, 0, {}},
  };
  return table;
}

const KeySpec& spec(const std::string& key) {
  for (const auto& s : specs())
    if (s.info.name == key) return s;
  throw Error("unknown configuration key '" + key + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& s, double& v) {
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  return ec == std::errc() && p == end && std::isfinite(v);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) out.push_back(trim(cur));
  return out;
}

void validate(const KeySpec& k, const std::string& value) {
  const std::string& key = k.info.name;
  auto in_range = [&](double v) {
    if (v < k.lo || v > k.hi)
      throw Error(fmt::format("configuration key '{}': value {} outside [{}, {}]", key, value, k.lo, k.hi));
  };
  double v = 0.0;
  switch (k.kind) {
    case Kind::Int:
      if (!parse_number(value, v) || v != std::floor(v))
        throw Error("configuration key '" + key + "': expected an integer, got '" + value + "'");
      in_range(v);
      break;
    case Kind::Real:
      if (!parse_number(value, v)) throw Error("configuration key '" + key + "': expected a number, got '" + value + "'");
      in_range(v);
      break;
    case Kind::RealList: {
      const auto items = split_list(value);
      if (items.empty()) throw Error("configuration key '" + key + "': empty list");
      for (const auto& it : items) {
        if (!parse_number(it, v))
          throw Error("configuration key '" + key + "': expected numbers, got '" + value + "'");
        if (v <= 0.0 || v > k.hi)
          throw Error(fmt::format("configuration key '{}': value {} outside (0, {}]", key, it, k.hi));
      }
      break;
    }
    case Kind::Choice:
      if (std::find(k.choices.begin(), k.choices.end(), value) == k.choices.end())
        throw Error("configuration key '" + key + "': unknown value '" + value + "'");
      break;
    case Kind::Flag:
      if (value != "0" && value != "1" && value != "true" && value != "false")
        throw Error("configuration key '" + key + "': expected 0/1/true/false, got '" + value + "'");
      break;
    case Kind::Text:
      if (value.empty()) throw Error("configuration key '" + key + "': empty value");
      break;
  }
}

// Shortest round-trip spelling, so equivalent inputs hash the same.
std::string canonical_value(const KeySpec& k, const std::string& value) {
  auto number = [](const std::string& t) {
    double v = 0.0;
    parse_number(t, v);
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
  };
  switch (k.kind) {
    case Kind::Int:
    case Kind::Real: return number(value);
    case Kind::RealList: {
      std::string out;
      for (const auto& it : split_list(value)) out += (out.empty() ? "" : ",") + number(it);
      return out;
    }
    case Kind::Flag: return value == "1" || value == "true" ? "1" : "0";
    default: return value;
  }
}

}  // namespace

Command parse_command(const std::string& name) {
  if (name == "solve") return Command::Solve;
  if (name == "kernel") return Command::Kernel;
  if (name == "extension") return Command::Extension;
  if (name == "halfline") return Command::Halfline;
  if (name == "probe") return Command::Probe;
  if (name == "converge") return Command::Converge;
  throw Error("unknown command '" + name + "'");
}

std::string to_string(Command c) {
  switch (c) {
    case Command::Solve: return "solve";
    case Command::Kernel: return "kernel";
    case Command::Extension: return "extension";
    case Command::Halfline: return "halfline";
    case Command::Probe: return "probe";
    case Command::Converge: return "converge";
  }
  return "?";
}

RunConfig RunConfig::parse(Command command, const std::string& file_text,
                           const std::vector<std::pair<std::string, std::string>>& overrides) {
  RunConfig c;
  c.command = command;
  for (const auto& s : specs()) c.values_[s.info.name] = canonical_value(s, s.info.default_value);
  std::istringstream is(file_text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(fmt::format("config line {}: expected key = value", lineno));
    c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  for (const auto& [k, v] : overrides) c.set(k, v);
  return c;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const KeySpec& k = spec(key);
  const std::string v = trim(value);
  validate(k, v);
  values_[key] = canonical_value(k, v);
}

const std::string& RunConfig::text(const std::string& key) const {
  spec(key);
  return values_.at(key);
}

int RunConfig::integer(const std::string& key) const {
  double v = 0.0;
  parse_number(text(key), v);
  return static_cast<int>(v);
}

double RunConfig::real(const std::string& key) const {
  double v = 0.0;
  parse_number(text(key), v);
  return v;
}

std::vector<double> RunConfig::reals(const std::string& key) const {
  std::vector<double> out;
  for (const auto& it : split_list(text(key))) {
    double v = 0.0;
    parse_number(it, v);
    out.push_back(v);
  }
  return out;
}

bool RunConfig::flag(const std::string& key) const {
  const auto& v = text(key);
  return v == "1" || v == "true";
}

std::string RunConfig::canonical() const {
  std::string out = "command=" + to_string(command) + "\n";
  for (const auto& [k, v] : values_)
    if (k != "out") out += k + "=" + v + "\n";
  return out;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string RunConfig::hash() const { return fmt::format("{:016x}", fnv1a64(canonical())); }

Grid RunConfig::grid() const {
  const int n = integer("nodes");
  const double e = real("extent");
  if (integer("dim") == 1) return Grid::line(e, n);
  const int ny = integer("nodes_y") > 0 ? integer("nodes_y") : n;
  const double ey = real("extent_y") > 0.0 ? real("extent_y") : e;
  return Grid::box(e, ey, n, ny);
}

const std::vector<KeyInfo>& config_keys() {
  static const std::vector<KeyInfo> keys = [] {
    std::vector<KeyInfo> k;
    for (const auto& s : specs()) k.push_back(s.info);
    return k;
  }();
  return keys;
}

const std::map<std::string, std::string>& module_versions() {
  static const std::map<std::string, std::string> v = {
      {"operator-core", "0.1.0"},   {"spectral-core", "0.1.0"},     {"heat-semigroup", "0.1.0"},
      {"extension-solver", "0.1.0"}, {"halfspace-oracles", "0.1.0"}, {"regularity-probes", "0.1.0"},
      {"cli", "0.1.0"},
  };
  return v;
}

}  // namespace fracell
