#include "fracell/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace fracell {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  // fmt ignores the global locale unless asked, so the decimal point is always '.'.
  return fmt::format("{:.17g}", x);
}

void CsvTable::add(std::vector<double> row) {
  if (row.size() != header.size()) throw Error("CsvTable: row width does not match the header");
  rows.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) out += ',';
      out += format_double(r[c]);
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) throw Error("write to '" + path.string() + "' failed");
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) { write_text(path, table.str()); }

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) throw Error("not a number: '" + s + "'");
  return v;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path.string() + "'");
  CsvTable t;
  std::string line;
  if (!std::getline(f, line)) throw Error("'" + path.string() + "' is empty");
  t.header = split(line, ',');
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != t.header.size())
      throw Error(fmt::format("{}:{}: expected {} columns, found {}", path.string(), lineno, t.header.size(),
                              cells.size()));
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_double(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

CsvTable grid_function_table(const GridFunction& f) {
  const Grid& g = f.grid;
  CsvTable t;
  t.header = g.dim() == 1 ? std::vector<std::string>{"index", "x", "value"}
                          : std::vector<std::string>{"index", "x", "y", "value"};
  for (int p = 0; p < g.size(); ++p) {
    std::vector<double> row{static_cast<double>(p), g.coord(p, 0)};
    if (g.dim() == 2) row.push_back(g.coord(p, 1));
    row.push_back(f.values[p]);
    t.add(std::move(row));
  }
  return t;
}

GridFunction grid_function_from_table(const Grid& grid, const CsvTable& table) {
  const std::size_t width = grid.dim() == 1 ? 3 : 4;
  if (table.header.size() != width) throw Error("grid function table: wrong column count for the grid");
  if (table.rows.size() != static_cast<std::size_t>(grid.size()))
    throw Error("grid function table: row count does not match the grid");
  GridFunction f(grid);
  for (const auto& r : table.rows) {
    const int p = static_cast<int>(r[0]);
    if (p < 0 || p >= grid.size() || r[0] != p) throw Error("grid function table: bad node index");
    const double tol = 1e-12 * (1.0 + grid.extent(0));
    for (int a = 0; a < grid.dim(); ++a)
      if (std::abs(r[1 + a] - grid.coord(p, a)) > tol) throw Error("grid function table: coordinate mismatch");
    f.values[p] = r.back();
  }
  return f;
}

Json grid_descriptor(const DiscreteOperator& op) {
  const Grid& g = op.grid();
  Json j;
  j["dim"] = g.dim();
  j["extents"] = Json::array();
  j["nodes"] = Json::array();
  for (int a = 0; a < g.dim(); ++a) {
    j["extents"].push_back(g.extent(a));
    j["nodes"].push_back(g.nodes(a));
  }
  j["bc"] = op.bc().name(g.dim());
  j["coefficient"] = {{"description", op.coefficients().description()},
                      {"lambda1", op.coefficients().lambda1()},
                      {"lambda2", op.coefficients().lambda2()}};
  return j;
}

CsvTable eigenvalue_table(const EigenBasis& basis) {
  CsvTable t{{"k", "lambda"}, {}};
  for (int k = 0; k < basis.count(); ++k) t.add({static_cast<double>(k), basis.eigenvalues()[k]});
  return t;
}

CsvTable eigenvector_table(const EigenBasis& basis, int k) {
  if (k < 0 || k >= basis.count()) throw Error("eigenvector_table: index out of range");
  return grid_function_table(basis.eigenfunction(k));
}

Json eigen_summary(const EigenBasis& basis) {
  return Json{{"count", basis.count()},
              {"lambda_min", basis.lambda_min()},
              {"lambda_max", basis.lambda_max()},
              {"bc", basis.op().bc().name(basis.grid().dim())}};
}

CsvTable kernel_triplets(const KernelMatrix& k, double threshold) {
  CsvTable t{{"i", "j", "value"}, {}};
  const double cut = threshold * k.entries.cwiseAbs().maxCoeff();
  for (int j = 0; j < k.size(); ++j)
    for (int i = 0; i < k.size(); ++i) {
      const double v = k.entries(i, j);
      if (threshold > 0.0 && std::abs(v) < cut) continue;
      t.add({static_cast<double>(i), static_cast<double>(j), v});
    }
  return t;
}

Json kernel_fit_json(const KernelFit& f) {
  return Json{{"kind", to_string(f.kind)}, {"s", f.s},       {"slope", f.slope}, {"intercept", f.intercept},
              {"rmse", f.rmse},            {"r2", f.r2},     {"pairs_used", f.pairs_used}};
}

CsvTable extension_table(const ExtensionField& field) {
  const Grid& g = field.op.grid();
  if (g.dim() != 1) throw Error("extension_table: only 1D bases are exported");
  CsvTable t{{"i", "j", "x", "y", "U"}, {}};
  const auto& act = field.op.active();
  for (int j = 0; j <= field.mesh.layers(); ++j)
    for (int i = 0; i < static_cast<int>(act.size()); ++i)
      t.add({static_cast<double>(i), static_cast<double>(j), g.coord(act[i], 0), field.mesh.y[j],
             field.values(i, j)});
  return t;
}

CsvTable oracle_table(const std::vector<double>& x, const std::vector<double>& values,
                      const std::vector<double>& closed_form) {
  if (values.size() != x.size() || closed_form.size() != x.size()) throw Error("oracle_table: length mismatch");
  CsvTable t{{"x", "value", "closed_form", "ratio"}, {}};
  for (std::size_t i = 0; i < x.size(); ++i)
    t.add({x[i], values[i], closed_form[i], closed_form[i] != 0.0 ? values[i] / closed_form[i] : std::nan("")});
  return t;
}

}  // namespace fracell
