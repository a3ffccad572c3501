#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracell/extension.hpp"
#include "fracell/semigroup.hpp"
#include "fracell/spectral.hpp"

namespace fracell {

using Json = nlohmann::ordered_json;

/// 17 significant digits, '.' decimal, independent of the global locale.
std::string format_double(double x);

/// Plain CSV table: one header row, numeric rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row);
  std::string str() const;
};

void write_text(const std::filesystem::path& path, const std::string& text);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

/// Columns index, x[, y], value.
CsvTable grid_function_table(const GridFunction& f);
/// Inverse of grid_function_table on a known grid; throws on size or coordinate mismatch.
GridFunction grid_function_from_table(const Grid& grid, const CsvTable& table);
/// {dim, extents, nodes, bc, coefficient}.
Json grid_descriptor(const DiscreteOperator& op);

/// Columns k, lambda.
CsvTable eigenvalue_table(const EigenBasis& basis);
/// Eigenvector k over all grid nodes (columns index, x[, y], value).
CsvTable eigenvector_table(const EigenBasis& basis, int k);
/// {count, lambda_min, lambda_max, bc}.
Json eigen_summary(const EigenBasis& basis);

/// Triplets (i, j, value) over active indices; entries with |value| below
/// `threshold` times the largest magnitude are skipped.
CsvTable kernel_triplets(const KernelMatrix& k, double threshold = 0.0);
Json kernel_fit_json(const KernelFit& f);

/// Columns i, j, x, y, U (1D base) with i the active base index and j the layer.
CsvTable extension_table(const ExtensionField& field);

/// Columns x, value, closed_form, ratio.
CsvTable oracle_table(const std::vector<double>& x, const std::vector<double>& values,
                      const std::vector<double>& closed_form);

}  // namespace fracell
