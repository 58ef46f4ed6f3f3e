#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "quasipost/chains.hpp"
#include "quasipost/data.hpp"

namespace qp {

// Headered CSV held as strings; numeric conversion happens per column so
// parse errors can cite the file line.
struct CsvFile {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  Eigen::Index column_index(const std::string& name) const;  // -1 if absent
  Eigen::VectorXd numeric_column(const std::string& name) const;
};

// UTF-8, comma separated, '.' decimal, no quoting support needed for numeric
// tables. Rows with blank cells are rejected.
CsvFile read_csv(const std::string& path);

struct DatasetColumns {
  std::string response;
  std::vector<std::string> covariates;
  std::string group;  // empty when ungrouped
  bool add_intercept = false;
};

// Builds a Dataset from named columns. Group labels are arbitrary strings
// mapped to indices 0..J-1 in order of first appearance.
Dataset dataset_from_csv(const CsvFile& csv, const DatasetColumns& columns,
                         std::vector<std::string>* group_labels = nullptr);

// chains.csv: header "chain,draw,param_1..param_d", one row per retained
// draw, numbers formatted to round-trip exactly.
void write_chains_csv(const std::string& path, const ChainSet& chains);
ChainSet read_chains_csv(const std::string& path);

}  // namespace qp
