#include "quasipost/io/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "quasipost/errors.hpp"

namespace qp {

using Eigen::Index;

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& cell, std::size_t line_no,
                    const std::string& column) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0' || errno == ERANGE) {
    throw SchemaError("line " + std::to_string(line_no) + ": cannot parse '" +
                      cell + "' in column '" + column + "' as a number");
  }
  return v;
}

// %.17g round-trips IEEE doubles exactly
std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Eigen::Index CsvFile::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] == name) return static_cast<Index>(j);
  }
  return -1;
}

Eigen::VectorXd CsvFile::numeric_column(const std::string& name) const {
  const Index j = column_index(name);
  if (j < 0) throw SchemaError("missing column '" + name + "'");
  Eigen::VectorXd out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    // +2: 1-based lines with a header row
    out[static_cast<Index>(i)] =
        parse_double(rows[i][static_cast<std::size_t>(j)], i + 2, name);
  }
  return out;
}

CsvFile read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  CsvFile csv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_line(line);
    for (auto& c : cells) c = trimmed(c);
    if (line_no == 1) {
      csv.columns = std::move(cells);
      if (csv.columns.empty()) throw SchemaError("line 1: empty header");
      continue;
    }
    if (cells.size() != csv.columns.size()) {
      throw SchemaError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(csv.columns.size()) + " cells, found " +
                        std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (cells[j].empty()) {
        throw SchemaError("line " + std::to_string(line_no) +
                          ": blank cell in column '" + csv.columns[j] + "'");
      }
    }
    csv.rows.push_back(std::move(cells));
  }
  if (csv.columns.empty()) throw SchemaError("'" + path + "' is empty");
  return csv;
}

Dataset dataset_from_csv(const CsvFile& csv, const DatasetColumns& columns,
                         std::vector<std::string>* group_labels) {
  if (csv.rows.empty()) throw SchemaError("no data rows");
  Dataset data;
  data.y = csv.numeric_column(columns.response);

  const Index n = static_cast<Index>(csv.rows.size());
  const Index p_cov = static_cast<Index>(columns.covariates.size());
  const Index p = p_cov + (columns.add_intercept ? 1 : 0);
  if (p < 1) throw SchemaError("no covariate columns selected");
  data.X.resize(n, p);
  Index col = 0;
  if (columns.add_intercept) data.X.col(col++).setOnes();
  for (const auto& name : columns.covariates) {
    data.X.col(col++) = csv.numeric_column(name);
  }

  if (!columns.group.empty()) {
    const Index gj = csv.column_index(columns.group);
    if (gj < 0) throw SchemaError("missing column '" + columns.group + "'");
    std::map<std::string, int> mapping;
    std::vector<std::string> labels;
    data.groups.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      const std::string& label =
          csv.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(gj)];
      auto it = mapping.find(label);
      if (it == mapping.end()) {
        it = mapping.emplace(label, static_cast<int>(labels.size())).first;
        labels.push_back(label);
      }
      data.groups[static_cast<std::size_t>(i)] = it->second;
    }
    data.n_groups = static_cast<int>(labels.size());
    if (group_labels) *group_labels = std::move(labels);
  }
  data.validate();
  return data;
}

void write_chains_csv(const std::string& path, const ChainSet& chains) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write '" + path + "'");
  out << "chain,draw";
  for (Index j = 0; j < chains.dim(); ++j) out << ",param_" << (j + 1);
  out << "\n";
  for (int c = 0; c < chains.n_chains(); ++c) {
    for (Index s = 0; s < chains.n_draws(); ++s) {
      out << (c + 1) << ',' << (s + 1);
      for (Index j = 0; j < chains.dim(); ++j) {
        out << ',' << format_double(chains.draws[c](s, j));
      }
      out << "\n";
    }
  }
  if (!out) throw SchemaError("write failed for '" + path + "'");
}

ChainSet read_chains_csv(const std::string& path) {
  const CsvFile csv = read_csv(path);
  if (csv.columns.size() < 3 || csv.columns[0] != "chain" ||
      csv.columns[1] != "draw") {
    throw SchemaError("'" + path + "' is not a chains file");
  }
  const auto d = static_cast<Index>(csv.columns.size() - 2);
  int n_chains = 0;
  for (const auto& row : csv.rows) {
    n_chains = std::max(n_chains, static_cast<int>(std::strtol(row[0].c_str(), nullptr, 10)));
  }
  if (n_chains < 1) throw SchemaError("'" + path + "' has no chains");
  const auto rows_per_chain = static_cast<Index>(csv.rows.size()) / n_chains;
  if (rows_per_chain * n_chains != static_cast<Index>(csv.rows.size())) {
    throw SchemaError("'" + path + "' has unbalanced chains");
  }

  ChainSet set;
  set.draws.assign(static_cast<std::size_t>(n_chains),
                   Eigen::MatrixXd(rows_per_chain, d));
  std::vector<Index> cursor(static_cast<std::size_t>(n_chains), 0);
  std::size_t line_no = 1;
  for (const auto& row : csv.rows) {
    ++line_no;
    const int c = static_cast<int>(std::strtol(row[0].c_str(), nullptr, 10)) - 1;
    if (c < 0 || c >= n_chains) {
      throw SchemaError("line " + std::to_string(line_no) + ": bad chain index");
    }
    Index& s = cursor[static_cast<std::size_t>(c)];
    if (s >= rows_per_chain) {
      throw SchemaError("line " + std::to_string(line_no) + ": unbalanced chains");
    }
    for (Index j = 0; j < d; ++j) {
      set.draws[static_cast<std::size_t>(c)](s, j) =
          parse_double(row[static_cast<std::size_t>(j + 2)], line_no,
                       csv.columns[static_cast<std::size_t>(j + 2)]);
    }
    ++s;
  }
  return set;
}

}  // namespace qp
