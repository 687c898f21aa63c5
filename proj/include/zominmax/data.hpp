#pragma once

// Synthetic strategic-classification data, CSV ingestion and label balancing.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "zominmax/errors.hpp"
#include "zominmax/random.hpp"
#include "zominmax/wdrsc.hpp"

namespace zominmax {

struct SyntheticSpec {
  std::size_t n = 500;
  std::size_t d = 10;
  double noise_std = 0.1;
  std::size_t strategic = 5;
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 1) throw std::invalid_argument("synthetic: n must be at least 1");
    if (d < 1) throw std::invalid_argument("synthetic: d must be at least 1");
    if (strategic > d) throw std::invalid_argument("synthetic: strategic count exceeds d");
    if (!(noise_std >= 0.0)) throw std::invalid_argument("synthetic: noise_std must be nonnegative");
  }
};

struct SyntheticData {
  StrategicDataset dataset;
  Vector theta_star;
  Vector noise;  // scalar label noise z_i per example
};

inline int sign_label(double v) { return v >= 0.0 ? 1 : -1; }

/// theta* ~ N(0, I), x_i ~ N(0, I), y_i = sign(<x_i, theta*> + z_i), z_i ~ N(0, noise_std^2).
inline SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  SeededRng rng(spec.seed);
  SyntheticData out;
  out.theta_star = rng.gaussian(spec.d);
  auto& ds = out.dataset;
  ds.features.resize(static_cast<Eigen::Index>(spec.n), static_cast<Eigen::Index>(spec.d));
  ds.labels.resize(spec.n);
  out.noise.resize(static_cast<Eigen::Index>(spec.n));
  for (std::size_t i = 0; i < spec.n; ++i) {
    const Vector x = rng.gaussian(spec.d);
    const double z = spec.noise_std * rng.normal();
    ds.features.row(static_cast<Eigen::Index>(i)) = x.transpose();
    out.noise[static_cast<Eigen::Index>(i)] = z;
    ds.labels[i] = sign_label(x.dot(out.theta_star) + z);
  }
  ds.strategic_mask = first_k_mask(spec.d, spec.strategic);
  for (std::size_t j = 0; j < spec.d; ++j) ds.feature_names.push_back("x" + std::to_string(j));
  return out;
}

struct CsvSchema {
  std::string label_column = "label";
  /// Raw label text (or its numeric value) to class.
  std::map<std::string, int> label_map{{"1", 1}, {"+1", 1}, {"-1", -1}, {"0", -1}};
  bool standardize = false;
  std::optional<std::vector<std::string>> strategic_columns;  // default: every feature
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(cell);
  return cells;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_real(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) return std::nullopt;
  std::size_t used = 0;
  try {
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

inline std::optional<int> map_label(const CsvSchema& schema, const std::string& raw) {
  const std::string s = trim(raw);
  if (auto it = schema.label_map.find(s); it != schema.label_map.end()) return it->second;
  const auto v = parse_real(s);
  if (!v) return std::nullopt;
  for (const auto& [key, cls] : schema.label_map) {
    const auto kv = parse_real(key);
    if (kv && *kv == *v) return cls;
  }
  return std::nullopt;
}

}  // namespace detail

/// Zero mean, unit variance per column (constant columns are only centered).
inline void standardize(StrategicDataset& ds) {
  const auto n = static_cast<double>(ds.features.rows());
  for (Eigen::Index j = 0; j < ds.features.cols(); ++j) {
    auto col = ds.features.col(j);
    const double mean = col.mean();
    col.array() -= mean;
    const double sd = std::sqrt(col.squaredNorm() / n);
    if (sd > 0.0) col /= sd;
  }
}

inline StrategicDataset load_csv(const std::string& path, const CsvSchema& schema = {}) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file, expected a header row");
  const auto header = detail::split_csv_line(line);
  std::optional<std::size_t> label_col;
  std::vector<std::size_t> feature_cols;
  StrategicDataset ds;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = detail::trim(header[c]);
    if (name.empty()) throw DataError(path + ": malformed header, empty column name at column " + std::to_string(c + 1));
    if (name == schema.label_column) {
      if (label_col) throw DataError(path + ": label column '" + name + "' appears twice");
      label_col = c;
    } else {
      feature_cols.push_back(c);
      ds.feature_names.push_back(name);
    }
  }
  if (!label_col) throw DataError(path + ": malformed header, no label column '" + schema.label_column + "'");
  if (feature_cols.empty()) throw DataError(path + ": no feature columns");

  std::vector<std::vector<double>> rows;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size())
      throw DataError(path + ": row " + std::to_string(row_no) + " has " + std::to_string(cells.size()) +
                      " cells, expected " + std::to_string(header.size()));
    const auto label = detail::map_label(schema, cells[*label_col]);
    if (!label)
      throw DataError(path + ": row " + std::to_string(row_no) + ": label '" + detail::trim(cells[*label_col]) +
                      "' is not a known binary value");
    std::vector<double> row;
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      const auto v = detail::parse_real(cells[feature_cols[k]]);
      if (!v)
        throw DataError(path + ": row " + std::to_string(row_no) + ", column '" + ds.feature_names[k] +
                        "': cannot parse '" + cells[feature_cols[k]] + "' as a real number");
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
    ds.labels.push_back(*label);
  }
  if (rows.empty()) throw DataError(path + ": no data rows");

  ds.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(feature_cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];

  if (schema.strategic_columns) {
    ds.strategic_mask.assign(ds.d(), false);
    for (const auto& name : *schema.strategic_columns) {
      const auto it = std::find(ds.feature_names.begin(), ds.feature_names.end(), name);
      if (it == ds.feature_names.end()) throw DataError(path + ": unknown strategic column '" + name + "'");
      ds.strategic_mask[static_cast<std::size_t>(it - ds.feature_names.begin())] = true;
    }
  } else {
    ds.strategic_mask.assign(ds.d(), true);
  }
  if (schema.standardize) standardize(ds);
  ds.validate();
  return ds;
}

/// Header of feature names then `label`; reals with 17 significant digits.
inline void write_csv(const StrategicDataset& ds, std::ostream& os, const std::string& label_column = "label") {
  for (std::size_t j = 0; j < ds.d(); ++j)
    os << (j < ds.feature_names.size() ? ds.feature_names[j] : "x" + std::to_string(j)) << ',';
  os << label_column << '\n';
  os << std::setprecision(17);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    for (std::size_t j = 0; j < ds.d(); ++j)
      os << ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) << ',';
    os << ds.labels[i] << '\n';
  }
}

inline void write_csv(const StrategicDataset& ds, const std::string& path, const std::string& label_column = "label") {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  write_csv(ds, out, label_column);
  if (!out) throw DataError("write failed for '" + path + "'");
}

/// target_n rows: ceil(target_n/2) positives and floor(target_n/2) negatives,
/// drawn without replacement; original row order is kept.
inline StrategicDataset balance(const StrategicDataset& ds, std::size_t target_n, SeededRng& rng) {
  const std::size_t want_pos = (target_n + 1) / 2;
  const std::size_t want_neg = target_n / 2;
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < ds.n(); ++i) (ds.labels[i] == 1 ? pos : neg).push_back(i);
  if (pos.size() < want_pos)
    throw DataError("balance: class +1 has " + std::to_string(pos.size()) + " examples, need " + std::to_string(want_pos));
  if (neg.size() < want_neg)
    throw DataError("balance: class -1 has " + std::to_string(neg.size()) + " examples, need " + std::to_string(want_neg));

  auto pick = [&](std::vector<std::size_t> pool, std::size_t k) {
    const auto perm = rng.permutation(pool.size());
    std::vector<std::size_t> chosen;
    for (std::size_t r = 0; r < k; ++r) chosen.push_back(pool[perm[r]]);
    return chosen;
  };
  std::vector<std::size_t> keep = pick(pos, want_pos);
  const auto negs = pick(neg, want_neg);
  keep.insert(keep.end(), negs.begin(), negs.end());
  std::sort(keep.begin(), keep.end());

  StrategicDataset out;
  out.features.resize(static_cast<Eigen::Index>(keep.size()), ds.features.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    out.features.row(static_cast<Eigen::Index>(r)) = ds.features.row(static_cast<Eigen::Index>(keep[r]));
    out.labels.push_back(ds.labels[keep[r]]);
  }
  out.strategic_mask = ds.strategic_mask;
  out.feature_names = ds.feature_names;
  return out;
}

}  // namespace zominmax
