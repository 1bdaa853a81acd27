#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "bswave/errors.hpp"

namespace bswave {

struct Triplet {
  int row;
  int col;
  double val;
};

/// Compressed sparse row matrix. Column indices are sorted and unique within
/// each row.
class CsrMatrix {
 public:
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr;
  std::vector<int> col_idx;
  std::vector<double> vals;

  CsrMatrix() = default;

  static CsrMatrix from_triplets(int rows, int cols,
                                 std::vector<Triplet> trip) {
    std::stable_sort(trip.begin(), trip.end(),
                     [](const Triplet& a, const Triplet& b) {
                       return std::tie(a.row, a.col) < std::tie(b.row, b.col);
                     });
    CsrMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.row_ptr.assign(rows + 1, 0);
    for (size_t k = 0; k < trip.size();) {
      size_t j = k;
      double s = 0.0;
      while (j < trip.size() && trip[j].row == trip[k].row &&
             trip[j].col == trip[k].col)
        s += trip[j++].val;
      m.col_idx.push_back(trip[k].col);
      m.vals.push_back(s);
      m.row_ptr[trip[k].row + 1]++;
      k = j;
    }
    for (int r = 0; r < rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
    return m;
  }

  int nnz() const { return static_cast<int>(vals.size()); }

  double get(int r, int c) const {
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      if (col_idx[k] == c) return vals[k];
    return 0.0;
  }

  void multiply(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(rows, 0.0);
    for (int r = 0; r < rows; ++r) {
      double s = 0.0;
      for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
        s += vals[k] * x[col_idx[k]];
      y[r] = s;
    }
  }

  std::vector<double> multiply(const std::vector<double>& x) const {
    std::vector<double> y;
    multiply(x, y);
    return y;
  }

  std::vector<double> diagonal() const {
    std::vector<double> d(rows, 0.0);
    for (int r = 0; r < rows; ++r) d[r] = get(r, r);
    return d;
  }

  bool same_pattern(const CsrMatrix& o) const {
    return rows == o.rows && cols == o.cols && row_ptr == o.row_ptr &&
           col_idx == o.col_idx;
  }

  /// this + s * other. Patterns are merged when they differ.
  CsrMatrix add_scaled(const CsrMatrix& other, double s) const {
    if (same_pattern(other)) {
      CsrMatrix out = *this;
      for (size_t k = 0; k < vals.size(); ++k) out.vals[k] += s * other.vals[k];
      return out;
    }
    std::vector<Triplet> trip;
    trip.reserve(vals.size() + other.vals.size());
    for (int r = 0; r < rows; ++r)
      for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
        trip.push_back({r, col_idx[k], vals[k]});
    for (int r = 0; r < other.rows; ++r)
      for (int k = other.row_ptr[r]; k < other.row_ptr[r + 1]; ++k)
        trip.push_back({r, other.col_idx[k], s * other.vals[k]});
    return from_triplets(rows, cols, std::move(trip));
  }

  double max_symmetry_defect() const {
    double defect = 0.0;
    for (int r = 0; r < rows; ++r)
      for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
        defect = std::max(defect, std::abs(vals[k] - get(col_idx[k], r)));
    return defect;
  }
};

/// MatrixMarket coordinate format, 1-based indices, general symmetry.
inline void write_matrix_market(const CsrMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows << ' ' << m.cols << ' ' << m.nnz() << '\n';
  out.precision(17);
  for (int r = 0; r < m.rows; ++r)
    for (int k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
      out << r + 1 << ' ' << m.col_idx[k] + 1 << ' ' << m.vals[k] << '\n';
}

inline CsrMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file: " + path);
  std::string line;
  bool symmetric = false;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
    throw ParseError(path + ": missing MatrixMarket banner");
  symmetric = line.find("symmetric") != std::string::npos;
  while (std::getline(in, line) && (line.empty() || line[0] == '%')) {
  }
  std::istringstream hdr(line);
  int rows, cols;
  long nnz;
  if (!(hdr >> rows >> cols >> nnz)) throw ParseError(path + ": bad size line");
  std::vector<Triplet> trip;
  trip.reserve(nnz);
  for (long k = 0; k < nnz; ++k) {
    int r, c;
    double v;
    if (!(in >> r >> c >> v)) throw ParseError(path + ": truncated entries");
    trip.push_back({r - 1, c - 1, v});
    if (symmetric && r != c) trip.push_back({c - 1, r - 1, v});
  }
  return CsrMatrix::from_triplets(rows, cols, std::move(trip));
}

}  // namespace bswave
