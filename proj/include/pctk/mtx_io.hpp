/// \file mtx_io.hpp
/// \brief Matrix Market I/O for CsrMatrix (coordinate real general) and
/// DenseVector (array format or plain whitespace-separated text).
///
/// Values are written with 17 significant digits, enough to round-trip IEEE
/// doubles exactly, and entries are emitted in canonical row-major order, so
/// a dump is byte-identical across runs for identical inputs.

#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "pctk/csr.hpp"

namespace pctk {

namespace detail {

inline std::string format_value(double v) { return strfmt("%.17g", v); }

inline void skip_comments(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '%') continue;
    return;
  }
  line.clear();
}

}  // namespace detail

inline void write_matrix_market(std::ostream& out, const CsrMatrix& A) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.nrows() << " " << A.ncols() << " " << A.nnz() << "\n";
  for (index_t i = 0; i < A.nrows(); ++i)
    for (index_t k = A.row_offsets()[i]; k < A.row_offsets()[i + 1]; ++k)
      out << (i + 1) << " " << (A.col_indices()[k] + 1) << " "
          << detail::format_value(A.values()[k]) << "\n";
}

inline void write_matrix_market(const std::string& path, const CsrMatrix& A) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open for writing: " + path);
  write_matrix_market(out, A);
  require(out.good(), "write failed: " + path);
}

inline CsrMatrix read_matrix_market(std::istream& in, const std::string& origin = "<stream>") {
  std::string header;
  require(static_cast<bool>(std::getline(in, header)), origin + ": empty file");
  std::istringstream hs(header);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  require(banner == "%%MatrixMarket" && object == "matrix",
          origin + ": not a MatrixMarket matrix file");
  require(format == "coordinate", origin + ": expected coordinate format");
  require(field == "real", origin + ": expected real field");
  require(symmetry == "general", origin + ": expected general symmetry");
  std::string line;
  detail::skip_comments(in, line);
  require(!line.empty(), origin + ": missing size line");
  std::istringstream ss(line);
  long nrows = -1, ncols = -1, nnz = -1;
  ss >> nrows >> ncols >> nnz;
  require(nrows >= 0 && ncols >= 0 && nnz >= 0, origin + ": bad size line");
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(nnz));
  for (long k = 0; k < nnz; ++k) {
    long i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v))
      throw Error(detail::strfmt("%s: truncated at entry %ld of %ld",
                                 origin.c_str(), k, nnz));
    require(i >= 1 && i <= nrows && j >= 1 && j <= ncols,
            detail::strfmt("%s: entry (%ld, %ld) out of range", origin.c_str(), i, j));
    trip.push_back({static_cast<index_t>(i - 1), static_cast<index_t>(j - 1), v});
  }
  return CsrMatrix::from_triplets(static_cast<index_t>(nrows),
                                  static_cast<index_t>(ncols), std::move(trip));
}

inline CsrMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open for reading: " + path);
  return read_matrix_market(in, path);
}

/// Matrix Market dense array format (a single column).
inline void write_vector_mtx(std::ostream& out, const DenseVector& v) {
  out << "%%MatrixMarket matrix array real general\n";
  out << v.size() << " 1\n";
  for (double x : v) out << detail::format_value(x) << "\n";
}

inline void write_vector_mtx(const std::string& path, const DenseVector& v) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open for writing: " + path);
  write_vector_mtx(out, v);
  require(out.good(), "write failed: " + path);
}

/// Plain whitespace-separated values, one per line.
inline void write_vector_txt(const std::string& path, const DenseVector& v) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open for writing: " + path);
  for (double x : v) out << detail::format_value(x) << "\n";
  require(out.good(), "write failed: " + path);
}

/// Reads either format: MatrixMarket array files are recognized by banner,
/// anything else is treated as whitespace-separated values.
inline DenseVector read_vector(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open for reading: " + path);
  std::string first;
  std::getline(in, first);
  DenseVector v;
  if (first.rfind("%%MatrixMarket", 0) == 0) {
    std::istringstream hs(first);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    require(format == "array" && field == "real",
            path + ": expected array real vector file");
    std::string line;
    detail::skip_comments(in, line);
    std::istringstream ss(line);
    long nrows = -1, ncols = -1;
    ss >> nrows >> ncols;
    require(nrows >= 0 && ncols == 1, path + ": expected a single-column array");
    v.reserve(static_cast<std::size_t>(nrows));
    double x = 0.0;
    while (static_cast<long>(v.size()) < nrows && in >> x) v.push_back(x);
    require(static_cast<long>(v.size()) == nrows, path + ": truncated vector data");
  } else {
    std::istringstream ss(first);
    double x = 0.0;
    while (ss >> x) v.push_back(x);
    while (in >> x) v.push_back(x);
  }
  return v;
}

}  // namespace pctk
