#include "deskzone/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "deskzone/csv.hpp"
#include "deskzone/error.hpp"

namespace deskzone {

namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

void rotate(double* a, double* b, std::size_t n, double c, double s) {
  for (std::size_t k = 0; k < n; ++k) {
    const double x = a[k], y = b[k];
    a[k] = c * x - s * y;
    b[k] = s * x + c * y;
  }
}

void write_matrix(const std::string& path, const Matrix& m, const std::string& index_name, const csv::Provenance& header) {
  std::ofstream out(path);
  if (!out) throw FileError(path, "cannot open for writing");
  csv::write_comment_header(out, header);
  out << index_name;
  for (std::size_t c = 0; c < m.cols(); ++c) out << ",c" << c;
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << r;
    for (std::size_t c = 0; c < m.cols(); ++c) out << ',' << csv::format_double(m(r, c));
    out << '\n';
  }
}

Matrix read_matrix(const std::string& path) {
  auto table = csv::read_file(path);
  Matrix m(table.rows.size(), table.header.empty() ? 0 : table.header.size() - 1);
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      m(r, c) = csv::parse_double(table.rows[r].fields[c + 1], path, table.rows[r].line);
  return m;
}

}  // namespace

SvdFactors svd_decompose(const Matrix& m, const SvdOptions& options) {
  const std::size_t rows = m.rows(), cols = m.cols();
  if (cols == 0) throw InputError("SVD needs at least one column");
  if (rows < cols) throw InputError("SVD expects at least as many rows as columns");
  for (double v : m.data())
    if (!std::isfinite(v)) throw InputError("SVD input has non-finite entries");

  // Columns of m (as rows of `a`) are rotated until mutually orthogonal; the
  // accumulated rotations form v.
  Matrix a = m.transposed();
  Matrix vt(cols, cols, 0.0);
  for (std::size_t i = 0; i < cols; ++i) vt(i, i) = 1.0;

  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < cols; ++i) {
      for (std::size_t j = i + 1; j < cols; ++j) {
        double* ai = a.row(i).data();
        double* aj = a.row(j).data();
        const double alpha = dot(ai, ai, rows);
        const double beta = dot(aj, aj, rows);
        const double gamma = dot(ai, aj, rows);
        if (alpha == 0.0 || beta == 0.0) continue;
        if (std::abs(gamma) <= options.off_diagonal_tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate(ai, aj, rows, c, s);
        rotate(vt.row(i).data(), vt.row(j).data(), cols, c, s);
      }
    }
    if (!rotated) break;
  }

  std::vector<double> norms(cols);
  for (std::size_t k = 0; k < cols; ++k) norms[k] = std::sqrt(dot(a.row(k).data(), a.row(k).data(), rows));
  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  const double smax = norms[order.front()];
  std::size_t rank = 0;
  while (rank < cols && smax > 0.0 && norms[order[rank]] > options.rank_tol * smax) ++rank;

  SvdFactors f;
  f.u = Matrix(rows, rank);
  f.v = Matrix(cols, rank);
  f.sigma.resize(rank);
  for (std::size_t k = 0; k < rank; ++k) {
    const std::size_t src = order[k];
    const double s = norms[src];
    f.sigma[k] = s;
    // Sign convention: largest-magnitude entry of each u column is positive.
    std::size_t arg = 0;
    for (std::size_t r = 1; r < rows; ++r)
      if (std::abs(a(src, r)) > std::abs(a(src, arg))) arg = r;
    const double sign = a(src, arg) < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < rows; ++r) f.u(r, k) = sign * a(src, r) / s;
    for (std::size_t c = 0; c < cols; ++c) f.v(c, k) = sign * vt(src, c);
  }
  return f;
}

ReducedOccupants project(const Matrix& m, const SvdFactors& factors, std::size_t d) {
  if (d < 1 || d > factors.rank())
    throw InputError("projection dimension " + std::to_string(d) + " outside [1, " + std::to_string(factors.rank()) +
                     "]");
  if (m.rows() != factors.u.rows()) throw InputError("matrix rows do not match the SVD factors");
  ReducedOccupants out;
  out.d = d;
  out.coords = Matrix(d, m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto mrow = m.row(r);
    for (std::size_t k = 0; k < d; ++k) {
      const double u = factors.u(r, k);
      if (u == 0.0) continue;
      auto orow = out.coords.row(k);
      for (std::size_t c = 0; c < m.cols(); ++c) orow[c] += u * mrow[c];
    }
  }
  return out;
}

double truncation_error(const Matrix& m, const SvdFactors& factors, std::size_t d) {
  if (d > factors.rank()) throw InputError("truncation rank exceeds factor rank");
  double acc = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) {
      double approx = 0.0;
      for (std::size_t k = 0; k < d; ++k) approx += factors.u(r, k) * factors.sigma[k] * factors.v(c, k);
      const double e = m(r, c) - approx;
      acc += e * e;
    }
  return std::sqrt(acc);
}

Matrix time_by_occupant(const ScheduleSet& schedules) { return schedules.values.transposed(); }

ScheduleSet reduced_schedules(const ScheduleSet& schedules, const SvdFactors& factors, std::size_t d) {
  const auto reduced = project(time_by_occupant(schedules), factors, d);
  ScheduleSet out;
  out.occupant_ids = schedules.occupant_ids;
  out.values = reduced.coords.transposed();
  out.representation = "reduced-" + std::to_string(d);
  return out;
}

void write_factors(const std::string& directory, const SvdFactors& factors, const csv::Provenance& header) {
  std::filesystem::create_directories(directory);
  write_matrix(directory + "/u.csv", factors.u, "row", header);
  write_matrix(directory + "/v.csv", factors.v, "row", header);
  const std::string sp = directory + "/sigma.csv";
  std::ofstream out(sp);
  if (!out) throw FileError(sp, "cannot open for writing");
  csv::write_comment_header(out, header);
  out << "k,sigma\n";
  for (std::size_t k = 0; k < factors.sigma.size(); ++k) out << k << ',' << csv::format_double(factors.sigma[k]) << '\n';
}

SvdFactors read_factors(const std::string& directory) {
  SvdFactors f;
  f.u = read_matrix(directory + "/u.csv");
  f.v = read_matrix(directory + "/v.csv");
  const std::string sp = directory + "/sigma.csv";
  auto table = csv::read_file(sp);
  csv::require_header(table, {"k", "sigma"});
  for (const auto& row : table.rows) f.sigma.push_back(csv::parse_double(row.fields[1], sp, row.line));
  if (f.u.cols() != f.sigma.size() || f.v.cols() != f.sigma.size())
    throw InputError("SVD factor files in " + directory + " disagree on rank");
  return f;
}

}  // namespace deskzone
