#pragma once

#include <string>
#include <vector>

#include "deskzone/csv.hpp"
#include "deskzone/diversity.hpp"
#include "deskzone/matrix.hpp"

namespace deskzone {

/// Thin SVD truncated to numerical rank: m ~= u * diag(sigma) * v^T.
struct SvdFactors {
  Matrix u;                  // rows x rank, orthonormal columns
  std::vector<double> sigma; // rank values, non-increasing
  Matrix v;                  // cols x rank, orthonormal columns
  std::size_t rank() const noexcept { return sigma.size(); }
};

struct SvdOptions {
  double off_diagonal_tol = 1e-10;  // relative column-pair orthogonality
  double rank_tol = 1e-10;          // sigma_k > rank_tol * sigma_max
  int max_sweeps = 80;
};

/// One-sided Jacobi SVD of an m with rows >= cols. Each column of u is signed
/// so its largest-magnitude entry is positive.
SvdFactors svd_decompose(const Matrix& m, const SvdOptions& options = {});

/// Occupants in concept space: d x I, column i = occupant i.
struct ReducedOccupants {
  std::size_t d = 0;
  Matrix coords;
};

/// (first d columns of u)^T * m.
ReducedOccupants project(const Matrix& m, const SvdFactors& factors, std::size_t d);

/// Frobenius norm of m minus its rank-d reconstruction from the factors.
double truncation_error(const Matrix& m, const SvdFactors& factors, std::size_t d);

/// Time-by-occupant matrix (states as values) of a schedule set: the
/// transpose of its rows.
Matrix time_by_occupant(const ScheduleSet& schedules);

/// Concept-space coordinates as one schedule vector per occupant.
ScheduleSet reduced_schedules(const ScheduleSet& schedules, const SvdFactors& factors, std::size_t d);

/// Writes `u.csv`, `sigma.csv`, `v.csv` into `directory`, each starting with
/// the given comment header.
void write_factors(const std::string& directory, const SvdFactors& factors, const csv::Provenance& header = {});
SvdFactors read_factors(const std::string& directory);

}  // namespace deskzone
