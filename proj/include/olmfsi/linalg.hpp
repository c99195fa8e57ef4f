#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/SparseExtra>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "olmfsi/errors.hpp"
#include "olmfsi/mesh.hpp"

namespace olmfsi {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Square sparse system assembled from triplets; duplicates are summed.
class SparseSystem {
 public:
  SparseSystem() = default;
  explicit SparseSystem(Index n) : n_(n), rhs_(Vector::Zero(n)) {}
  SparseSystem(SparseMatrix a, Vector b) : n_(static_cast<Index>(a.rows())), matrix_(std::move(a)), rhs_(std::move(b)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() != rhs_.size())
      throw SolverError("sparse system: matrix and right-hand side sizes disagree");
  }

  Index size() const { return n_; }

  void add(Index i, Index j, double v) {
    if (v != 0.0) triplets_.emplace_back(i, j, v);
  }
  void add_rhs(Index i, double v) { rhs_[i] += v; }

  /// Merge another buffer of triplets (e.g. from a separate assembly batch).
  void merge(const SparseSystem& other) {
    if (other.n_ != n_) throw SolverError("sparse system: merging systems of different size");
    triplets_.insert(triplets_.end(), other.triplets_.begin(), other.triplets_.end());
    rhs_ += other.rhs_;
  }

  /// Compress pending triplets into the matrix.
  void finalize() {
    if (triplets_.empty() && matrix_.rows() == n_) return;
    SparseMatrix add(n_, n_);
    add.setFromTriplets(triplets_.begin(), triplets_.end());
    if (matrix_.rows() == n_) {
      matrix_ += add;
    } else {
      matrix_ = std::move(add);
    }
    triplets_.clear();
    triplets_.shrink_to_fit();
  }

  const SparseMatrix& matrix() const {
    if (!triplets_.empty() || matrix_.rows() != n_) throw SolverError("sparse system used before finalize()");
    return matrix_;
  }
  const Vector& rhs() const { return rhs_; }
  Vector& rhs() { return rhs_; }
  const std::map<Index, double>& constraints() const { return constraints_; }

  friend SparseSystem apply_dirichlet(const SparseSystem& system, const std::vector<Index>& dofs,
                                      const std::vector<double>& values);

 private:
  Index n_ = 0;
  std::vector<Eigen::Triplet<double>> triplets_;
  SparseMatrix matrix_;
  Vector rhs_;
  std::map<Index, double> constraints_;
};

/// Symmetric elimination: constrained rows and columns become identity rows,
/// the lifted values move to the right-hand side of the free equations.
inline SparseSystem apply_dirichlet(const SparseSystem& system, const std::vector<Index>& dofs,
                                    const std::vector<double>& values) {
  if (dofs.size() != values.size()) throw SolverError("apply_dirichlet: dof and value lists differ in length");
  std::map<Index, double> fixed = system.constraints_;
  for (std::size_t k = 0; k < dofs.size(); ++k) {
    const Index d = dofs[k];
    if (d < 0 || d >= system.n_) throw SolverError("apply_dirichlet: dof " + std::to_string(d) + " out of range");
    auto [it, inserted] = fixed.emplace(d, values[k]);
    if (!inserted && std::abs(it->second - values[k]) > 1e-12 * (1.0 + std::abs(values[k])))
      throw SolverError("apply_dirichlet: conflicting values for dof " + std::to_string(d));
  }

  const SparseMatrix& a = system.matrix();
  std::vector<char> is_fixed(system.n_, 0);
  Vector g = Vector::Zero(system.n_);
  for (const auto& [d, v] : fixed) {
    is_fixed[d] = 1;
    g[d] = v;
  }

  Vector b = system.rhs_;
  std::vector<Eigen::Triplet<double>> kept;
  kept.reserve(static_cast<std::size_t>(a.nonZeros()) + fixed.size());
  for (int col = 0; col < a.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
      const Index row = static_cast<Index>(it.row());
      if (is_fixed[row]) continue;
      if (is_fixed[col]) {
        b[row] -= it.value() * g[col];
        continue;
      }
      kept.emplace_back(row, col, it.value());
    }
  }
  for (const auto& [d, v] : fixed) {
    kept.emplace_back(d, d, 1.0);
    b[d] = v;
  }
  SparseMatrix reduced(system.n_, system.n_);
  reduced.setFromTriplets(kept.begin(), kept.end());
  SparseSystem out(std::move(reduced), std::move(b));
  out.constraints_ = std::move(fixed);
  return out;
}

/// LU factorization wrapper reporting singular pivots as SolverError.
class DirectSolver {
 public:
  explicit DirectSolver(const SparseMatrix& a) : a_(&a) {
    lu_.analyzePattern(a);
    lu_.factorize(a);
    if (lu_.info() != Eigen::Success)
      throw SolverError("sparse LU failed (singular or structurally deficient matrix): " + lu_.lastErrorMessage());
  }

  /// Solve with one refinement step; throws if the backward residual stays above 1e-10.
  Vector solve(const Vector& b) const {
    Vector x = lu_.solve(b);
    if (!x.allFinite()) throw SolverError("sparse LU produced non-finite values (singular matrix)");
    const double scale = a_->norm() * x.norm() + b.norm();
    Vector r = b - (*a_) * x;
    if (r.norm() > 1e-10 * scale) {
      x += lu_.solve(r);
      r = b - (*a_) * x;
      if (r.norm() > 1e-10 * (a_->norm() * x.norm() + b.norm()))
        throw SolverError("direct solve residual " + std::to_string(r.norm()) + " exceeds tolerance (near-singular matrix)");
    }
    return x;
  }

 private:
  const SparseMatrix* a_;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
};

inline Vector solve_direct(const SparseSystem& system) {
  const DirectSolver solver(system.matrix());
  return solver.solve(system.rhs());
}

/// sigma_max / sigma_min of a symmetric matrix from power iterations on A and
/// on A^{-1}; the result is a lower bound that converges from below.
inline double condition_estimate(const SparseMatrix& a, int max_iterations = 400, double rtol = 1e-6) {
  const Index n = static_cast<Index>(a.rows());
  if (n == 0) throw SolverError("condition_estimate: empty matrix");
  const DirectSolver solver(a);
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto power = [&](auto&& apply) {
    Vector x(n);
    for (Index i = 0; i < n; ++i) x[i] = dist(rng);
    x.normalize();
    double est = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
      Vector y = apply(x);
      const double next = y.norm();
      if (next == 0.0) throw SolverError("condition_estimate: operator annihilated the iterate");
      x = y / next;
      if (std::abs(next - est) <= rtol * next) {
        est = next;
        break;
      }
      est = next;
    }
    return est;
  };
  const double smax = power([&](const Vector& x) { return Vector(a * x); });
  const double inv = power([&](const Vector& x) { return solver.solve(x); });
  return smax * inv;
}

inline double condition_estimate(const SparseSystem& system) { return condition_estimate(system.matrix()); }

/// Largest entry of |A - A^T|.
inline double asymmetry(const SparseMatrix& a) {
  const SparseMatrix d = a - SparseMatrix(a.transpose());
  double m = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(d, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

inline double max_abs_entry(const SparseMatrix& a) {
  double m = 0.0;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

/// MatrixMarket coordinate dump.
inline void write_matrix_market(const SparseMatrix& a, const std::string& path) {
  if (!Eigen::saveMarket(a, path)) throw InputError("cannot write matrix file " + path);
}

}  // namespace olmfsi
