#ifndef CRJET_LINALG_HPP
#define CRJET_LINALG_HPP

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

// Exact dense linear algebra over a field scalar.
//
// The algorithms only need +, -, *, / and an exact zero test `is_zero(s)`
// found by ADL; no magnitude comparisons are made, so pivoting is by the
// first nonzero entry. Pivot columns of the echelon form are therefore the
// lexicographically first independent columns of the input.

namespace crjet {

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

template <class Scalar>
struct Echelon {
  Matrix<Scalar> reduced;      // reduced row echelon form
  std::vector<Index> pivots;   // pivot column of each nonzero row
  std::vector<Index> row_perm; // original row index of each echelon row
};

/// Fraction-free (Bareiss) forward elimination followed by normalization to
/// reduced row echelon form.
template <class Derived>
Echelon<typename Derived::Scalar> row_echelon(const Eigen::MatrixBase<Derived>& input) {
  using Scalar = typename Derived::Scalar;
  Matrix<Scalar> a = input;
  const Index rows = a.rows();
  const Index cols = a.cols();
  std::vector<Index> perm(static_cast<std::size_t>(rows));
  for (Index r = 0; r < rows; ++r) perm[static_cast<std::size_t>(r)] = r;

  std::vector<Index> pivots;
  Scalar prev(1);
  Index row = 0;
  for (Index col = 0; col < cols && row < rows; ++col) {
    Index pick = row;
    while (pick < rows && is_zero(a(pick, col))) ++pick;
    if (pick == rows) continue;
    if (pick != row) {
      a.row(pick).swap(a.row(row));
      std::swap(perm[static_cast<std::size_t>(pick)], perm[static_cast<std::size_t>(row)]);
    }
    const Scalar pivot = a(row, col);
    for (Index r = row + 1; r < rows; ++r) {
      const Scalar factor = a(r, col);
      for (Index c = col + 1; c < cols; ++c) {
        a(r, c) = (a(r, c) * pivot - factor * a(row, c)) / prev;
      }
      a(r, col) = Scalar(0);
    }
    prev = pivot;
    pivots.push_back(col);
    ++row;
  }

  // Normalize and clear above pivots.
  for (Index k = static_cast<Index>(pivots.size()) - 1; k >= 0; --k) {
    const Index pc = pivots[static_cast<std::size_t>(k)];
    const Scalar inv = Scalar(1) / a(k, pc);
    for (Index c = pc; c < cols; ++c) a(k, c) = a(k, c) * inv;
    for (Index r = 0; r < k; ++r) {
      if (is_zero(a(r, pc))) continue;
      const Scalar factor = a(r, pc);
      for (Index c = pc; c < cols; ++c) a(r, c) = a(r, c) - factor * a(k, c);
    }
  }
  return {std::move(a), std::move(pivots), std::move(perm)};
}

template <class Derived>
Index rank(const Eigen::MatrixBase<Derived>& a) {
  return static_cast<Index>(row_echelon(a).pivots.size());
}

/// Lexicographically first set of linearly independent columns.
template <class Derived>
std::vector<Index> pivot_columns(const Eigen::MatrixBase<Derived>& a) {
  return row_echelon(a).pivots;
}

/// Lexicographically first set of linearly independent rows.
template <class Derived>
std::vector<Index> pivot_rows(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  Matrix<Scalar> t = a.transpose();
  return row_echelon(t).pivots;
}

/// Basis of {x : a x = 0}, one column per free column of the echelon form.
template <class Derived>
Matrix<typename Derived::Scalar> kernel_basis(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const auto ech = row_echelon(a);
  const Index cols = a.cols();
  std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
  for (Index p : ech.pivots) is_pivot[static_cast<std::size_t>(p)] = true;
  const Index nullity = cols - static_cast<Index>(ech.pivots.size());
  Matrix<Scalar> basis = Matrix<Scalar>::Zero(cols, nullity);
  Index out = 0;
  for (Index f = 0; f < cols; ++f) {
    if (is_pivot[static_cast<std::size_t>(f)]) continue;
    basis(f, out) = Scalar(1);
    for (std::size_t k = 0; k < ech.pivots.size(); ++k) {
      basis(ech.pivots[k], out) = -ech.reduced(static_cast<Index>(k), f);
    }
    ++out;
  }
  return basis;
}

/// Some solution of a x = b, or nullopt when the system is inconsistent.
/// Free variables are set to zero.
template <class DerivedA, class DerivedB>
std::optional<Vector<typename DerivedA::Scalar>> solve(const Eigen::MatrixBase<DerivedA>& a,
                                                        const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  Matrix<Scalar> aug(a.rows(), a.cols() + 1);
  aug.leftCols(a.cols()) = a;
  aug.col(a.cols()) = b;
  const auto ech = row_echelon(aug);
  if (!ech.pivots.empty() && ech.pivots.back() == a.cols()) return std::nullopt;
  Vector<Scalar> x = Vector<Scalar>::Zero(a.cols());
  for (std::size_t k = 0; k < ech.pivots.size(); ++k) {
    x(ech.pivots[k]) = ech.reduced(static_cast<Index>(k), a.cols());
  }
  return x;
}

template <class Derived>
std::optional<Matrix<typename Derived::Scalar>> inverse(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() != a.cols()) return std::nullopt;
  const Index n = a.rows();
  Matrix<Scalar> aug(n, 2 * n);
  aug.leftCols(n) = a;
  aug.rightCols(n) = Matrix<Scalar>::Identity(n, n);
  const auto ech = row_echelon(aug);
  if (static_cast<Index>(ech.pivots.size()) < n || (n > 0 && ech.pivots[static_cast<std::size_t>(n - 1)] != n - 1)) {
    return std::nullopt;
  }
  return Matrix<Scalar>(ech.reduced.rightCols(n));
}

template <class Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() != a.cols()) return false;
  for (Index r = 0; r < a.rows(); ++r) {
    for (Index c = 0; c < a.cols(); ++c) {
      if (!(a(r, c) == conj(a(c, r)))) return false;
    }
  }
  return true;
}

/// Entrywise conjugate transpose.
template <class Derived>
Matrix<typename Derived::Scalar> adjoint_of(const Eigen::MatrixBase<Derived>& a) {
  Matrix<typename Derived::Scalar> out(a.cols(), a.rows());
  for (Index r = 0; r < a.rows(); ++r) {
    for (Index c = 0; c < a.cols(); ++c) out(c, r) = conj(a(r, c));
  }
  return out;
}

}  // namespace crjet

#endif  // CRJET_LINALG_HPP
