#pragma once

// Nonnegative matrices of field elements. A primitive transition matrix maps
// parent neighbour positions (rows) to child neighbour positions (columns);
// mass row-vectors are propagated by right multiplication.

#include <finitype/field.hpp>

#include <vector>

namespace finitype {

struct MatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class TransMatrix {
 public:
  TransMatrix() = default;
  TransMatrix(FieldPtr f, int rows, int cols)
      : field_(std::move(f)), rows_(rows), cols_(cols),
        m_(static_cast<size_t>(rows) * static_cast<size_t>(cols), FieldElement::zero(field_)) {
    if (rows <= 0 || cols <= 0) throw MatrixError("matrix dimensions must be positive");
  }

  static TransMatrix identity(FieldPtr f, int n) {
    TransMatrix t(std::move(f), n, n);
    for (int i = 0; i < n; ++i) t.at(i, i) = FieldElement::one(t.field_);
    return t;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  const FieldPtr& field() const { return field_; }

  FieldElement& at(int i, int j) { return m_[static_cast<size_t>(i) * cols_ + j]; }
  const FieldElement& at(int i, int j) const { return m_[static_cast<size_t>(i) * cols_ + j]; }

  friend TransMatrix operator*(const TransMatrix& a, const TransMatrix& b) {
    if (a.cols_ != b.rows_) throw MatrixError("matrix dimension mismatch in product");
    TransMatrix c(a.field_, a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        if (a.at(i, k).is_zero()) continue;
        for (int j = 0; j < b.cols_; ++j) {
          if (b.at(k, j).is_zero()) continue;
          c.at(i, j) += a.at(i, k) * b.at(k, j);
        }
      }
    return c;
  }

  friend bool operator==(const TransMatrix& a, const TransMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.m_ == b.m_;
  }

  // Sum of all entries; entries are nonnegative by construction.
  FieldElement norm1() const {
    auto s = FieldElement::zero(field_);
    for (const auto& e : m_) s += e;
    return s;
  }

  FieldElement col_sum(int j) const {
    auto s = FieldElement::zero(field_);
    for (int i = 0; i < rows_; ++i) s += at(i, j);
    return s;
  }
  FieldElement row_sum(int i) const {
    auto s = FieldElement::zero(field_);
    for (int j = 0; j < cols_; ++j) s += at(i, j);
    return s;
  }
  FieldElement min_col_sum() const { return extremal_sum(true, true); }
  FieldElement max_col_sum() const { return extremal_sum(true, false); }
  FieldElement min_row_sum() const { return extremal_sum(false, true); }
  FieldElement max_row_sum() const { return extremal_sum(false, false); }

  bool all_positive() const {
    for (const auto& e : m_)
      if (e.sign() <= 0) return false;
    return true;
  }
  bool is_zero() const {
    for (const auto& e : m_)
      if (!e.is_zero()) return false;
    return true;
  }
  bool columns_nonzero() const {
    for (int j = 0; j < cols_; ++j) {
      bool nz = false;
      for (int i = 0; i < rows_ && !nz; ++i) nz = !at(i, j).is_zero();
      if (!nz) return false;
    }
    return true;
  }

  // Zero/nonzero pattern, row-major.
  std::vector<bool> support() const {
    std::vector<bool> s(m_.size());
    for (size_t i = 0; i < m_.size(); ++i) s[i] = !m_[i].is_zero();
    return s;
  }

 private:
  FieldElement extremal_sum(bool columns, bool take_min) const {
    int n = columns ? cols_ : rows_;
    FieldElement best = columns ? col_sum(0) : row_sum(0);
    for (int k = 1; k < n; ++k) {
      auto s = columns ? col_sum(k) : row_sum(k);
      if (take_min ? (s < best) : (s > best)) best = s;
    }
    return best;
  }

  FieldPtr field_;
  int rows_ = 0, cols_ = 0;
  std::vector<FieldElement> m_;
};

}  // namespace finitype
