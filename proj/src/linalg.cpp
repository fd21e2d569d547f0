#include "nilorbit/linalg.hpp"

#include <algorithm>

namespace nilorbit {

int first_nonzero(const QVec& v) {
  for (size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0) return (int)i;
  return -1;
}

bool is_zero_vec(const QVec& v) { return first_nonzero(v) < 0; }

QMat rref(QMat rows, std::vector<int>* pivots) {
  if (pivots) pivots->clear();
  QMat out;
  size_t n = rows.empty() ? 0 : rows[0].size();
  std::vector<int> piv_cols;
  for (size_t col = 0; col < n; ++col) {
    int found = -1;
    for (size_t r = 0; r < rows.size(); ++r) {
      if (rows[r][col] != 0 && first_nonzero(rows[r]) == (int)col) {
        found = (int)r;
        break;
      }
    }
    if (found < 0) continue;
    QVec row = rows[found];
    mpq_class lead = row[col];
    for (auto& x : row) x /= lead;
    // eliminate everywhere
    for (auto& other : rows) {
      if (&other == &rows[found]) continue;
      if (other[col] != 0) {
        mpq_class f = other[col];
        for (size_t i = 0; i < n; ++i) other[i] -= f * row[i];
      }
    }
    for (auto& prev : out) {
      if (prev[col] != 0) {
        mpq_class f = prev[col];
        for (size_t i = 0; i < n; ++i) prev[i] -= f * row[i];
      }
    }
    rows[found] = QVec(n, 0);
    out.push_back(row);
    piv_cols.push_back((int)col);
  }
  if (pivots) *pivots = piv_cols;
  return out;
}

std::optional<QVec> solve_combo(const QMat& basis, const QVec& v) {
  // Gaussian elimination on the transposed system [basis^T | v].
  size_t n = v.size(), k = basis.size();
  QMat aug(n, QVec(k + 1, 0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < k; ++j) aug[i][j] = basis[j][i];
    aug[i][k] = v[i];
  }
  std::vector<int> pivot_row(k, -1);
  size_t row = 0;
  for (size_t col = 0; col < k && row < n; ++col) {
    size_t sel = row;
    while (sel < n && aug[sel][col] == 0) ++sel;
    if (sel == n) continue;
    std::swap(aug[sel], aug[row]);
    mpq_class lead = aug[row][col];
    for (auto& x : aug[row]) x /= lead;
    for (size_t r = 0; r < n; ++r) {
      if (r != row && aug[r][col] != 0) {
        mpq_class f = aug[r][col];
        for (size_t j = 0; j <= k; ++j) aug[r][j] -= f * aug[row][j];
      }
    }
    pivot_row[col] = (int)row;
    ++row;
  }
  // consistency: rows with zero coefficients must have zero rhs
  for (size_t r = row; r < n; ++r)
    if (aug[r][k] != 0) return std::nullopt;
  for (size_t r = 0; r < row; ++r) {
    bool all_zero = true;
    for (size_t j = 0; j < k; ++j)
      if (aug[r][j] != 0) { all_zero = false; break; }
    if (all_zero && aug[r][k] != 0) return std::nullopt;
  }
  QVec c(k, 0);
  for (size_t col = 0; col < k; ++col)
    if (pivot_row[col] >= 0) c[col] = aug[pivot_row[col]][k];
  return c;
}

bool in_span(const QMat& basis, const QVec& v) {
  return solve_combo(basis, v).has_value();
}

QMat intersect_spans(const QMat& a, const QMat& b, int n) {
  // Zassenhaus: rows [x | x] for x in a, [y | 0] for y in b.
  QMat block;
  for (const auto& x : a) {
    QVec row(2 * n, 0);
    for (int i = 0; i < n; ++i) row[i] = x[i], row[n + i] = x[i];
    block.push_back(row);
  }
  for (const auto& y : b) {
    QVec row(2 * n, 0);
    for (int i = 0; i < n; ++i) row[i] = y[i];
    block.push_back(row);
  }
  QMat ech = rref(std::move(block));
  QMat inter;
  for (const auto& row : ech) {
    bool left_zero = true;
    for (int i = 0; i < n; ++i)
      if (row[i] != 0) { left_zero = false; break; }
    if (!left_zero) continue;
    QVec tail(row.begin() + n, row.end());
    if (!is_zero_vec(tail)) inter.push_back(tail);
  }
  return rref(std::move(inter));
}

QMat kernel_of_form(const QVec& k) {
  int n = (int)k.size();
  int p = first_nonzero(k);
  QMat out;
  if (p < 0) {
    for (int i = 0; i < n; ++i) {
      QVec e(n, 0);
      e[i] = 1;
      out.push_back(e);
    }
    return out;
  }
  for (int i = 0; i < n; ++i) {
    if (i == p) continue;
    QVec v(n, 0);
    v[i] = 1;
    v[p] = -k[i] / k[p];
    out.push_back(v);
  }
  return out;
}

mpz_class height_of(const mpq_class& q) {
  mpz_class n = abs(q.get_num()), d = abs(q.get_den());
  return n > d ? n : d;
}

mpz_class height_of_mat(const QMat& m) {
  mpz_class h = 1;
  for (const auto& row : m)
    for (const auto& q : row) {
      mpz_class x = height_of(q);
      if (x > h) h = x;
    }
  return h;
}

}  // namespace nilorbit
