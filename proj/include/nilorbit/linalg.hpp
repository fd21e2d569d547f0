#ifndef NILORBIT_LINALG_HPP
#define NILORBIT_LINALG_HPP

#include <gmpxx.h>

#include <optional>
#include <vector>

namespace nilorbit {

using QVec = std::vector<mpq_class>;
using QMat = std::vector<QVec>;  // rows

// Reduced row echelon form. Returns the nonzero rows; pivot column of row r
// goes into pivots[r] (strictly increasing is NOT guaranteed across calls that
// append rows; within one call it is).
QMat rref(QMat rows, std::vector<int>* pivots = nullptr);

// First nonzero index of v, or -1.
int first_nonzero(const QVec& v);

bool is_zero_vec(const QVec& v);

// Coefficients c with v = sum c_i basis[i]; nullopt if v is outside the span.
std::optional<QVec> solve_combo(const QMat& basis, const QVec& v);

bool in_span(const QMat& basis, const QVec& v);

// Basis of the intersection of two row spans (Zassenhaus).
QMat intersect_spans(const QMat& a, const QMat& b, int n);

// Basis of {v in Q^n : k . v = 0}.
QMat kernel_of_form(const QVec& k);

mpz_class height_of(const mpq_class& q);
mpz_class height_of_mat(const QMat& m);

}  // namespace nilorbit

#endif
