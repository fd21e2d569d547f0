#ifndef NILORBIT_PRESETS_HPP
#define NILORBIT_PRESETS_HPP

#include <string>

#include "nilorbit/lie.hpp"

namespace nilorbit {

// "torus:m", "heisenberg", "ut:n" (n x n upper unitriangular, n >= 2).
// Throws parse_error for unknown names or bad parameters.
GroupPtr preset_group(const std::string& name);

GroupPtr torus_group(int m);
GroupPtr heisenberg_group();
// Upper unitriangular n x n matrices; basis E_{i,i+1},...,E_{1,n} ordered by
// superdiagonal, filtration = lower central series.
GroupPtr unitriangular_group(int n);

// Position of E_{i,j} (1-based, i < j) in the ut:n basis order.
int ut_basis_index(int n, int i, int j);

}  // namespace nilorbit

#endif
