#include "nilorbit/presets.hpp"

#include <cstdlib>

namespace nilorbit {

GroupPtr torus_group(int m) {
  if (m < 1) throw parse_error("torus dimension must be >= 1");
  std::vector<mpq_class> c((size_t)m * m * m, 0);
  Filtration f;
  f.dims = {m, m};
  return NilGroup::create(LieAlgebraData(m, std::move(c)), f,
                          "torus:" + std::to_string(m));
}

GroupPtr heisenberg_group() { return unitriangular_group(3); }

int ut_basis_index(int n, int i, int j) {
  // superdiagonal d = j - i, entries ordered by d then by i
  int d = j - i;
  int idx = 0;
  for (int dd = 1; dd < d; ++dd) idx += n - dd;
  return idx + (i - 1);
}

GroupPtr unitriangular_group(int n) {
  if (n < 2) throw parse_error("ut:n needs n >= 2");
  int m = n * (n - 1) / 2;
  // basis vectors are E_{ij}; [E_ab, E_cd] = delta_{bc} E_ad - delta_{da} E_cb
  std::vector<std::pair<int, int>> pos(m);
  for (int d = 1; d < n; ++d)
    for (int i = 1; i + d <= n; ++i) pos[ut_basis_index(n, i, i + d)] = {i, i + d};
  std::vector<mpq_class> c((size_t)m * m * m, 0);
  auto set = [&](int a, int b, int k, int v) {
    c[((size_t)a * m + b) * m + k] = v;
  };
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      auto [i, j] = pos[a];
      auto [k, l] = pos[b];
      if (j == k) set(a, b, ut_basis_index(n, i, l), 1);
      if (l == i) set(a, b, ut_basis_index(n, k, j), -1);
    }
  Filtration f;
  f.dims.resize(n);
  f.dims[0] = m;
  for (int lvl = 1; lvl < n; ++lvl) {
    int dim = 0;
    for (int d = lvl; d < n; ++d) dim += n - d;
    f.dims[lvl] = dim;
  }
  std::string name = n == 3 ? "heisenberg" : "ut:" + std::to_string(n);
  return NilGroup::create(LieAlgebraData(m, std::move(c)), f, name);
}

GroupPtr preset_group(const std::string& name) {
  if (name == "heisenberg") return heisenberg_group();
  if (name.rfind("torus:", 0) == 0)
    return torus_group(std::atoi(name.c_str() + 6));
  if (name.rfind("ut:", 0) == 0)
    return unitriangular_group(std::atoi(name.c_str() + 3));
  throw parse_error("unknown group preset: " + name);
}

}  // namespace nilorbit
