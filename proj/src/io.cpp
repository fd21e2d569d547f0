#include "nilorbit/io.hpp"

#include <fstream>

#include "nilorbit/equidist.hpp"
#include "nilorbit/presets.hpp"

namespace nilorbit {

Scalar scalar_from_json(const Json& j) {
  if (j.is_string()) return Scalar::from_string(j.get<std::string>());
  if (j.is_number_integer()) return Scalar((long)j.get<long long>());
  if (j.is_number_float()) return Scalar::approx(j.get<double>());
  if (j.is_object() && j.contains("sqrt"))
    return Scalar::sqrt_of(j.at("sqrt").get<long>());
  if (j.is_array() && j.size() == 2)
    return Scalar(mpq_class(mpz_class((long)j[0].get<long long>()),
                            mpz_class((long)j[1].get<long long>())));
  throw parse_error("unrecognized scalar encoding: " + j.dump());
}

Json scalar_to_json(const Scalar& s) {
  if (s.is_exact()) {
    if (s.rational().get_den() == 1) {
      const mpz_class& n = s.rational().get_num();
      if (n.fits_slong_p()) return Json((long)n.get_si());
    }
    return Json(s.str());
  }
  return Json(s.to_double());
}

GroupPtr group_from_json(const Json& j) {
  if (!j.contains("dimension") || !j.contains("filtration"))
    throw parse_error("group file needs 'dimension' and 'filtration'");
  int m = j.at("dimension").get<int>();
  if (m < 0 || m > 24) throw parse_error("dimension out of range");
  std::vector<mpq_class> c((size_t)m * m * m, 0);
  std::vector<char> seen((size_t)m * m * m, 0);
  if (j.contains("structure_constants")) {
    for (const auto& row : j.at("structure_constants")) {
      if (!row.is_array() || row.size() != 5)
        throw parse_error("structure constant rows are [i,j,k,num,den]");
      int a = row[0].get<int>(), b = row[1].get<int>(), k = row[2].get<int>();
      long num = row[3].get<long>(), den = row[4].get<long>();
      if (a < 1 || a > m || b < 1 || b > m || k < 1 || k > m || den == 0)
        throw parse_error("bad structure constant entry");
      mpq_class v(num, den);
      v.canonicalize();
      size_t idx = ((size_t)(a - 1) * m + (b - 1)) * m + (k - 1);
      c[idx] = v;
      seen[idx] = 1;
    }
    // fill antisymmetric counterparts that were not listed explicitly
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int k = 0; k < m; ++k) {
          size_t ij = ((size_t)a * m + b) * m + k;
          size_t ji = ((size_t)b * m + a) * m + k;
          if (seen[ij] && !seen[ji]) {
            c[ji] = -c[ij];
            seen[ji] = 1;
          }
        }
  }
  Filtration f;
  for (const auto& d : j.at("filtration")) f.dims.push_back(d.get<int>());
  std::string name = j.value("name", std::string("custom"));
  GroupPtr g = NilGroup::create(LieAlgebraData(m, std::move(c)), f, name);
  if (j.contains("basis")) {
    QMat weak;
    for (const auto& row : j.at("basis")) {
      QVec v;
      for (const auto& e : row) {
        Scalar s = scalar_from_json(e);
        v.push_back(s.rational());
      }
      if ((int)v.size() != m) throw parse_error("basis row length mismatch");
      weak.push_back(v);
    }
    if ((int)weak.size() != m) throw parse_error("basis must have m rows");
    // adapt the weak basis to the stated filtration levels
    std::vector<QMat> levels;
    levels.push_back(weak);
    for (int l = 2; l <= f.degree(); ++l) {
      QMat amb;
      for (int i = m - f.dim(l); i < m; ++i) {
        QVec e(m, 0);
        e[i] = 1;
        amb.push_back(e);
      }
      QMat inter = intersect_spans(weak, amb, m);
      if (inter.empty()) break;
      levels.push_back(inter);
    }
    SubgroupBasis sb = build_malcev_basis(g, levels);
    return sb.group;
  }
  return g;
}

GroupPtr load_group(const std::string& spec) {
  if (spec == "heisenberg" || spec.rfind("torus:", 0) == 0 ||
      spec.rfind("ut:", 0) == 0)
    return preset_group(spec);
  std::ifstream in(spec);
  if (!in) throw parse_error("cannot open group file: " + spec);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw parse_error("group file is not valid JSON: " + std::string(e.what()));
  }
  return group_from_json(j);
}

PolySeq seq_from_json(const Json& j, const GroupPtr& g) {
  int t = j.value("t", 1);
  PolySeq s(g, t);
  if (!j.contains("coefficients"))
    throw parse_error("sequence file needs 'coefficients'");
  for (const auto& entry : j.at("coefficients")) {
    MultiIndex idx;
    for (const auto& v : entry.at("j")) idx.push_back(v.get<int>());
    std::vector<Scalar> vec;
    for (const auto& v : entry.at("vector")) vec.push_back(scalar_from_json(v));
    if ((int)idx.size() != t) throw parse_error("coefficient index arity");
    if ((int)vec.size() != g->dim())
      throw parse_error("coefficient vector length");
    s.set_coeff(idx, std::move(vec));
  }
  s.check_support();
  return s;
}

Json seq_to_json(const PolySeq& s) {
  Json j;
  j["t"] = s.params();
  j["d"] = s.degree();
  Json coeffs = Json::array();
  for (const auto& [idx, vec] : s.coeffs()) {
    Json e;
    e["j"] = idx;
    Json v = Json::array();
    for (const auto& x : vec) v.push_back(scalar_to_json(x));
    e["vector"] = v;
    coeffs.push_back(e);
  }
  j["coefficients"] = coeffs;
  return j;
}

Json certificate_to_json(const Certificate& c) {
  Json j;
  j["verdict"] = c.equidistributed ? "equidistributed" : "obstruction";
  j["delta"] = c.delta;
  j["K"] = c.K;
  j["N"] = c.N;
  j["max_abs_S"] = c.max_abs_S;
  if (!c.equidistributed) {
    Json k = Json::array();
    for (const auto& x : c.eta) k.push_back((long)x.get_si());
    j["eta"] = k;
    j["abs_S"] = c.abs_S;
    j["smoothness_value"] = c.smoothness_value.to_double();
    j["smoothness_value_exact"] = c.smoothness_value.str();
    j["q"] = c.q;
  }
  return j;
}

}  // namespace nilorbit
