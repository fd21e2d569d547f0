#ifndef NILORBIT_LIE_HPP
#define NILORBIT_LIE_HPP

#include <memory>
#include <string>
#include <vector>

#include "nilorbit/linalg.hpp"
#include "nilorbit/rpoly.hpp"
#include "nilorbit/scalar.hpp"

namespace nilorbit {

// Filtration G = G_0 = G_1 >= G_2 >= ... >= G_d, recorded by dimensions.
// G_i is realized as the span of the last dims[i] basis vectors.
struct Filtration {
  std::vector<int> dims;  // m_0, m_1, ..., m_d

  int degree() const { return (int)dims.size() - 1; }
  int dim(int i) const {
    if (i < 0) return dims.empty() ? 0 : dims[0];
    return i < (int)dims.size() ? dims[i] : 0;
  }
  // Largest level l >= 1 with coordinate idx (0-based) inside G_l.
  int coordinate_level(int idx, int m) const;
  // Coordinate idx may be nonzero in a Taylor coefficient of total degree k
  // iff idx >= m - dim(k).
  bool coordinate_allowed(int idx, int k, int m) const {
    return idx >= m - dim(k);
  }
  void validate(int m) const;
};

// Structure constants [X_i, X_j] = sum_k c_ijk X_k, exact rationals.
class LieAlgebraData {
 public:
  LieAlgebraData(int m, std::vector<mpq_class> c);  // c[(i*m+j)*m+k], dense

  int dim() const { return m_; }
  int step() const { return step_; }  // inferred, not trusted from input
  const mpq_class& c(int i, int j, int k) const {
    return c_[((size_t)i * m_ + j) * m_ + k];
  }

  QVec bracket(const QVec& a, const QVec& b) const;
  std::vector<RatPoly> bracket(const std::vector<RatPoly>& a,
                               const std::vector<RatPoly>& b) const;
  std::vector<Scalar> bracket(const std::vector<Scalar>& a,
                              const std::vector<Scalar>& b) const;

  // Echelonized basis of [g, g] (coefficient span of all brackets).
  const QMat& derived_span() const { return derived_span_; }
  mpz_class height() const { return height_; }

 private:
  void validate_and_infer();
  int m_;
  std::vector<mpq_class> c_;
  int step_ = 0;
  QMat derived_span_;
  mpz_class height_ = 1;
};

class NilGroup;
using GroupPtr = std::shared_ptr<const NilGroup>;

// Element in second-kind Mal'cev coordinates relative to a fixed group basis.
struct GroupElement {
  GroupPtr group;
  std::vector<Scalar> psi;
};

// Connected, simply connected nilpotent Lie group presented by rational
// structure constants in a Mal'cev basis; the lattice is psi^{-1}(Z^m).
// All polynomial caches are computed in the constructor; instances are
// immutable afterwards and safe to share across threads.
class NilGroup : public std::enable_shared_from_this<NilGroup> {
 public:
  static GroupPtr create(LieAlgebraData alg, Filtration filt,
                         std::string name = "");

  int dim() const { return alg_.dim(); }
  int step() const { return alg_.step(); }
  int degree() const { return filt_.degree(); }
  const Filtration& filtration() const { return filt_; }
  const LieAlgebraData& algebra() const { return alg_; }
  const std::string& name() const { return name_; }
  mpz_class rationality_height() const { return height_; }

  std::vector<Scalar> identity() const {
    return std::vector<Scalar>(dim(), Scalar(0));
  }
  std::vector<Scalar> multiply(const std::vector<Scalar>& x,
                               const std::vector<Scalar>& y) const;
  std::vector<Scalar> invert(const std::vector<Scalar>& x) const;
  std::vector<Scalar> commutator(const std::vector<Scalar>& x,
                                 const std::vector<Scalar>& y) const;
  std::vector<Scalar> power(const std::vector<Scalar>& x, mpz_class n) const;
  std::vector<Scalar> to_first_kind(const std::vector<Scalar>& second) const;
  std::vector<Scalar> to_second_kind(const std::vector<Scalar>& first) const;
  // log(exp t . exp u) for first-kind coordinate vectors.
  std::vector<Scalar> bch_first_kind(const std::vector<Scalar>& t,
                                     const std::vector<Scalar>& u) const;

  QVec multiply_q(const QVec& x, const QVec& y) const;
  QVec to_first_kind_q(const QVec& second) const;
  QVec to_second_kind_q(const QVec& first) const;

  GroupElement element(std::vector<Scalar> psi) const;

  // Largest level l with x in G_l, decided by coordinate support.
  int element_level(const std::vector<Scalar>& psi) const;

  const std::vector<RatPoly>& mult_polys() const { return mult_; }
  const std::vector<RatPoly>& inv_polys() const { return inv_; }
  const std::vector<RatPoly>& first_of_second() const { return fos_; }
  const std::vector<RatPoly>& second_of_first() const { return sof_; }
  int mult_degree() const { return mult_degree_; }

  NilGroup(LieAlgebraData alg, Filtration filt, std::string name);

 private:
  void build_caches();

  LieAlgebraData alg_;
  Filtration filt_;
  std::string name_;
  mpz_class height_ = 1;
  std::vector<RatPoly> fos_, sof_, mult_, inv_;
  int mult_degree_ = 1;
};

// Dynkin series log(exp X . exp Y) truncated past the nilpotency step,
// evaluated on coefficient vectors over an arbitrary bracket-capable entry
// type (rational polynomials or scalars).
std::vector<RatPoly> bch_dynkin(const LieAlgebraData& alg,
                                const std::vector<RatPoly>& x,
                                const std::vector<RatPoly>& y);
std::vector<Scalar> bch_dynkin(const LieAlgebraData& alg,
                               const std::vector<Scalar>& x,
                               const std::vector<Scalar>& y);

// Mal'cev basis for a rational subgroup G' of an ambient group, adapted to a
// filtration of G'. Carries G' as a group in its own coordinates plus exact
// coordinate changes. The construction scales and corrects an echelonized
// weak basis so that the subgroup lattice (ambient-integral points of G')
// is exactly the integral points of the new coordinates.
struct SubgroupBasis {
  GroupPtr ambient;
  GroupPtr group;   // G' in its own coordinates
  QMat vectors;     // rows: basis vectors as ambient first-kind combinations
  Filtration filt;
  mpz_class height = 1;

  std::vector<Scalar> to_subgroup(const std::vector<Scalar>& ambient_psi) const;
  std::vector<Scalar> to_ambient(const std::vector<Scalar>& sub_psi) const;
  bool contains(const std::vector<Scalar>& ambient_psi) const;
};

// level_spans[l-1] spans g'_l for l = 1..d'; level_spans[0] spans all of g'.
// Vectors are ambient first-kind combinations. Throws invariant_error when a
// filtration level is not spanned consistently, when brackets leave the
// claimed levels, or when the lattice-scaling search fails.
SubgroupBasis build_malcev_basis(GroupPtr ambient,
                                 const std::vector<QMat>& level_spans,
                                 long divisor_cap = 1u << 20);

// Same, but verifies bracket closure of the generators first (error names a
// violating pair) and derives the level spans as g'_l = g' intersect G_l when
// only the generator span is supplied.
SubgroupBasis subgroup_malcev_basis(GroupPtr ambient, const QMat& generators,
                                    const std::vector<QMat>& level_spans = {});

// Same group with the refined filtration G'_i := G_{ceil(i / inner_degree)},
// which hosts sequences presented as products a_1^{p_1(n)} ... a_k^{p_k(n)}
// with deg p_i <= inner_degree.
GroupPtr refined_filtration_group(const GroupPtr& g, int inner_degree);

}  // namespace nilorbit

#endif
