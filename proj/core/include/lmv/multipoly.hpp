#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "lmv/errors.hpp"

namespace lmv {

using Complex = std::complex<double>;

/// Sparse multivariate polynomial over C with dense exponent vectors. Sized
/// for small systems (a handful of variables, modest degrees); arithmetic
/// keeps terms in a canonical monomial order so iteration is deterministic.
class MultiPoly {
 public:
  using Exponents = std::vector<std::uint8_t>;

  explicit MultiPoly(int num_vars) : num_vars_(num_vars) {}

  static MultiPoly constant(int num_vars, Complex value);
  static MultiPoly variable(int num_vars, int index);

  int num_vars() const { return num_vars_; }
  int num_terms() const { return static_cast<int>(terms_.size()); }
  bool is_zero() const { return terms_.empty(); }
  int total_degree() const;
  double max_abs_coefficient() const;

  const std::map<Exponents, Complex>& terms() const { return terms_; }

  MultiPoly operator+(const MultiPoly& other) const;
  MultiPoly operator-(const MultiPoly& other) const;
  MultiPoly operator*(const MultiPoly& other) const;
  MultiPoly operator*(Complex scalar) const;
  MultiPoly& operator+=(const MultiPoly& other);

  /// d/dx_index.
  MultiPoly differentiate(int index) const;

  Complex evaluate(const Eigen::VectorXcd& point) const;

  /// Drops terms whose magnitude is below rel_tol times the largest
  /// coefficient (squashes expansion dust from floating-point construction).
  MultiPoly pruned(double rel_tol = 1e-14) const;

 private:
  void add_term(const Exponents& e, Complex c);

  int num_vars_;
  std::map<Exponents, Complex> terms_;
};

}  // namespace lmv
