#include "lmv/multipoly.hpp"

#include <algorithm>
#include <numeric>

namespace lmv {

MultiPoly MultiPoly::constant(int num_vars, Complex value) {
  MultiPoly p(num_vars);
  if (value != Complex(0.0))
    p.terms_.emplace(Exponents(num_vars, 0), value);
  return p;
}

MultiPoly MultiPoly::variable(int num_vars, int index) {
  if (index < 0 || index >= num_vars) throw Error("variable index out of range");
  MultiPoly p(num_vars);
  Exponents e(num_vars, 0);
  e[index] = 1;
  p.terms_.emplace(std::move(e), Complex(1.0));
  return p;
}

int MultiPoly::total_degree() const {
  int deg = 0;
  for (const auto& [e, c] : terms_)
    deg = std::max(deg, std::accumulate(e.begin(), e.end(), 0));
  return deg;
}

double MultiPoly::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

void MultiPoly::add_term(const Exponents& e, Complex c) {
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    if (c != Complex(0.0)) terms_.emplace(e, c);
    return;
  }
  it->second += c;
  if (it->second == Complex(0.0)) terms_.erase(it);
}

MultiPoly MultiPoly::operator+(const MultiPoly& other) const {
  if (num_vars_ != other.num_vars_) throw Error("variable count mismatch");
  MultiPoly out = *this;
  for (const auto& [e, c] : other.terms_) out.add_term(e, c);
  return out;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& other) {
  if (num_vars_ != other.num_vars_) throw Error("variable count mismatch");
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

MultiPoly MultiPoly::operator-(const MultiPoly& other) const {
  if (num_vars_ != other.num_vars_) throw Error("variable count mismatch");
  MultiPoly out = *this;
  for (const auto& [e, c] : other.terms_) out.add_term(e, -c);
  return out;
}

MultiPoly MultiPoly::operator*(const MultiPoly& other) const {
  if (num_vars_ != other.num_vars_) throw Error("variable count mismatch");
  MultiPoly out(num_vars_);
  Exponents e(num_vars_);
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : other.terms_) {
      for (int i = 0; i < num_vars_; ++i)
        e[i] = static_cast<std::uint8_t>(ea[i] + eb[i]);
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

MultiPoly MultiPoly::operator*(Complex scalar) const {
  MultiPoly out(num_vars_);
  if (scalar == Complex(0.0)) return out;
  for (const auto& [e, c] : terms_) out.terms_.emplace(e, c * scalar);
  return out;
}

MultiPoly MultiPoly::differentiate(int index) const {
  if (index < 0 || index >= num_vars_) throw Error("variable index out of range");
  MultiPoly out(num_vars_);
  for (const auto& [e, c] : terms_) {
    if (e[index] == 0) continue;
    Exponents d = e;
    --d[index];
    out.add_term(d, c * static_cast<double>(e[index]));
  }
  return out;
}

Complex MultiPoly::evaluate(const Eigen::VectorXcd& point) const {
  if (point.size() != num_vars_) throw Error("evaluation point size mismatch");
  Complex sum(0.0);
  for (const auto& [e, c] : terms_) {
    Complex term = c;
    for (int i = 0; i < num_vars_; ++i) {
      Complex p(1.0);
      Complex base = point[i];
      for (int k = e[i]; k > 0; --k) p *= base;
      term *= p;
    }
    sum += term;
  }
  return sum;
}

MultiPoly MultiPoly::pruned(double rel_tol) const {
  const double cutoff = rel_tol * max_abs_coefficient();
  MultiPoly out(num_vars_);
  for (const auto& [e, c] : terms_)
    if (std::abs(c) > cutoff) out.terms_.emplace(e, c);
  return out;
}

}  // namespace lmv
