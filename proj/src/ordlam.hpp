#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>
#include <vector>

namespace znt {

using Int = boost::multiprecision::cpp_int;

// Domain-level failure (invalid input, violated precondition, exceeded budget).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Element of Z^n under the right lexicographic order.  Index 0 is the least
// significant coordinate: comparison reads the last coordinate first.  The
// same type serves as a length value and as an exponent tuple.
class LexVec {
 public:
  LexVec() = default;
  explicit LexVec(int rank) : c_(rank) {}
  LexVec(std::initializer_list<Int> v) : c_(v) {}

  static LexVec unit(int rank, int idx);
  static LexVec scalar(int rank, Int v);

  int rank() const { return static_cast<int>(c_.size()); }
  const Int& operator[](int i) const { return c_[i]; }
  Int& operator[](int i) { return c_[i]; }

  bool is_zero() const;
  LexVec abs() const;

  LexVec operator+(const LexVec& o) const;
  LexVec operator-(const LexVec& o) const;
  LexVec operator-() const;
  LexVec operator*(const Int& k) const;
  LexVec& operator+=(const LexVec& o);
  LexVec& operator-=(const LexVec& o);
  bool operator==(const LexVec& o) const { return c_ == o.c_; }

  // Zero-pads to a larger rank (embedding into a bigger Z^n).
  LexVec widened(int rank) const;

  std::string str() const;                    // "(a0,a1,...,a_{n-1})"
  static LexVec parse(const std::string& s);  // inverse of str()

 private:
  std::vector<Int> c_;
  void check_rank(const LexVec& o) const;
};

// Total order: -1, 0, +1.  Throws DomainError on rank mismatch.
int lex_compare(const LexVec& a, const LexVec& b);
bool lex_less(const LexVec& a, const LexVec& b);
bool lex_leq(const LexVec& a, const LexVec& b);
LexVec lex_min(const LexVec& a, const LexVec& b);
LexVec lex_max(const LexVec& a, const LexVec& b);

// Least k with a in E_k (coordinates at index >= k all vanish); 0 iff a = 0.
int height_of(const LexVec& a);

// max{a, -a}
LexVec abs_of(const LexVec& a);

// Gromov-product helpers: c(f,g) lives in (1/2)Z^n.
bool all_even(const LexVec& a);
LexVec half(const LexVec& a);  // requires all_even

}  // namespace znt
