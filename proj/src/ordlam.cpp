#include "ordlam.hpp"

#include <sstream>

namespace znt {

LexVec LexVec::unit(int rank, int idx) {
  if (idx < 0 || idx >= rank) throw DomainError("unit index out of range");
  LexVec v(rank);
  v.c_[idx] = 1;
  return v;
}

LexVec LexVec::scalar(int rank, Int v) {
  if (rank < 1) throw DomainError("rank must be >= 1");
  LexVec r(rank);
  r.c_[0] = std::move(v);
  return r;
}

bool LexVec::is_zero() const {
  for (const auto& x : c_)
    if (x != 0) return false;
  return true;
}

void LexVec::check_rank(const LexVec& o) const {
  if (rank() != o.rank()) throw DomainError("rank mismatch");
}

LexVec LexVec::operator+(const LexVec& o) const {
  check_rank(o);
  LexVec r(rank());
  for (int i = 0; i < rank(); ++i) r.c_[i] = c_[i] + o.c_[i];
  return r;
}

LexVec LexVec::operator-(const LexVec& o) const {
  check_rank(o);
  LexVec r(rank());
  for (int i = 0; i < rank(); ++i) r.c_[i] = c_[i] - o.c_[i];
  return r;
}

LexVec LexVec::operator-() const {
  LexVec r(rank());
  for (int i = 0; i < rank(); ++i) r.c_[i] = -c_[i];
  return r;
}

LexVec LexVec::operator*(const Int& k) const {
  LexVec r(rank());
  for (int i = 0; i < rank(); ++i) r.c_[i] = c_[i] * k;
  return r;
}

LexVec& LexVec::operator+=(const LexVec& o) {
  check_rank(o);
  for (int i = 0; i < rank(); ++i) c_[i] += o.c_[i];
  return *this;
}

LexVec& LexVec::operator-=(const LexVec& o) {
  check_rank(o);
  for (int i = 0; i < rank(); ++i) c_[i] -= o.c_[i];
  return *this;
}

LexVec LexVec::widened(int rank) const {
  if (rank < this->rank()) throw DomainError("widened: smaller rank");
  LexVec r(rank);
  for (int i = 0; i < this->rank(); ++i) r.c_[i] = c_[i];
  return r;
}

LexVec LexVec::abs() const { return abs_of(*this); }

std::string LexVec::str() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < rank(); ++i) {
    if (i) os << ',';
    os << c_[i];
  }
  os << ')';
  return os.str();
}

LexVec LexVec::parse(const std::string& s) {
  size_t a = s.find('(');
  size_t b = s.rfind(')');
  if (a == std::string::npos || b == std::string::npos || b <= a)
    throw DomainError("LexVec parse: expected (a0,a1,...)");
  std::string body = s.substr(a + 1, b - a - 1);
  std::vector<Int> coords;
  std::string cur;
  for (char ch : body) {
    if (ch == ',') {
      coords.emplace_back(cur);
      cur.clear();
    } else if (!isspace(static_cast<unsigned char>(ch))) {
      cur += ch;
    }
  }
  if (!cur.empty()) coords.emplace_back(cur);
  if (coords.empty()) throw DomainError("LexVec parse: empty");
  LexVec v(static_cast<int>(coords.size()));
  for (int i = 0; i < v.rank(); ++i) v[i] = coords[i];
  return v;
}

int lex_compare(const LexVec& a, const LexVec& b) {
  if (a.rank() != b.rank()) throw DomainError("rank mismatch");
  for (int i = a.rank() - 1; i >= 0; --i) {
    if (a[i] < b[i]) return -1;
    if (a[i] > b[i]) return 1;
  }
  return 0;
}

bool lex_less(const LexVec& a, const LexVec& b) { return lex_compare(a, b) < 0; }
bool lex_leq(const LexVec& a, const LexVec& b) { return lex_compare(a, b) <= 0; }

LexVec lex_min(const LexVec& a, const LexVec& b) { return lex_less(a, b) ? a : b; }
LexVec lex_max(const LexVec& a, const LexVec& b) { return lex_less(a, b) ? b : a; }

int height_of(const LexVec& a) {
  for (int i = a.rank() - 1; i >= 0; --i)
    if (a[i] != 0) return i + 1;
  return 0;
}

LexVec abs_of(const LexVec& a) {
  LexVec n = -a;
  return lex_less(a, n) ? n : a;
}

bool all_even(const LexVec& a) {
  for (int i = 0; i < a.rank(); ++i)
    if (a[i] % 2 != 0) return false;
  return true;
}

LexVec half(const LexVec& a) {
  if (!all_even(a)) throw DomainError("half: vector not divisible by 2");
  LexVec r(a.rank());
  for (int i = 0; i < a.rank(); ++i) r[i] = a[i] / 2;
  return r;
}

}  // namespace znt
