#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ordlam.hpp"

namespace znt {

// One symbol with a sign.  sym indexes a per-tower alphabet.
struct Letter {
  int sym = 0;
  int sgn = 1;  // +1 or -1
  bool operator==(const Letter&) const = default;
};

inline Letter inv(Letter l) { return {l.sym, -l.sgn}; }

// Reduced finite word; the level-1 elements.  Kept reduced by construction.
using Word = std::vector<Letter>;

bool is_reduced(const Word& w);
Word winv(const Word& w);

// Reduced product u * v (cancels the matched middle).
Word wmul(const Word& u, const Word& v);

// Longest common initial segment of u and v.
Word wcom(const Word& u, const Word& v);
size_t wcom_len(const Word& u, const Word& v);

Word wpow(const Word& u, long k);

bool is_cyc_reduced(const Word& w);

// w = winv(c) . core . c with core cyclically reduced.
void wcyc_decompose(const Word& w, Word& c, Word& core);

// Primitive root of a cyclically reduced word: w = root^k, k maximal.
void wroot(const Word& w, Word& root, long& k);

// Does some cyclic permutation of a equal b?  Both cyclically reduced.
bool wcyc_perm_eq(const Word& a, const Word& b);

// Interned generator names shared by one tower (or one free group).
class Alphabet {
 public:
  int add(const std::string& name);           // throws on duplicates
  int index_of(const std::string& name) const;  // -1 if absent
  const std::string& name(int sym) const { return names_.at(sym); }
  int size() const { return static_cast<int>(names_.size()); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> idx_;
};

std::string wstr(const Word& w, const Alphabet& a);  // "x y^-1 x^2" style

}  // namespace znt
