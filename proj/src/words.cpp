#include "words.hpp"

#include <algorithm>
#include <sstream>

namespace znt {

bool is_reduced(const Word& w) {
  for (size_t i = 0; i + 1 < w.size(); ++i)
    if (w[i + 1] == inv(w[i])) return false;
  return true;
}

Word winv(const Word& w) {
  Word r;
  r.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) r.push_back(inv(*it));
  return r;
}

Word wmul(const Word& u, const Word& v) {
  size_t cut = 0;
  while (cut < u.size() && cut < v.size() && v[cut] == inv(u[u.size() - 1 - cut])) ++cut;
  Word r;
  r.reserve(u.size() + v.size() - 2 * cut);
  r.insert(r.end(), u.begin(), u.end() - cut);
  r.insert(r.end(), v.begin() + cut, v.end());
  return r;
}

size_t wcom_len(const Word& u, const Word& v) {
  size_t n = std::min(u.size(), v.size());
  size_t i = 0;
  while (i < n && u[i] == v[i]) ++i;
  return i;
}

Word wcom(const Word& u, const Word& v) {
  size_t n = wcom_len(u, v);
  return Word(u.begin(), u.begin() + n);
}

Word wpow(const Word& u, long k) {
  if (k == 0 || u.empty()) return {};
  Word base = k > 0 ? u : winv(u);
  long n = k > 0 ? k : -k;
  // power of a word that is not cyclically reduced is formed by repeated wmul
  Word r = base;
  for (long i = 1; i < n; ++i) r = wmul(r, base);
  return r;
}

bool is_cyc_reduced(const Word& w) {
  if (w.size() < 2) return true;
  return w.front() != inv(w.back());
}

void wcyc_decompose(const Word& w, Word& c, Word& core) {
  size_t i = 0, j = w.size();
  while (j >= i + 2 && w[i] == inv(w[j - 1])) {
    ++i;
    --j;
  }
  core.assign(w.begin() + i, w.begin() + j);
  c.assign(w.begin() + j, w.end());
}

void wroot(const Word& w, Word& root, long& k) {
  size_t n = w.size();
  if (n == 0) {
    root.clear();
    k = 0;
    return;
  }
  for (size_t p = 1; p <= n / 2; ++p) {
    if (n % p != 0) continue;
    bool ok = true;
    for (size_t i = p; i < n && ok; ++i)
      if (!(w[i] == w[i - p])) ok = false;
    if (ok) {
      root.assign(w.begin(), w.begin() + p);
      k = static_cast<long>(n / p);
      return;
    }
  }
  root = w;
  k = 1;
}

bool wcyc_perm_eq(const Word& a, const Word& b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  size_t n = a.size();
  for (size_t s = 0; s < n; ++s) {
    bool ok = true;
    for (size_t i = 0; i < n && ok; ++i)
      if (!(a[(s + i) % n] == b[i])) ok = false;
    if (ok) return true;
  }
  return false;
}

int Alphabet::add(const std::string& name) {
  if (idx_.count(name)) throw DomainError("duplicate generator name: " + name);
  int id = static_cast<int>(names_.size());
  names_.push_back(name);
  idx_[name] = id;
  return id;
}

int Alphabet::index_of(const std::string& name) const {
  auto it = idx_.find(name);
  return it == idx_.end() ? -1 : it->second;
}

std::string wstr(const Word& w, const Alphabet& a) {
  if (w.empty()) return "1";
  std::ostringstream os;
  size_t i = 0;
  bool first = true;
  while (i < w.size()) {
    size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    long run = static_cast<long>(j - i) * w[i].sgn;
    if (!first) os << ' ';
    first = false;
    os << a.name(w[i].sym);
    if (run != 1) os << '^' << run;
    i = j;
  }
  return os.str();
}

}  // namespace znt
