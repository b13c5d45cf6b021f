#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ordlam.hpp"
#include "words.hpp"

namespace znt {

class Tower;

// Element of a tower group.  Stored in a unique canonical form: either a
// reduced base word (level 1), or a pinch-free alternating form
// f_0 s^{e_0} f_1 ... s^{e_{k-1}} f_k over the stable letters of one level,
// where every f_j before a letter is the canonical representative of its
// right coset modulo the letter's source subgroup.  Equality is structural.
class Elem {
 public:
  struct Junction {
    int ext = 0;  // extension id within the tower
    int eps = 1;  // +1 or -1
    bool operator==(const Junction&) const = default;
  };

  struct Node {
    int level = 1;            // 1: base word; >1: s-form over letters of that level
    Word w;                   // level == 1
    std::vector<Elem> fac;    // level > 1; fac.size() == jnc.size() + 1
    std::vector<Junction> jnc;
    LexVec len;
  };

  Elem() = default;  // the identity
  bool is_eps() const { return !n_; }
  int level() const { return n_ ? n_->level : 1; }
  const Node& node() const { return *n_; }
  bool operator==(const Elem& o) const;

  static Elem word(const Tower& t, Word w);
  static Elem make(std::shared_ptr<const Node> n) {
    Elem e;
    e.n_ = std::move(n);
    return e;
  }
  const std::shared_ptr<const Node>& ptr() const { return n_; }

 private:
  std::shared_ptr<const Node> n_;
};

// Total structural order used for deterministic tie-breaking.
int cmp_elem(const Elem& a, const Elem& b);

// Validated abelian subgroup datum: a basis of commuting cyclically reduced
// elements of strictly increasing height, all powers of one primitive root.
struct SubgroupDatum {
  std::vector<Elem> gens;      // user basis, increasing heights
  Elem root;                   // primitive cyclically reduced root (degree 0)
  std::vector<int> degrees;    // canonical degrees: degrees[0] == 0, then the
                               // axis letters' degrees in increasing order
  std::vector<Elem> canon;     // canon[i] realizes root^(t^degrees[i])
};

struct Extension {
  enum Kind { kCentralizer, kHnn };
  Kind kind = kCentralizer;
  int id = 0;            // global index
  int level = 2;         // letter height; base group is level 1
  int index_in_level = 1;
  std::string name;      // "s<level>.<index>"
  SubgroupDatum A, B;    // for centralizer extensions B mirrors A
  std::vector<int> phi_sign;  // per canonical basis element, +1/-1
  // oriented ray roots of the letter's word: front ray ascends rootA, the
  // terminal ray ascends rootB' (sign of phi on the top generator folded in)
  Elem rayA;  // oriented root of the initial ray of s
  Elem rayB;  // oriented root of the terminal ray of s
};

// Group described as a chain of centralizer extensions and length-preserving
// separated HNN extensions over a free base group.  One Z^n coordinate per
// level; stable letters of level L have length unit(L-1).
class Tower {
 public:
  explicit Tower(const std::vector<std::string>& base_gens);

  // Levels are built in order; extensions added between begin/end may only
  // reference elements of strictly lower levels.
  void begin_level();
  // returns the new letter's name; throws DomainError listing every violated
  // admissibility condition
  std::string add_centralizer(const std::vector<Elem>& a_gens);
  std::string add_hnn(const std::vector<Elem>& a_gens, const std::vector<Elem>& b_gens);
  void end_level();
  void seal();  // forbids further levels

  int rank() const { return levels_ + 1; }
  int levels() const { return levels_; }
  const Alphabet& alphabet() const { return alpha_; }
  int base_rank() const { return alpha_.size(); }
  const std::vector<Extension>& extensions() const { return exts_; }
  const Extension& ext(int id) const { return exts_.at(id); }

  Elem eps() const { return Elem(); }
  Elem base_gen(int sym) const;
  Elem letter(int ext_id, int eps = 1) const;
  // "x" / "s2.1" lookup; returns generator elements
  Elem gen(const std::string& name) const;
  std::vector<Elem> generators() const;  // base gens then letters

 private:
  Alphabet alpha_;
  std::vector<Extension> exts_;
  int levels_ = 1;     // levels completed so far (level 1 = base)
  bool in_level_ = false;
  bool sealed_ = false;
  int pending_index_ = 0;

  SubgroupDatum validate_subgroup(const std::vector<Elem>& gens,
                                  std::vector<std::string>& bad) const;
  void check_ray_collisions(const Extension& e, std::vector<std::string>& bad) const;
  friend class ElemOps;
};

// ---- element operations ----

LexVec len(const Tower& t, const Elem& g);
int height_elem(const Tower& t, const Elem& g);
Elem mul(const Tower& t, const Elem& a, const Elem& b);
Elem inv(const Tower& t, const Elem& a);
Elem mulv(const Tower& t, const std::vector<Elem>& gs);
Elem pow_elem(const Tower& t, const Elem& g, const Int& k);
Elem conj(const Tower& t, const Elem& g, const Elem& c);  // c^-1 g c
bool commute(const Tower& t, const Elem& a, const Elem& b);

// c(f,g) = (|f| + |g| - |f^-1 g|)/2; throws if not integral (L4 violation)
LexVec gromov(const Tower& t, const Elem& f, const Elem& g);

// longest common initial segment; always an element (regularity)
Elem com_elements(const Tower& t, const Elem& a, const Elem& b);

bool is_cyc_reduced_elem(const Tower& t, const Elem& g);
// g = inv(c) * core * c, core cyclically reduced
void cyc_decompose_elem(const Tower& t, const Elem& g, Elem& c, Elem& core);

// ||g|| = max(0, |g^2| - |g|)
LexVec translation_len(const Tower& t, const Elem& g);

// primitive root: g == root^k with k maximal; g cyclically reduced, g != eps
Elem root_of(const Tower& t, const Elem& g, Int& k);

struct CentralizerBasis {
  Elem root;
  std::vector<Elem> gens;  // increasing height; gens[0] == root
};
CentralizerBasis centralizer(const Tower& t, const Elem& g);

// cyclic-permutation conjugacy test for cyclically reduced elements; nullopt
// means undecided within budget
std::optional<bool> conjugate_cyclic(const Tower& t, const Elem& a, const Elem& b,
                                     int axis_window = 8);

// letter of the underlying Z^n-word at position pos (1-based)
Letter letter_at(const Tower& t, const Elem& g, const LexVec& pos);

// normalize a raw alternating sequence of elements and letters
struct RawPiece {
  bool is_letter = false;
  Elem elem;    // when !is_letter
  int ext = 0;  // when is_letter
  int eps = 1;
};
Elem normalize_raw(const Tower& t, const std::vector<RawPiece>& pieces);

// does e start with the whole of p (|p^-1 e| == |e| - |p|)
bool starts_with(const Tower& t, const Elem& e, const Elem& p);

// longest prefix of e lying on the periodic ray (period)^inf; matched is that
// prefix as an element, whole == (matched == e)
struct RayMatch {
  Elem matched;
  bool whole = false;
};
RayMatch match_ray(const Tower& t, Elem e, const Elem& period, int level_cap);

// sampled length-axiom check (L1-L6); returns human-readable violations
struct AxiomReport {
  long pairs_checked = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};
AxiomReport check_length_axioms(const Tower& t, const std::vector<Elem>& pool,
                                long samples, unsigned long seed);

// random products over the generators, for sampling harnesses
std::vector<Elem> element_pool(const Tower& t, int max_syllables, long count,
                               unsigned long seed);

std::string elem_str(const Tower& t, const Elem& g);

}  // namespace znt
