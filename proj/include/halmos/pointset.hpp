#pragma once

#include <cstdint>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "halmos/algebra.hpp"
#include "halmos/config.hpp"
#include "halmos/errors.hpp"
#include "halmos/term.hpp"

namespace halmos {

/// Point index in the affine space over X: mixed radix, little-endian, the
/// first variable is the least significant digit.
inline std::uint64_t encode(const Point& p) {
  const std::uint64_t n = static_cast<std::uint64_t>(p.algebra->size());
  std::uint64_t index = 0;
  for (std::size_t k = p.values.size(); k-- > 0;) {
    index = index * n + static_cast<std::uint64_t>(p.values[k]);
  }
  return index;
}

inline Point decode(std::uint64_t index, const VariableSet& x, const FiniteAlgebra& h) {
  const std::uint64_t n = static_cast<std::uint64_t>(h.size());
  std::vector<int> values(static_cast<std::size_t>(x.size()));
  for (int k = 0; k < x.size(); ++k) {
    values[static_cast<std::size_t>(k)] = static_cast<int>(index % n);
    index /= n;
  }
  if (index != 0) throw MismatchError("point index out of range for the space");
  return Point(x, &h, std::move(values));
}

/// A subset of the affine space Hom(W(X), H), stored as a bit vector of
/// length |H|^|X|.  Construction checks the space budget; all operations
/// demand operands over the same space.
class PointSet {
 public:
  PointSet(VariableSet vars, const FiniteAlgebra* algebra)
      : vars_(std::move(vars)), algebra_(algebra) {
    if (!algebra_) throw MismatchError("point set without an algebra");
    size_ = checked_pow(static_cast<std::uint64_t>(algebra_->size()), vars_.size(),
                        "point space over " + std::to_string(vars_.size()) + " variables");
    words_.assign(static_cast<std::size_t>((size_ + 63) / 64), 0);
  }

  static PointSet empty(const VariableSet& vars, const FiniteAlgebra* algebra) {
    return PointSet(vars, algebra);
  }

  static PointSet full(const VariableSet& vars, const FiniteAlgebra* algebra) {
    PointSet s(vars, algebra);
    for (auto& w : s.words_) w = ~std::uint64_t{0};
    s.mask_tail();
    return s;
  }

  const VariableSet& variables() const { return vars_; }
  const FiniteAlgebra* algebra() const { return algebra_; }
  std::uint64_t space_size() const { return size_; }

  bool test(std::uint64_t index) const {
    check_index(index);
    return (words_[static_cast<std::size_t>(index / 64)] >> (index % 64)) & 1;
  }

  void set(std::uint64_t index, bool value = true) {
    check_index(index);
    const std::uint64_t bit = std::uint64_t{1} << (index % 64);
    if (value) {
      words_[static_cast<std::size_t>(index / 64)] |= bit;
    } else {
      words_[static_cast<std::size_t>(index / 64)] &= ~bit;
    }
  }

  bool contains(const Point& p) const { return test(encode(p)); }
  void add(const Point& p) { set(encode(p)); }

  std::uint64_t count() const {
    std::uint64_t c = 0;
    for (std::uint64_t w : words_) c += static_cast<std::uint64_t>(__builtin_popcountll(w));
    return c;
  }

  bool none() const {
    for (std::uint64_t w : words_) {
      if (w != 0) return false;
    }
    return true;
  }

  bool all() const { return count() == size_; }

  std::vector<std::uint64_t> members() const {
    std::vector<std::uint64_t> out;
    for (std::uint64_t i = 0; i < size_; ++i) {
      if (test(i)) out.push_back(i);
    }
    return out;
  }

  bool is_subset_of(const PointSet& other) const {
    check_space(other);
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (words_[i] & ~other.words_[i]) return false;
    }
    return true;
  }

  bool operator==(const PointSet& other) const {
    if (!(vars_ == other.vars_) || size_ != other.size_) return false;
    if (algebra_ != other.algebra_ && !same_algebra(*algebra_, *other.algebra_)) return false;
    return words_ == other.words_;
  }

  /// Header line "pointset <algebra> <x1> <x2> ...", then the bits as
  /// lowercase hex, little-endian by index: the first character carries
  /// indices 0..3 with index 0 in the least significant bit of its digit.
  std::string serialize() const {
    std::string out = "pointset " + algebra_->name();
    for (const auto& v : vars_.names()) {
      out += ' ';
      out += v;
    }
    out += '\n';
    const std::uint64_t digits = (size_ + 3) / 4;
    for (std::uint64_t d = 0; d < digits; ++d) {
      int value = 0;
      for (int b = 0; b < 4; ++b) {
        const std::uint64_t index = d * 4 + static_cast<std::uint64_t>(b);
        if (index < size_ && test(index)) value |= 1 << b;
      }
      out += "0123456789abcdef"[value];
    }
    out += '\n';
    return out;
  }

  void check_space(const PointSet& other) const {
    if (!(vars_ == other.vars_) ||
        (algebra_ != other.algebra_ && !same_algebra(*algebra_, *other.algebra_))) {
      throw MismatchError("point sets live over different spaces");
    }
  }

  friend PointSet meet(const PointSet& a, const PointSet& b) {
    a.check_space(b);
    PointSet r = a;
    for (std::size_t i = 0; i < r.words_.size(); ++i) r.words_[i] &= b.words_[i];
    return r;
  }

  friend PointSet join(const PointSet& a, const PointSet& b) {
    a.check_space(b);
    PointSet r = a;
    for (std::size_t i = 0; i < r.words_.size(); ++i) r.words_[i] |= b.words_[i];
    return r;
  }

  friend PointSet complement(const PointSet& a) {
    PointSet r = a;
    for (auto& w : r.words_) w = ~w;
    r.mask_tail();
    return r;
  }

 private:
  void check_index(std::uint64_t index) const {
    if (index >= size_) throw MismatchError("point index out of range for the space");
  }

  void mask_tail() {
    if (size_ % 64 != 0 && !words_.empty()) {
      words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
    }
  }

  VariableSet vars_;
  const FiniteAlgebra* algebra_;
  std::uint64_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// The quantifier operation along x: a point belongs to the result when
/// some point agreeing with it outside x belongs to A.  Implemented as an
/// or-fold of the n slices along the x coordinate.
inline PointSet exists_q(const PointSet& a, std::string_view x) {
  const int k = a.variables().index_of(x);
  if (k < 0) throw MismatchError("quantified variable " + std::string(x) + " outside the space");
  const std::uint64_t n = static_cast<std::uint64_t>(a.algebra()->size());
  std::uint64_t stride = 1;
  for (int i = 0; i < k; ++i) stride *= n;
  const std::uint64_t block = stride * n;

  PointSet r = PointSet::empty(a.variables(), a.algebra());
  for (std::uint64_t base = 0; base < a.space_size(); base += block) {
    for (std::uint64_t off = 0; off < stride; ++off) {
      bool any = false;
      for (std::uint64_t v = 0; v < n && !any; ++v) {
        any = a.test(base + off + v * stride);
      }
      if (any) {
        for (std::uint64_t v = 0; v < n; ++v) r.set(base + off + v * stride);
      }
    }
  }
  return r;
}

/// Dual quantifier: complement, exists, complement.
inline PointSet forall_q(const PointSet& a, std::string_view x) {
  return complement(exists_q(complement(a), x));
}

/// Parse the output of PointSet::serialize back, against a known space.
inline PointSet parse_pointset(std::istream& in, const VariableSet& x, const FiniteAlgebra& h) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("missing pointset header", 1);
  {
    std::istringstream hs(header);
    std::string word, alg;
    hs >> word >> alg;
    if (word != "pointset") throw ParseError("expected 'pointset' header", 1);
    if (alg != h.name()) throw ParseError("pointset belongs to algebra " + alg, 1);
    std::vector<std::string> vars;
    std::string v;
    while (hs >> v) vars.push_back(v);
    if (vars != x.names()) throw ParseError("pointset variable list disagrees", 1);
  }
  std::string bits;
  if (!std::getline(in, bits)) throw ParseError("missing pointset bits", 2);
  PointSet r(x, &h);
  const std::uint64_t digits = (r.space_size() + 3) / 4;
  if (bits.size() != digits) {
    throw ParseError("pointset needs " + std::to_string(digits) + " hex digits, found " +
                         std::to_string(bits.size()),
                     2);
  }
  for (std::uint64_t d = 0; d < digits; ++d) {
    const char c = bits[static_cast<std::size_t>(d)];
    int value;
    if (c >= '0' && c <= '9') {
      value = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      value = c - 'a' + 10;
    } else {
      throw ParseError(std::string("bad hex digit '") + c + "'", 2);
    }
    for (int b = 0; b < 4; ++b) {
      const std::uint64_t index = d * 4 + static_cast<std::uint64_t>(b);
      if (value & (1 << b)) {
        if (index >= r.space_size()) throw ParseError("bit set beyond the space", 2);
        r.set(index);
      }
    }
  }
  return r;
}

inline PointSet parse_pointset(const std::string& text, const VariableSet& x,
                               const FiniteAlgebra& h) {
  std::istringstream in(text);
  return parse_pointset(in, x, h);
}

}  // namespace halmos
