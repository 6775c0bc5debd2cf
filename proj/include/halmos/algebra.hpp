#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "halmos/config.hpp"
#include "halmos/errors.hpp"

namespace halmos {

struct Operation {
  std::string name;
  int arity = 0;

  bool operator==(const Operation& other) const = default;
};

/// An ordered list of operation symbols.  Order matters: two signatures are
/// interchangeable only if they list the same symbols in the same order.
class Signature {
 public:
  Signature() = default;

  explicit Signature(std::vector<Operation> ops) : ops_(std::move(ops)) {
    for (std::size_t i = 0; i < ops_.size(); ++i) {
      if (ops_[i].arity < 0) throw MismatchError("negative arity for operation " + ops_[i].name);
      for (std::size_t j = i + 1; j < ops_.size(); ++j) {
        if (ops_[i].name == ops_[j].name) {
          throw MismatchError("duplicate operation name " + ops_[i].name);
        }
      }
    }
  }

  const std::vector<Operation>& operations() const { return ops_; }
  std::size_t size() const { return ops_.size(); }
  const Operation& operation(int index) const { return ops_[static_cast<std::size_t>(index)]; }

  int index_of(std::string_view name) const {
    for (std::size_t i = 0; i < ops_.size(); ++i) {
      if (ops_[i].name == name) return static_cast<int>(i);
    }
    return -1;
  }

  bool operator==(const Signature& other) const = default;

 private:
  std::vector<Operation> ops_;
};

/// A finite algebra: a carrier of labeled elements plus one flat row-major
/// table per operation symbol.  For an operation of arity k over n elements
/// the table has n^k entries; the first argument is the most significant
/// index, so for a binary operation rows are first arguments.
class FiniteAlgebra {
 public:
  FiniteAlgebra(std::string name, Signature signature, std::vector<std::string> labels,
                std::vector<std::vector<int>> tables)
      : name_(std::move(name)),
        signature_(std::move(signature)),
        labels_(std::move(labels)),
        tables_(std::move(tables)) {
    const int n = static_cast<int>(labels_.size());
    if (n == 0) throw MismatchError("algebra " + name_ + " has an empty carrier");
    {
      std::set<std::string> seen;
      for (const auto& l : labels_) {
        if (!seen.insert(l).second) throw MismatchError("duplicate carrier label " + l);
      }
    }
    if (tables_.size() != signature_.size()) {
      throw MismatchError("algebra " + name_ + " has " + std::to_string(tables_.size()) +
                          " tables for " + std::to_string(signature_.size()) + " operations");
    }
    for (std::size_t op = 0; op < tables_.size(); ++op) {
      const std::uint64_t want =
          checked_pow(static_cast<std::uint64_t>(n), signature_.operation(static_cast<int>(op)).arity,
                      "table for " + signature_.operation(static_cast<int>(op)).name);
      if (tables_[op].size() != want) {
        throw MismatchError("table for " + signature_.operation(static_cast<int>(op)).name +
                            " has " + std::to_string(tables_[op].size()) + " entries, expected " +
                            std::to_string(want));
      }
      for (int v : tables_[op]) {
        if (v < 0 || v >= n) {
          throw MismatchError("table entry out of range in " +
                              signature_.operation(static_cast<int>(op)).name);
        }
      }
    }
  }

  const std::string& name() const { return name_; }
  const Signature& signature() const { return signature_; }
  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(int element) const { return labels_[static_cast<std::size_t>(element)]; }

  int label_index(std::string_view label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i] == label) return static_cast<int>(i);
    }
    return -1;
  }

  const std::vector<int>& table(int op_index) const {
    return tables_[static_cast<std::size_t>(op_index)];
  }

  int apply(int op_index, std::span<const int> args) const {
    const auto& op = signature_.operation(op_index);
    if (static_cast<int>(args.size()) != op.arity) {
      throw MismatchError("operation " + op.name + " expects " + std::to_string(op.arity) +
                          " arguments, got " + std::to_string(args.size()));
    }
    std::size_t index = 0;
    const std::size_t n = labels_.size();
    for (int a : args) index = index * n + static_cast<std::size_t>(a);
    return tables_[static_cast<std::size_t>(op_index)][index];
  }

 private:
  std::string name_;
  Signature signature_;
  std::vector<std::string> labels_;
  std::vector<std::vector<int>> tables_;
};

/// Structural identity: same signature, same labels, same tables.
/// The name is presentation, not identity.
inline bool same_algebra(const FiniteAlgebra& a, const FiniteAlgebra& b) {
  if (&a == &b) return true;
  if (!(a.signature() == b.signature())) return false;
  if (a.labels() != b.labels()) return false;
  for (std::size_t op = 0; op < a.signature().size(); ++op) {
    if (a.table(static_cast<int>(op)) != b.table(static_cast<int>(op))) return false;
  }
  return true;
}

/// A total map between carriers, stored as image indices.
struct ElementMap {
  const FiniteAlgebra* source = nullptr;
  const FiniteAlgebra* target = nullptr;
  std::vector<int> map;

  int operator()(int element) const { return map[static_cast<std::size_t>(element)]; }

  bool is_identity() const {
    if (source != target && !(source && target && same_algebra(*source, *target))) return false;
    for (std::size_t i = 0; i < map.size(); ++i) {
      if (map[i] != static_cast<int>(i)) return false;
    }
    return true;
  }

  bool operator==(const ElementMap& other) const {
    return source == other.source && target == other.target && map == other.map;
  }
};

inline bool is_bijective(const ElementMap& f) {
  if (!f.source || !f.target) return false;
  if (f.source->size() != f.target->size()) return false;
  std::vector<bool> hit(static_cast<std::size_t>(f.target->size()), false);
  for (int v : f.map) {
    if (v < 0 || v >= f.target->size() || hit[static_cast<std::size_t>(v)]) return false;
    hit[static_cast<std::size_t>(v)] = true;
  }
  return true;
}

namespace detail {

/// Walks every argument tuple of every operation, calling fn(op, args).
/// Returns false as soon as fn does.
template <typename Fn>
bool for_each_application(const Signature& sig, int carrier, Fn&& fn) {
  std::vector<int> args;
  for (std::size_t op = 0; op < sig.size(); ++op) {
    const int arity = sig.operation(static_cast<int>(op)).arity;
    args.assign(static_cast<std::size_t>(arity), 0);
    while (true) {
      if (!fn(static_cast<int>(op), std::span<const int>(args))) return false;
      int pos = arity - 1;
      while (pos >= 0 && ++args[static_cast<std::size_t>(pos)] == carrier) {
        args[static_cast<std::size_t>(pos)] = 0;
        --pos;
      }
      if (pos < 0) break;
    }
  }
  return true;
}

}  // namespace detail

/// Does f commute with every operation (constants included)?
inline bool is_homomorphism(const ElementMap& f) {
  if (!f.source || !f.target) throw MismatchError("element map without source or target");
  const FiniteAlgebra& src = *f.source;
  const FiniteAlgebra& dst = *f.target;
  if (!(src.signature() == dst.signature())) {
    throw MismatchError("signature mismatch between " + src.name() + " and " + dst.name());
  }
  if (static_cast<int>(f.map.size()) != src.size()) {
    throw MismatchError("element map size disagrees with carrier of " + src.name());
  }
  for (int v : f.map) {
    if (v < 0 || v >= dst.size()) throw MismatchError("element map image out of range");
  }
  std::vector<int> mapped;
  return detail::for_each_application(src.signature(), src.size(), [&](int op, std::span<const int> args) {
    mapped.assign(args.begin(), args.end());
    for (int& a : mapped) a = f.map[static_cast<std::size_t>(a)];
    return f.map[static_cast<std::size_t>(src.apply(op, args))] == dst.apply(op, mapped);
  });
}

namespace detail {

/// Backtracking search for structure-preserving maps src -> dst.  Images are
/// tried in ascending order from the lowest unassigned element, so results
/// come out in lexicographic order of the image tuple.  With `collect_all`
/// unset the search stops at the first hit.
struct MapSearch {
  const FiniteAlgebra& src;
  const FiniteAlgebra& dst;
  bool injective = false;
  bool collect_all = false;
  std::vector<std::vector<int>> found;

  bool consistent(const std::vector<int>& image) const {
    std::vector<int> mapped;
    return for_each_application(src.signature(), src.size(), [&](int op, std::span<const int> args) {
      mapped.clear();
      for (int a : args) {
        const int m = image[static_cast<std::size_t>(a)];
        if (m < 0) return true;  // tuple not fully assigned yet
        mapped.push_back(m);
      }
      const int result = image[static_cast<std::size_t>(src.apply(op, args))];
      if (result < 0) return true;
      return result == dst.apply(op, mapped);
    });
  }

  bool run(std::vector<int>& image, std::vector<bool>& used) {
    int next = -1;
    for (std::size_t i = 0; i < image.size(); ++i) {
      if (image[i] < 0) {
        next = static_cast<int>(i);
        break;
      }
    }
    if (next < 0) {
      found.push_back(image);
      return !collect_all;  // true = stop the search
    }
    for (int candidate = 0; candidate < dst.size(); ++candidate) {
      if (injective && used[static_cast<std::size_t>(candidate)]) continue;
      image[static_cast<std::size_t>(next)] = candidate;
      if (injective) used[static_cast<std::size_t>(candidate)] = true;
      if (consistent(image) && run(image, used)) return true;
      image[static_cast<std::size_t>(next)] = -1;
      if (injective) used[static_cast<std::size_t>(candidate)] = false;
    }
    return false;
  }
};

}  // namespace detail

/// All automorphisms, ordered lexicographically by image tuple.  The
/// identity is always first (any other automorphism must move some element
/// upward at its first difference from the identity).
inline std::vector<ElementMap> automorphisms(const FiniteAlgebra& h) {
  detail::MapSearch search{h, h, /*injective=*/true, /*collect_all=*/true};
  std::vector<int> image(static_cast<std::size_t>(h.size()), -1);
  std::vector<bool> used(static_cast<std::size_t>(h.size()), false);
  search.run(image, used);
  std::vector<ElementMap> result;
  result.reserve(search.found.size());
  for (auto& m : search.found) result.push_back(ElementMap{&h, &h, std::move(m)});
  return result;
}

/// Smallest subuniverse containing the seed; constants are always included.
/// Returned sorted ascending.
inline std::vector<int> generated_subalgebra(const FiniteAlgebra& h, const std::vector<int>& seed) {
  std::vector<bool> in(static_cast<std::size_t>(h.size()), false);
  std::vector<int> work;
  auto add = [&](int e) {
    if (e < 0 || e >= h.size()) throw MismatchError("seed element out of range");
    if (!in[static_cast<std::size_t>(e)]) {
      in[static_cast<std::size_t>(e)] = true;
      work.push_back(e);
    }
  };
  for (int e : seed) add(e);
  for (std::size_t op = 0; op < h.signature().size(); ++op) {
    if (h.signature().operation(static_cast<int>(op)).arity == 0) {
      add(h.table(static_cast<int>(op))[0]);
    }
  }
  // Worklist closure: whenever a new element arrives, try every application
  // that can now be formed.  Carrier is finite, so this terminates.
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<int> current;
    for (int e = 0; e < h.size(); ++e) {
      if (in[static_cast<std::size_t>(e)]) current.push_back(e);
    }
    if (current.empty()) break;
    for (std::size_t op = 0; op < h.signature().size(); ++op) {
      const int arity = h.signature().operation(static_cast<int>(op)).arity;
      if (arity == 0) continue;
      std::vector<std::size_t> pick(static_cast<std::size_t>(arity), 0);
      std::vector<int> args(static_cast<std::size_t>(arity));
      while (true) {
        for (int i = 0; i < arity; ++i) args[static_cast<std::size_t>(i)] = current[pick[static_cast<std::size_t>(i)]];
        const int r = h.apply(static_cast<int>(op), args);
        if (!in[static_cast<std::size_t>(r)]) {
          in[static_cast<std::size_t>(r)] = true;
          grew = true;
        }
        int pos = arity - 1;
        while (pos >= 0 && ++pick[static_cast<std::size_t>(pos)] == current.size()) {
          pick[static_cast<std::size_t>(pos)] = 0;
          --pos;
        }
        if (pos < 0) break;
      }
    }
  }
  std::vector<int> result;
  for (int e = 0; e < h.size(); ++e) {
    if (in[static_cast<std::size_t>(e)]) result.push_back(e);
  }
  return result;
}

/// H^k with componentwise operations.  The carrier lists k-tuples in
/// lexicographic order (first component most significant); a tuple's label
/// joins component labels with ':'.  Budget-checked before anything is
/// allocated.
inline FiniteAlgebra direct_power(const FiniteAlgebra& h, int k) {
  if (k < 1) throw MismatchError("direct power needs k >= 1");
  const std::uint64_t n = static_cast<std::uint64_t>(h.size());
  const std::uint64_t size = checked_pow(n, k, "carrier of " + h.name() + "^" + std::to_string(k));
  for (std::size_t op = 0; op < h.signature().size(); ++op) {
    checked_pow(size, h.signature().operation(static_cast<int>(op)).arity,
                "table for " + h.signature().operation(static_cast<int>(op)).name + " in " +
                    h.name() + "^" + std::to_string(k));
  }

  auto component = [&](std::uint64_t tuple, int pos) {
    // pos counts from the left (most significant first), matching label order
    for (int i = k - 1; i > pos; --i) tuple /= n;
    return static_cast<int>(tuple % n);
  };

  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(size));
  for (std::uint64_t t = 0; t < size; ++t) {
    std::string label;
    for (int pos = 0; pos < k; ++pos) {
      if (pos > 0) label += ':';
      label += h.label(component(t, pos));
    }
    labels.push_back(std::move(label));
  }

  std::vector<std::vector<int>> tables;
  std::vector<int> comp_args;
  for (std::size_t op = 0; op < h.signature().size(); ++op) {
    const int arity = h.signature().operation(static_cast<int>(op)).arity;
    std::uint64_t entries = 1;
    for (int i = 0; i < arity; ++i) entries *= size;
    std::vector<int> table(static_cast<std::size_t>(entries));
    std::vector<std::uint64_t> args(static_cast<std::size_t>(arity), 0);
    for (std::uint64_t cell = 0; cell < entries; ++cell) {
      std::uint64_t rest = cell;
      for (int i = arity - 1; i >= 0; --i) {
        args[static_cast<std::size_t>(i)] = rest % size;
        rest /= size;
      }
      std::uint64_t out = 0;
      for (int pos = 0; pos < k; ++pos) {
        comp_args.clear();
        for (int i = 0; i < arity; ++i) comp_args.push_back(component(args[static_cast<std::size_t>(i)], pos));
        out = out * n + static_cast<std::uint64_t>(h.apply(static_cast<int>(op), comp_args));
      }
      table[static_cast<std::size_t>(cell)] = static_cast<int>(out);
    }
    tables.push_back(std::move(table));
  }
  return FiniteAlgebra(h.name() + "^" + std::to_string(k), h.signature(), std::move(labels),
                       std::move(tables));
}

/// First isomorphism H1 -> H2 carrying the tuple a onto b pointwise, in
/// lexicographic image order; nullopt when none exists.  With empty tuples
/// this is a plain isomorphism search.
inline std::optional<ElementMap> find_pair_isomorphism(const FiniteAlgebra& h1,
                                                       std::span<const int> a,
                                                       const FiniteAlgebra& h2,
                                                       std::span<const int> b) {
  if (!(h1.signature() == h2.signature())) {
    throw MismatchError("signature mismatch between " + h1.name() + " and " + h2.name());
  }
  if (a.size() != b.size()) throw MismatchError("tuples of different length");
  if (h1.size() != h2.size()) return std::nullopt;

  std::vector<int> image(static_cast<std::size_t>(h1.size()), -1);
  std::vector<bool> used(static_cast<std::size_t>(h2.size()), false);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int from = a[i];
    const int to = b[i];
    if (from < 0 || from >= h1.size() || to < 0 || to >= h2.size()) {
      throw MismatchError("tuple element out of range");
    }
    int& slot = image[static_cast<std::size_t>(from)];
    if (slot >= 0) {
      if (slot != to) return std::nullopt;  // same source pinned to two targets
      continue;
    }
    if (used[static_cast<std::size_t>(to)]) return std::nullopt;  // not injective
    slot = to;
    used[static_cast<std::size_t>(to)] = true;
  }

  detail::MapSearch search{h1, h2, /*injective=*/true, /*collect_all=*/false};
  if (!search.consistent(image)) return std::nullopt;
  search.run(image, used);
  if (search.found.empty()) return std::nullopt;
  return ElementMap{&h1, &h2, std::move(search.found.front())};
}

/// First injective homomorphism sub -> target, or nullopt.
inline std::optional<ElementMap> find_embedding(const FiniteAlgebra& sub,
                                                const FiniteAlgebra& target) {
  if (!(sub.signature() == target.signature())) {
    throw MismatchError("signature mismatch between " + sub.name() + " and " + target.name());
  }
  if (sub.size() > target.size()) return std::nullopt;
  detail::MapSearch search{sub, target, /*injective=*/true, /*collect_all=*/false};
  std::vector<int> image(static_cast<std::size_t>(sub.size()), -1);
  std::vector<bool> used(static_cast<std::size_t>(target.size()), false);
  search.run(image, used);
  if (search.found.empty()) return std::nullopt;
  return ElementMap{&sub, &target, std::move(search.found.front())};
}

/// The subalgebra on a closed subset, reindexed to 0..m-1 (subset order is
/// kept).  Throws if the subset is not closed under the operations.
inline FiniteAlgebra restrict_to(const FiniteAlgebra& h, const std::vector<int>& subset) {
  std::vector<int> local(static_cast<std::size_t>(h.size()), -1);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    const int e = subset[i];
    if (e < 0 || e >= h.size()) throw MismatchError("subset element out of range");
    if (local[static_cast<std::size_t>(e)] >= 0) throw MismatchError("subset element repeated");
    local[static_cast<std::size_t>(e)] = static_cast<int>(i);
    labels.push_back(h.label(e));
  }
  const int m = static_cast<int>(subset.size());
  if (m == 0) throw MismatchError("cannot restrict to an empty subset");

  std::vector<std::vector<int>> tables;
  for (std::size_t op = 0; op < h.signature().size(); ++op) {
    const int arity = h.signature().operation(static_cast<int>(op)).arity;
    std::uint64_t entries = 1;
    for (int i = 0; i < arity; ++i) entries *= static_cast<std::uint64_t>(m);
    std::vector<int> table(static_cast<std::size_t>(entries));
    std::vector<int> args(static_cast<std::size_t>(arity));
    for (std::uint64_t cell = 0; cell < entries; ++cell) {
      std::uint64_t rest = cell;
      for (int i = arity - 1; i >= 0; --i) {
        args[static_cast<std::size_t>(i)] = subset[rest % static_cast<std::uint64_t>(m)];
        rest /= static_cast<std::uint64_t>(m);
      }
      const int r = h.apply(static_cast<int>(op), args);
      if (local[static_cast<std::size_t>(r)] < 0) {
        throw MismatchError("subset of " + h.name() + " is not closed under " +
                            h.signature().operation(static_cast<int>(op)).name);
      }
      table[static_cast<std::size_t>(cell)] = local[static_cast<std::size_t>(r)];
    }
    tables.push_back(std::move(table));
  }
  return FiniteAlgebra(h.name() + "[sub]", h.signature(), std::move(labels), std::move(tables));
}

}  // namespace halmos
