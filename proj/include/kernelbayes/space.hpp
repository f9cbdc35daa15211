#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kernelbayes/error.hpp"

namespace kb {

inline constexpr std::string_view kTop = "⊤";
inline constexpr std::string_view kBottom = "⊥";
inline constexpr std::string_view kUnitPoint = "•";

/// A finite set of labelled points with a σ-algebra given by its atoms.
///
/// Atoms form a partition of the points. Every measurable set is a union of
/// atoms, so all measures and kernels are indexed by atom rather than by point.
/// The object is an immutable handle; copies share the underlying data.
class MeasurableSpace {
 public:
  /// Builds a space from point labels and a partition given by label blocks.
  static MeasurableSpace make(std::vector<std::string> labels,
                              const std::vector<std::vector<std::string>>& blocks) {
    auto index = build_index(labels);
    std::vector<std::vector<std::size_t>> idx_blocks;
    idx_blocks.reserve(blocks.size());
    for (const auto& block : blocks) {
      std::vector<std::size_t> b;
      b.reserve(block.size());
      for (const auto& lbl : block) {
        auto it = index.find(lbl);
        if (it == index.end()) throw Error(Errc::UnknownPoint, "block refers to unknown point '" + lbl + "'");
        b.push_back(it->second);
      }
      idx_blocks.push_back(std::move(b));
    }
    return from_index_blocks(std::move(labels), std::move(idx_blocks));
  }

  static MeasurableSpace from_index_blocks(std::vector<std::string> labels,
                                           std::vector<std::vector<std::size_t>> blocks) {
    auto index = build_index(labels);
    const std::size_t n = labels.size();
    std::vector<std::size_t> atom_of(n, npos);
    for (std::size_t a = 0; a < blocks.size(); ++a) {
      auto& block = blocks[a];
      if (block.empty()) throw Error(Errc::EmptyBlock, "block " + std::to_string(a) + " is empty");
      std::sort(block.begin(), block.end());
      for (std::size_t p : block) {
        if (p >= n) throw Error(Errc::UnknownPoint, "point index " + std::to_string(p) + " out of range");
        if (atom_of[p] != npos)
          throw Error(Errc::OverlappingBlocks, "point '" + labels[p] + "' appears in more than one block");
        atom_of[p] = a;
      }
    }
    for (std::size_t p = 0; p < n; ++p)
      if (atom_of[p] == npos) throw Error(Errc::UncoveredPoint, "point '" + labels[p] + "' is in no block");

    auto data = std::make_shared<Data>();
    data->labels = std::move(labels);
    data->atoms = std::move(blocks);
    data->atom_of = std::move(atom_of);
    data->index = std::move(index);
    return MeasurableSpace(std::move(data));
  }

  /// Atoms of the σ-algebra generated by the given subsets: points are grouped
  /// by their membership pattern across all generators.
  static MeasurableSpace generated_by(std::vector<std::string> labels,
                                      const std::vector<std::vector<std::string>>& generators) {
    auto index = build_index(labels);
    std::vector<std::vector<bool>> signature(labels.size(), std::vector<bool>(generators.size(), false));
    for (std::size_t g = 0; g < generators.size(); ++g) {
      for (const auto& lbl : generators[g]) {
        auto it = index.find(lbl);
        if (it == index.end()) throw Error(Errc::UnknownPoint, "generator refers to unknown point '" + lbl + "'");
        signature[it->second][g] = true;
      }
    }
    std::vector<std::vector<std::size_t>> blocks;
    std::map<std::vector<bool>, std::size_t> seen;
    for (std::size_t p = 0; p < labels.size(); ++p) {
      auto [it, inserted] = seen.try_emplace(signature[p], blocks.size());
      if (inserted) blocks.emplace_back();
      blocks[it->second].push_back(p);
    }
    return from_index_blocks(std::move(labels), std::move(blocks));
  }

  static MeasurableSpace discrete(std::vector<std::string> labels) {
    std::vector<std::vector<std::size_t>> blocks(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) blocks[i] = {i};
    return from_index_blocks(std::move(labels), std::move(blocks));
  }

  static MeasurableSpace indiscrete(std::vector<std::string> labels) {
    std::vector<std::size_t> all(labels.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return from_index_blocks(std::move(labels), {std::move(all)});
  }

  std::size_t point_count() const { return d_->labels.size(); }
  std::size_t atom_count() const { return d_->atoms.size(); }

  const std::vector<std::string>& labels() const { return d_->labels; }
  const std::string& label(std::size_t point) const { return d_->labels.at(point); }
  const std::vector<std::vector<std::size_t>>& atoms() const { return d_->atoms; }
  std::span<const std::size_t> atom(std::size_t a) const { return d_->atoms.at(a); }
  std::size_t atom_of(std::size_t point) const { return d_->atom_of.at(point); }

  std::optional<std::size_t> find(std::string_view lbl) const {
    auto it = d_->index.find(std::string(lbl));
    if (it == d_->index.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(std::string_view lbl) const {
    auto p = find(lbl);
    if (!p) throw Error(Errc::UnknownPoint, "no point labelled '" + std::string(lbl) + "'");
    return *p;
  }

  /// Singleton atoms are named by their point; larger atoms as "{a,b,...}".
  std::string atom_label(std::size_t a) const {
    const auto& block = d_->atoms.at(a);
    if (block.size() == 1) return d_->labels[block.front()];
    std::string out = "{";
    for (std::size_t i = 0; i < block.size(); ++i) {
      if (i) out += ",";
      out += d_->labels[block[i]];
    }
    return out + "}";
  }

  std::optional<std::size_t> find_atom(std::string_view lbl) const {
    for (std::size_t a = 0; a < atom_count(); ++a)
      if (atom_label(a) == lbl) return a;
    return std::nullopt;
  }

  bool separates_points() const { return atom_count() == point_count(); }

  friend bool operator==(const MeasurableSpace& lhs, const MeasurableSpace& rhs) {
    if (lhs.d_ == rhs.d_) return true;
    return lhs.d_->labels == rhs.d_->labels && lhs.d_->atoms == rhs.d_->atoms;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  struct Data {
    std::vector<std::string> labels;
    std::vector<std::vector<std::size_t>> atoms;
    std::vector<std::size_t> atom_of;
    std::map<std::string, std::size_t, std::less<>> index;
  };

  explicit MeasurableSpace(std::shared_ptr<const Data> d) : d_(std::move(d)) {}

  static std::map<std::string, std::size_t, std::less<>> build_index(const std::vector<std::string>& labels) {
    if (labels.empty()) throw Error(Errc::ValidationError, "a space needs at least one point");
    std::map<std::string, std::size_t, std::less<>> index;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (!index.emplace(labels[i], i).second)
        throw Error(Errc::ValidationError, "duplicate point label '" + labels[i] + "'");
    return index;
  }

  std::shared_ptr<const Data> d_;
};

inline void require_same_space(const MeasurableSpace& a, const MeasurableSpace& b, std::string_view what) {
  if (!(a == b)) throw Error(Errc::SpaceMismatch, std::string(what));
}

/// The discrete two-point space 2 = {⊤, ⊥}; ⊤ is atom 0.
inline MeasurableSpace two_point() {
  static const MeasurableSpace two = MeasurableSpace::discrete({std::string(kTop), std::string(kBottom)});
  return two;
}

/// The canonical one-point terminal object.
inline MeasurableSpace terminal() {
  static const MeasurableSpace one = MeasurableSpace::discrete({std::string(kUnitPoint)});
  return one;
}

/// A union of atoms of a fixed space.
class MeasurableSet {
 public:
  static MeasurableSet empty(MeasurableSpace space) {
    return MeasurableSet(std::move(space), {});
  }

  static MeasurableSet full(MeasurableSpace space) {
    std::vector<bool> m(space.atom_count(), true);
    return MeasurableSet(std::move(space), std::move(m));
  }

  static MeasurableSet of_atoms(MeasurableSpace space, const std::vector<std::size_t>& atoms) {
    std::vector<bool> m(space.atom_count(), false);
    for (std::size_t a : atoms) {
      if (a >= m.size()) throw Error(Errc::ValidationError, "atom index " + std::to_string(a) + " out of range");
      m[a] = true;
    }
    return MeasurableSet(std::move(space), std::move(m));
  }

  /// Throws NotMeasurable unless the labelled points form a union of atoms.
  static MeasurableSet of_points(MeasurableSpace space, const std::vector<std::string>& labels) {
    std::vector<bool> point_in(space.point_count(), false);
    for (const auto& l : labels) point_in[space.index_of(l)] = true;
    std::vector<bool> m(space.atom_count(), false);
    for (std::size_t a = 0; a < space.atom_count(); ++a) {
      auto block = space.atom(a);
      bool any = false, all = true;
      for (std::size_t p : block) {
        any = any || point_in[p];
        all = all && point_in[p];
      }
      if (any && !all) throw Error(Errc::NotMeasurable, "set splits atom " + space.atom_label(a));
      m[a] = all;
    }
    return MeasurableSet(std::move(space), std::move(m));
  }

  const MeasurableSpace& space() const { return space_; }
  bool contains_atom(std::size_t a) const { return members_.at(a); }
  bool contains_point(std::size_t p) const { return members_.at(space_.atom_of(p)); }

  std::vector<std::size_t> atom_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t a = 0; a < members_.size(); ++a)
      if (members_[a]) out.push_back(a);
    return out;
  }

  MeasurableSet complement() const {
    std::vector<bool> m(members_.size());
    for (std::size_t a = 0; a < m.size(); ++a) m[a] = !members_[a];
    return MeasurableSet(space_, std::move(m));
  }

  friend MeasurableSet operator|(const MeasurableSet& l, const MeasurableSet& r) {
    require_same_space(l.space_, r.space_, "union of sets from different spaces");
    std::vector<bool> m(l.members_.size());
    for (std::size_t a = 0; a < m.size(); ++a) m[a] = l.members_[a] || r.members_[a];
    return MeasurableSet(l.space_, std::move(m));
  }

  friend MeasurableSet operator&(const MeasurableSet& l, const MeasurableSet& r) {
    require_same_space(l.space_, r.space_, "intersection of sets from different spaces");
    std::vector<bool> m(l.members_.size());
    for (std::size_t a = 0; a < m.size(); ++a) m[a] = l.members_[a] && r.members_[a];
    return MeasurableSet(l.space_, std::move(m));
  }

  friend bool operator==(const MeasurableSet& l, const MeasurableSet& r) {
    return l.space_ == r.space_ && l.members_ == r.members_;
  }

  /// Every measurable set of a space, as bitmasks over atoms (2^atoms of them).
  static std::vector<MeasurableSet> all_of(const MeasurableSpace& space) {
    const std::size_t k = space.atom_count();
    std::vector<MeasurableSet> out;
    out.reserve(std::size_t{1} << k);
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
      std::vector<bool> m(k);
      for (std::size_t a = 0; a < k; ++a) m[a] = (mask >> a) & 1U;
      out.push_back(MeasurableSet(space, std::move(m)));
    }
    return out;
  }

 private:
  MeasurableSet(MeasurableSpace space, std::vector<bool> members) : space_(std::move(space)), members_(std::move(members)) {
    members_.resize(space_.atom_count(), false);
  }

  MeasurableSpace space_;
  std::vector<bool> members_;
};

/// A candidate point map; not yet known to be measurable.
struct PointMap {
  MeasurableSpace domain;
  MeasurableSpace codomain;
  std::vector<std::size_t> image;  // point index -> point index
};

/// True iff the preimage of every codomain atom is a union of domain atoms,
/// i.e. each domain atom lands inside a single codomain atom.
inline bool is_measurable_function(const PointMap& f) {
  if (f.image.size() != f.domain.point_count())
    throw Error(Errc::ValidationError, "point map is not total on its domain");
  for (std::size_t p : f.image)
    if (p >= f.codomain.point_count()) throw Error(Errc::UnknownPoint, "point map leaves its codomain");
  for (const auto& block : f.domain.atoms()) {
    const std::size_t target = f.codomain.atom_of(f.image[block.front()]);
    for (std::size_t p : block)
      if (f.codomain.atom_of(f.image[p]) != target) return false;
  }
  return true;
}

class MeasurableFunction {
 public:
  static MeasurableFunction make(PointMap f) {
    if (!is_measurable_function(f)) throw Error(Errc::NotMeasurable, "point map splits a domain atom");
    return MeasurableFunction(std::move(f));
  }

  static MeasurableFunction from_labels(MeasurableSpace domain, MeasurableSpace codomain,
                                        const std::map<std::string, std::string>& assignment) {
    std::vector<std::size_t> image(domain.point_count());
    for (std::size_t p = 0; p < domain.point_count(); ++p) {
      auto it = assignment.find(domain.label(p));
      if (it == assignment.end()) throw Error(Errc::ValidationError, "no image for point '" + domain.label(p) + "'");
      image[p] = codomain.index_of(it->second);
    }
    return make({std::move(domain), std::move(codomain), std::move(image)});
  }

  static MeasurableFunction identity(const MeasurableSpace& space) {
    std::vector<std::size_t> image(space.point_count());
    for (std::size_t p = 0; p < image.size(); ++p) image[p] = p;
    return MeasurableFunction({space, space, std::move(image)});
  }

  /// Constant map; always measurable since every preimage is empty or everything.
  static MeasurableFunction constant(const MeasurableSpace& domain, const MeasurableSpace& codomain,
                                     std::size_t point) {
    if (point >= codomain.point_count()) throw Error(Errc::UnknownPoint, "constant value outside codomain");
    return MeasurableFunction({domain, codomain, std::vector<std::size_t>(domain.point_count(), point)});
  }

  const MeasurableSpace& domain() const { return f_.domain; }
  const MeasurableSpace& codomain() const { return f_.codomain; }
  const std::vector<std::size_t>& image() const { return f_.image; }
  std::size_t operator()(std::size_t point) const { return f_.image.at(point); }

  /// The codomain atom that a whole domain atom is sent into.
  std::size_t image_atom(std::size_t domain_atom) const {
    return f_.codomain.atom_of(f_.image[f_.domain.atom(domain_atom).front()]);
  }

  friend bool operator==(const MeasurableFunction& l, const MeasurableFunction& r) {
    return l.f_.domain == r.f_.domain && l.f_.codomain == r.f_.codomain && l.f_.image == r.f_.image;
  }

 private:
  explicit MeasurableFunction(PointMap f) : f_(std::move(f)) {}
  PointMap f_;
};

/// g ∘ f
inline MeasurableFunction compose(const MeasurableFunction& g, const MeasurableFunction& f) {
  require_same_space(f.codomain(), g.domain(), "compose: codomain of f is not the domain of g");
  std::vector<std::size_t> image(f.domain().point_count());
  for (std::size_t p = 0; p < image.size(); ++p) image[p] = g(f(p));
  return MeasurableFunction::make({f.domain(), g.codomain(), std::move(image)});
}

/// X × Y with the product σ-algebra. Point (i, j) has index i·|Y| + j and
/// atom (a, b) has index a·atoms(Y) + b.
class ProductSpace {
 public:
  ProductSpace(MeasurableSpace left, MeasurableSpace right)
      : left_(std::move(left)), right_(std::move(right)), space_(build(left_, right_)) {}

  const MeasurableSpace& left() const { return left_; }
  const MeasurableSpace& right() const { return right_; }
  const MeasurableSpace& space() const { return space_; }

  std::size_t point_index(std::size_t i, std::size_t j) const { return i * right_.point_count() + j; }
  std::size_t atom_index(std::size_t a, std::size_t b) const { return a * right_.atom_count() + b; }
  std::pair<std::size_t, std::size_t> split_atom(std::size_t k) const {
    return {k / right_.atom_count(), k % right_.atom_count()};
  }

  MeasurableFunction proj_left() const {
    std::vector<std::size_t> image(space_.point_count());
    for (std::size_t p = 0; p < image.size(); ++p) image[p] = p / right_.point_count();
    return MeasurableFunction::make({space_, left_, std::move(image)});
  }

  MeasurableFunction proj_right() const {
    std::vector<std::size_t> image(space_.point_count());
    for (std::size_t p = 0; p < image.size(); ++p) image[p] = p % right_.point_count();
    return MeasurableFunction::make({space_, right_, std::move(image)});
  }

  MeasurableSet rectangle(const MeasurableSet& a, const MeasurableSet& b) const {
    require_same_space(a.space(), left_, "rectangle: first side is not on the left factor");
    require_same_space(b.space(), right_, "rectangle: second side is not on the right factor");
    std::vector<std::size_t> atoms;
    for (std::size_t i : a.atom_indices())
      for (std::size_t j : b.atom_indices()) atoms.push_back(atom_index(i, j));
    return MeasurableSet::of_atoms(space_, atoms);
  }

 private:
  static MeasurableSpace build(const MeasurableSpace& x, const MeasurableSpace& y) {
    std::vector<std::string> labels;
    labels.reserve(x.point_count() * y.point_count());
    for (const auto& lx : x.labels())
      for (const auto& ly : y.labels()) labels.push_back("(" + lx + "," + ly + ")");
    std::vector<std::vector<std::size_t>> blocks;
    blocks.reserve(x.atom_count() * y.atom_count());
    for (const auto& bx : x.atoms())
      for (const auto& by : y.atoms()) {
        std::vector<std::size_t> block;
        for (std::size_t i : bx)
          for (std::size_t j : by) block.push_back(i * y.point_count() + j);
        blocks.push_back(std::move(block));
      }
    return MeasurableSpace::from_index_blocks(std::move(labels), std::move(blocks));
  }

  MeasurableSpace left_;
  MeasurableSpace right_;
  MeasurableSpace space_;
};

inline ProductSpace product(const MeasurableSpace& x, const MeasurableSpace& y) { return ProductSpace(x, y); }

}  // namespace kb
