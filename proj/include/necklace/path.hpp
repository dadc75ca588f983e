#pragma once

#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "necklace/lincomb.hpp"
#include "necklace/quiver.hpp"

namespace necklace {

// A path in the double quiver, read left to right: consecutive arrows
// compose as t(a_i) = s(a_{i+1}). Either a constant path e_v or a nonempty
// arrow word.
struct Path {
  int vertex = -1;          // >= 0 exactly for constant paths
  std::vector<int> arrows;  // nonempty exactly for arrow words

  static Path constant(int v) { return Path{v, {}}; }
  static Path word(std::vector<int> a) { return Path{-1, std::move(a)}; }

  bool is_constant() const { return arrows.empty(); }
  int length() const { return static_cast<int>(arrows.size()); }
  int src(const DoubleQuiver& q) const {
    return is_constant() ? vertex : q.src(arrows.front());
  }
  int tgt(const DoubleQuiver& q) const {
    return is_constant() ? vertex : q.tgt(arrows.back());
  }

  auto operator<=>(const Path&) const = default;
};

using PathAlgebraElement = LinComb<Path>;
using PathTensorElement = LinComb<std::pair<Path, Path>>;

// validating constructor: throws InputError if consecutive arrows do not
// compose
Path make_path(const DoubleQuiver& q, const std::vector<int>& arrows);

// concatenation of two paths; nullopt when endpoints do not match
std::optional<Path> path_concat(const DoubleQuiver& q, const Path& p,
                                const Path& r);

// bilinear concatenation product; incomposable pairs vanish, constants act
// as local identities
PathAlgebraElement path_mul(const DoubleQuiver& q,
                            const PathAlgebraElement& p,
                            const PathAlgebraElement& r);

// The two double brackets, evaluated in closed form on path generators.
// sign '-': sum over letter pairs (a_i, b_j) with nonzero pairing of
//   (b_1..b_{j-1} <> a_{i+1}..a_m) (x) (a_1..a_{i-1} <> b_{j+1}..b_n),
//   where <> concatenates through the shared vertex and an empty-empty leg
//   is the constant path there.
// sign '+': (b_1..b_j a_i..a_m) (x) (a_1..a_i b_j..b_n).
// Constant inputs give 0.
PathTensorElement double_bracket(const DoubleQuiver& q, char sign,
                                 const Path& p, const Path& r);

// van den Bergh's triple bracket evaluated on arrow generators: the cyclic
// sum of the bracket applied to the left tensor leg. Vanishes identically
// for both signs; computing it is the verification.
LinComb<std::tuple<Path, Path, Path>> triple_bracket(const DoubleQuiver& q,
                                                     char sign, int a, int b,
                                                     int c);

}  // namespace necklace
