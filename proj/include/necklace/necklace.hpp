#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "necklace/lincomb.hpp"
#include "necklace/quiver.hpp"

namespace necklace {

// A necklace: a closed path up to cyclic rotation. Either the constant
// necklace at a vertex or a nonempty closed arrow word stored in its
// lexicographically least rotation (under the ArrowId order).
struct CyclicWord {
  int vertex = -1;          // >= 0 exactly for constant necklaces
  std::vector<int> arrows;  // canonical rotation, nonempty for cycles

  static CyclicWord constant(int v) { return CyclicWord{v, {}}; }
  bool is_constant() const { return arrows.empty(); }
  int length() const { return static_cast<int>(arrows.size()); }

  auto operator<=>(const CyclicWord&) const = default;
};

using NecklaceElement = LinComb<CyclicWord>;
using NecklaceTensor = LinComb<std::pair<CyclicWord, CyclicWord>>;
// graded elements reuse the same canonical representatives; the sign and
// zero bookkeeping lives in graded_normalize and the _gr operations
using GradedNecklaceElement = NecklaceElement;
using GradedNecklaceTensor = NecklaceTensor;

// canonical rotation; throws InputError on a non-closed or non-composable
// sequence
CyclicWord cyclic_normalize(const DoubleQuiver& q,
                            const std::vector<int>& arrows);

// Signed canonical form: rotating a_1..a_n one step costs the Koszul sign
// (-1)^{|a_1||a_2..a_n|}. Returns sign * (least rotation), or 0 when some
// self-rotation accumulates -1.
GradedNecklaceElement graded_normalize(const DoubleQuiver& q,
                                       const std::vector<int>& arrows,
                                       const Rational& sign = Rational(1));

// sum of arrow parities mod 2 (constants are even)
int word_parity(const DoubleQuiver& q, const CyclicWord& w);

// necklace brackets; constants contribute zero
NecklaceElement br(const DoubleQuiver& q, char sign, const CyclicWord& x,
                   const CyclicWord& y);
NecklaceElement br(const DoubleQuiver& q, char sign,
                   const NecklaceElement& x, const NecklaceElement& y);

// necklace cobrackets with exact coefficient 1/2 over ordered index pairs
NecklaceTensor delta(const DoubleQuiver& q, char sign, const CyclicWord& x);
NecklaceTensor delta(const DoubleQuiver& q, char sign,
                     const NecklaceElement& x);

// graded bracket/cobracket with the symmetric pairing and Koszul exponents;
// inputs must be canonical nonzero graded representatives
GradedNecklaceElement br_gr(const DoubleQuiver& q, char sign,
                            const CyclicWord& x, const CyclicWord& y);
GradedNecklaceElement br_gr(const DoubleQuiver& q, char sign,
                            const GradedNecklaceElement& x,
                            const GradedNecklaceElement& y);
GradedNecklaceTensor delta_gr(const DoubleQuiver& q, char sign,
                              const CyclicWord& x);
GradedNecklaceTensor delta_gr(const DoubleQuiver& q, char sign,
                              const GradedNecklaceElement& x);

// printing: "[a a* b]", "[e(v)]"; elements as "1·[e(v)] + -2·[a a*]", "0"
std::string format_necklace(const DoubleQuiver& q, const CyclicWord& w);
// inverse of format_necklace; throws InputError on malformed literals
CyclicWord parse_necklace(const DoubleQuiver& q, std::string_view text);
std::string format_element(const DoubleQuiver& q, const NecklaceElement& e);
std::string format_tensor(const DoubleQuiver& q, const NecklaceTensor& t);

// all distinct necklaces of length <= max_len (constants count as length 1)
std::vector<CyclicWord> enumerate_necklaces(const DoubleQuiver& q,
                                            int max_len,
                                            bool include_constants = true);
// only the generators that survive graded_normalize
std::vector<CyclicWord> enumerate_graded_necklaces(
    const DoubleQuiver& q, int max_len, bool include_constants = true);

struct AxiomReport {
  bool ok = true;
  std::string axiom;           // name of the first failing axiom
  std::string counterexample;  // human-readable witness
};

using PairBracket =
    std::function<NecklaceElement(const CyclicWord&, const CyclicWord&)>;
using Cobracket = std::function<NecklaceTensor(const CyclicWord&)>;

PairBracket make_br(const DoubleQuiver& q, char sign);
Cobracket make_delta(const DoubleQuiver& q, char sign);
PairBracket make_br_gr(const DoubleQuiver& q, char sign);
Cobracket make_delta_gr(const DoubleQuiver& q, char sign);
// negative control: same double sum but with |pairing| (the sign dropped)
PairBracket make_corrupt_br(const DoubleQuiver& q, char sign);

// Checks antisymmetry, leg-antisymmetry of the cobracket, Jacobi, coJacobi,
// involutivity and the cocycle identity over the sample span. threads = 0
// picks hardware concurrency.
AxiomReport verify_ibl(const DoubleQuiver& q, const PairBracket& bracket,
                       const Cobracket& cobracket,
                       const std::vector<CyclicWord>& sample,
                       int threads = 0);

// The odd variant: Koszul-symmetric maps, signed cyclic symmetrizers, the
// parity-shifted cocycle identity.
AxiomReport verify_odd_ibl(const DoubleQuiver& q, const PairBracket& bracket,
                           const Cobracket& cobracket,
                           const std::vector<CyclicWord>& sample,
                           int threads = 0);

}  // namespace necklace
