#pragma once

#include <compare>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "necklace/diffop.hpp"
#include "necklace/lincomb.hpp"
#include "necklace/necklace.hpp"
#include "necklace/quiver.hpp"
#include "necklace/superalgebra.hpp"

namespace necklace {

// Endpoint of a slot. end 0 is the source end of the arrow, end 1 the target
// end; the endpoint color is the corresponding vertex.
struct DiagEndpoint {
  int slot = 0;
  int end = 0;
  auto operator<=>(const DiagEndpoint&) const = default;
};

// A diagram before canonicalization: slots in construction order, a perfect
// matching on their endpoints, and free loops labeled by vertices. The slot
// order is meaningful in the graded theory (it carries the Koszul sign).
struct RawDiagram {
  std::vector<int> slots;  // arrow id per slot
  std::vector<std::pair<DiagEndpoint, DiagEndpoint>> arcs;
  std::vector<int> loops;  // vertex ids
};

// One closed component: the cyclic slot traversal as (arrow, dir) steps.
// dir 0 means the strand enters at the source end, dir 1 at the target end.
// Canonical form: lexicographically minimal over rotations and reversal.
struct DiagComponent {
  std::vector<std::pair<int, int>> steps;
  auto operator<=>(const DiagComponent&) const = default;
};

// Canonical diagram: sorted components plus a sorted loop multiset. Two
// diagrams are equal exactly when their canonical forms coincide.
struct Diagram {
  std::vector<DiagComponent> comps;
  std::vector<int> loops;
  auto operator<=>(const Diagram&) const = default;
  int slot_count() const;
};

using DiagramElement = LinComb<Diagram>;
using GradedDiagramElement = LinComb<Diagram>;

// Canonicalization. The graded variant also returns the Koszul sign relating
// the construction slot order to the canonical one; sign 0 means the diagram
// is the zero element (some slot symmetry acts by -1).
Diagram diag_canonicalize(const DoubleQuiver& q, const RawDiagram& raw);

struct GradedCanon {
  Diagram d;
  Rational sign;  // 0, 1 or -1
};
GradedCanon graded_canonicalize(const DoubleQuiver& q, const RawDiagram& raw);

// Expansion back to a raw diagram in canonical slot order.
RawDiagram to_raw(const Diagram& d);

std::string format_diagram(const DoubleQuiver& q, const Diagram& d);
std::string format_diagram_element(const DoubleQuiver& q,
                                   const DiagramElement& x);
Diagram parse_diagram(const DoubleQuiver& q, std::string_view text);

// Strand morphisms: the cup/cap/crossing calculus on colored strands.
// Points are numbered domain first, then codomain; match is an involution.
struct StrandMorphism {
  std::vector<int> dom, cod;  // vertex colors
  std::vector<int> match;
  std::map<int, int> loops;  // color -> count
  bool operator==(const StrandMorphism&) const = default;
};
StrandMorphism strand_id(const std::vector<int>& colors);
StrandMorphism strand_cup(int color);
StrandMorphism strand_cap(int color);
StrandMorphism strand_cross(int c1, int c2);
StrandMorphism strand_tensor(const StrandMorphism& f, const StrandMorphism& g);
// Vertical stacking: f followed by g (g's domain glued to f's codomain).
StrandMorphism strand_compose(const StrandMorphism& f,
                              const StrandMorphism& g);
// A closed morphism (empty boundary) is a diagram with loops only.
Diagram strand_to_diagram(const DoubleQuiver& q, const StrandMorphism& f);

// Trace maps. A product of necklaces becomes the disjoint union of one
// strand cycle per word and one loop per constant factor.
Diagram tr(const DoubleQuiver& q, const std::vector<CyclicWord>& factors);
DiagramElement tr(const DoubleQuiver& q, const NecklaceElement& x);
Diagram diagram_mul(const Diagram& d1, const Diagram& d2);

GradedDiagramElement tr_gr(const DoubleQuiver& q,
                           const std::vector<CyclicWord>& factors);
// x is a polynomial over graded necklace generators (keys as printed by
// format_necklace), e.g. the output of the graded necklace operators.
GradedDiagramElement tr_gr(const DoubleQuiver& q, const SuperPolynomial& x);

// Poisson brackets on plain diagrams: the Leibniz sum over slot pairs
// (p in d1, q in d2) weighted by the arrow pairing. sign '-' contracts
// (slot count drops by 2), sign '+' inserts (slot count grows by 2).
DiagramElement diag_bracket(const DoubleQuiver& q, char sign,
                            const Diagram& d1, const Diagram& d2);
DiagramElement diag_bracket(const DoubleQuiver& q, char sign,
                            const DiagramElement& d1,
                            const DiagramElement& d2);

// Conversions between graded diagrams and monomials over connected-diagram
// generators (keys as printed by format_diagram on one component or loop).
// Both directions carry Koszul signs; they are mutually inverse.
SuperPolynomial diagram_to_monomial(const DoubleQuiver& q, const Diagram& d);
GradedCanon monomial_to_diagram(const DoubleQuiver& q, const SuperMonomial& m);

// The graded BV operators on the diagram algebra: second-order extensions of
// the slot-pair contraction ('-') and insertion ('+') kernels.
DiffOp nabla(const DoubleQuiver& q, char sign);
GradedDiagramElement apply_diag_op(const DoubleQuiver& q, const DiffOp& op,
                                   const GradedDiagramElement& x);

// Basis sweeps used by the checkers and the acceptance suite: all products
// of necklaces (constants count as length 1) with total length <= bound.
// In the graded sweep, words that normalize to zero are dropped and odd
// factors appear at most once.
std::vector<std::vector<CyclicWord>> enumerate_products(const DoubleQuiver& q,
                                                        int bound, bool graded);

AxiomReport check_tr_injective(const DoubleQuiver& q, int bound);
AxiomReport check_trgr_injective(const DoubleQuiver& q, int bound);
// model: "plain-", "plain+", "graded-", "graded+".
AxiomReport check_intertwine(const DoubleQuiver& q, const std::string& model,
                             int max_len, int max_factors);
AxiomReport check_diag_jacobi(const DoubleQuiver& q, char sign, int max_len);
AxiomReport check_nabla_squared(const DoubleQuiver& q, char sign, int max_len,
                                int max_factors);

}  // namespace necklace
