#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "necklace/diagram.hpp"
#include "necklace/lincomb.hpp"
#include "necklace/necklace.hpp"
#include "necklace/quiver.hpp"
#include "necklace/superalgebra.hpp"

namespace necklace {

// One slot of a flavored component: an arrow traversal step carrying a
// flavor bit per endpoint. dir 0 means the strand enters at the source end.
// mu sits at the source end and nu at the target end regardless of dir, so
// reversal flips dir and keeps the flavors in place. Canonical diagrams are
// stored with mu = 0 on every slot (the local flavor relations rewrite
// (1,1) to -(0,0) and (1,0) to +(0,1)). A slot is odd when mu + nu is odd.
struct FlavStep {
  int arrow = 0;
  int dir = 0;
  int mu = 0;
  int nu = 0;
  auto operator<=>(const FlavStep&) const = default;
};

struct FlavComponent {
  std::vector<FlavStep> steps;
  auto operator<=>(const FlavComponent&) const = default;
};

// Canonical flavored diagram: sorted components plus a sorted loop multiset.
// The weight (number of odd slots) is a superalgebra grading; the element
// parity is the weight mod 2.
struct FlavoredDiagram {
  std::vector<FlavComponent> comps;
  std::vector<int> loops;
  auto operator<=>(const FlavoredDiagram&) const = default;
  int slot_count() const;
  int weight() const;
  int parity() const { return weight() & 1; }
};

using FlavoredElement = LinComb<FlavoredDiagram>;

struct RawFlavSlot {
  int arrow = 0;
  int mu = 0;
  int nu = 0;
};

// Pre-canonical flavored diagram: slots in construction order (the order
// carries the Koszul sign), a perfect matching on endpoints, loops.
struct RawFlavored {
  std::vector<RawFlavSlot> slots;
  std::vector<std::pair<DiagEndpoint, DiagEndpoint>> arcs;
  std::vector<int> loops;
};

// Applies the per-slot flavor relations with their signs, then the graded
// slot-order canonicalization. The result is a single signed diagram or 0
// (when a slot symmetry of the diagram carries Koszul sign -1). Idempotent
// on its own output; preserves the weight.
FlavoredElement flavor_canonicalize(const DoubleQuiver& q,
                                    const RawFlavored& raw);

RawFlavored to_raw(const FlavoredDiagram& d);

std::string format_flavored(const DoubleQuiver& q, const FlavoredDiagram& d);
std::string format_flavored_element(const DoubleQuiver& q,
                                    const FlavoredElement& x);
FlavoredDiagram parse_flavored(const DoubleQuiver& q, std::string_view text);

FlavoredElement flavored_mul(const DoubleQuiver& q, const FlavoredElement& x,
                             const FlavoredElement& y);

// The odd trace. A nonconstant cyclic word maps to the sum over flavor
// assignments of its strand cycle (chain-constrained, one flavor flip);
// every image diagram has odd weight. Constants map to 0.
FlavoredElement otr(const DoubleQuiver& q, const CyclicWord& w);
// Superalgebra map on polynomials over the odd necklace generators
// (keys as printed by format_necklace): products of factors multiply.
FlavoredElement otr(const DoubleQuiver& q, const SuperPolynomial& x);

// Single flavor-flip insertion at one endpoint. slot indexes the canonical
// slot order (components concatenated), end 0 the source end. Flipping bit
// b carries sign (-1)^b, so the squared insertion is -identity.
FlavoredElement iota_insert(const DoubleQuiver& q, const FlavoredDiagram& d,
                            int slot, int end);

// The BV operators on the flavored algebra: for each slot pair weighted by
// the arrow pairing, contract ('-') or insert ('+') with the chord-decorated
// junction coefficients. Second order by construction (the pair sum), zero
// on diagrams with fewer than two slots.
FlavoredElement delta_tilde(const DoubleQuiver& q, char sign,
                            const FlavoredElement& x);

// Enumerates otr images of all square-free monomials over the odd necklace
// generators (total length <= bound, constants count 1): asserts the image
// vanishes exactly when a constant factor is present and that the remaining
// images are linearly independent.
AxiomReport check_otr_kernel(const DoubleQuiver& q, int bound);

// Asserts delta_tilde(sign) . otr = otr . necklace_bv(sign) over square-free
// monomials with <= max_factors factors of length <= max_len each.
AxiomReport check_otr_intertwine(const DoubleQuiver& q, char sign,
                                 int max_len, int max_factors);

}  // namespace necklace
