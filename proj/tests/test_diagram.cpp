#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "necklace/diagram.hpp"
#include "necklace/diffop.hpp"
#include "necklace/error.hpp"
#include "necklace/necklace.hpp"
#include "necklace/quiver.hpp"

using namespace necklace;

namespace {

DoubleQuiver one_loop() {
  return parse_quiver(
      "vertex v\n"
      "arrow a: v -> v\n");
}

DoubleQuiver two_loop() {
  return parse_quiver(
      "vertex v\n"
      "arrow a: v -> v\n"
      "arrow b: v -> v\n");
}

DoubleQuiver a2() {
  return parse_quiver(
      "vertex 1\n"
      "vertex 2\n"
      "arrow a: 1 -> 2\n");
}

CyclicWord cw(const DoubleQuiver& q, const std::vector<std::string>& names) {
  std::vector<int> arrows;
  for (const auto& n : names) arrows.push_back(q.arrow(n));
  return cyclic_normalize(q, arrows);
}

Diagram trp(const DoubleQuiver& q, const std::vector<CyclicWord>& factors) {
  return tr(q, factors);
}

GradedDiagramElement trg(const DoubleQuiver& q,
                         const std::vector<CyclicWord>& factors) {
  return tr_gr(q, factors);
}

DiagramElement unit_el(const Diagram& d) {
  DiagramElement e;
  add_term(e, d, Rational(1));
  return e;
}

DiagramElement mul_el(const DiagramElement& x, const DiagramElement& y) {
  DiagramElement out;
  for (const auto& [a, ca] : x)
    for (const auto& [b, cb] : y) add_term(out, diagram_mul(a, b), ca * cb);
  return out;
}

// Test oracle: the graded class of a raw diagram vanishes exactly when some
// slot permutation preserving arrows and arcs has odd Koszul sign.
bool brute_zero(const DoubleQuiver& q, const RawDiagram& raw) {
  const int n = static_cast<int>(raw.slots.size());
  using Arc = std::pair<std::pair<int, int>, std::pair<int, int>>;
  auto arc_key = [](std::pair<int, int> a, std::pair<int, int> b) {
    return a < b ? Arc{a, b} : Arc{b, a};
  };
  std::set<Arc> arcs;
  for (const auto& [e1, e2] : raw.arcs)
    arcs.insert(arc_key({e1.slot, e1.end}, {e2.slot, e2.end}));
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  do {
    bool structural = true;
    for (int i = 0; i < n && structural; ++i)
      if (raw.slots[perm[i]] != raw.slots[i]) structural = false;
    if (structural) {
      std::set<Arc> image;
      for (const auto& [e1, e2] : raw.arcs)
        image.insert(
            arc_key({perm[e1.slot], e1.end}, {perm[e2.slot], e2.end}));
      structural = image == arcs;
    }
    if (structural) {
      int inv = 0;
      for (int i = 0; i < n; ++i) {
        if (!arrow_parity(q, raw.slots[i])) continue;
        for (int j = i + 1; j < n; ++j)
          if (arrow_parity(q, raw.slots[j]) && perm[i] > perm[j]) ++inv;
      }
      if (inv % 2) return true;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

// Builds the raw diagram of a product in the given factor order, one strand
// cycle per word, loops for constants.
RawDiagram raw_of_product(const std::vector<CyclicWord>& factors) {
  RawDiagram raw;
  for (const CyclicWord& w : factors) {
    if (w.is_constant()) {
      raw.loops.push_back(w.vertex);
      continue;
    }
    const int base = static_cast<int>(raw.slots.size());
    const int n = static_cast<int>(w.arrows.size());
    for (int a : w.arrows) raw.slots.push_back(a);
    for (int i = 0; i < n; ++i)
      raw.arcs.push_back({DiagEndpoint{base + i, 1},
                          DiagEndpoint{base + (i + 1) % n, 0}});
  }
  return raw;
}

}  // namespace

TEST_CASE("canonical form ignores construction order") {
  DoubleQuiver q = one_loop();
  int a = q.arrow("a"), as = q.arrow("a*");

  // the strand cycle of [a a*] built with slots in the opposite order
  RawDiagram raw;
  raw.slots = {as, a};
  raw.arcs = {{DiagEndpoint{1, 1}, DiagEndpoint{0, 0}},
              {DiagEndpoint{0, 1}, DiagEndpoint{1, 0}}};
  Diagram d = diag_canonicalize(q, raw);
  CHECK(d == tr(q, {cw(q, {"a", "a*"})}));
  CHECK(d.comps.size() == 1);
  CHECK(d.comps[0].steps ==
        std::vector<std::pair<int, int>>{{a, 0}, {as, 0}});

  // canonicalization is idempotent through to_raw
  CHECK(diag_canonicalize(q, to_raw(d)) == d);
  GradedCanon gc = graded_canonicalize(q, to_raw(d));
  CHECK(gc.d == d);
  CHECK(gc.sign == Rational(1));
}

TEST_CASE("canonicalization rejects malformed raw diagrams") {
  DoubleQuiver q = a2();
  int a = q.arrow("a");

  RawDiagram dangling;
  dangling.slots = {a};
  dangling.arcs = {};
  CHECK_THROWS_AS(diag_canonicalize(q, dangling), InputError);

  RawDiagram clash;  // src(a) = 1 but tgt(a) = 2
  clash.slots = {a, a};
  clash.arcs = {{DiagEndpoint{0, 0}, DiagEndpoint{1, 1}},
                {DiagEndpoint{0, 1}, DiagEndpoint{1, 0}}};
  CHECK_THROWS_AS(diag_canonicalize(q, clash), InputError);

  RawDiagram doubled;
  doubled.slots = {a, a};
  doubled.arcs = {{DiagEndpoint{0, 0}, DiagEndpoint{1, 0}},
                  {DiagEndpoint{0, 0}, DiagEndpoint{1, 0}},
                  {DiagEndpoint{0, 1}, DiagEndpoint{1, 1}}};
  CHECK_THROWS_AS(diag_canonicalize(q, doubled), InputError);

  RawDiagram bad_arrow;
  bad_arrow.slots = {99};
  CHECK_THROWS_AS(diag_canonicalize(q, bad_arrow), InputError);

  RawDiagram bad_loop;
  bad_loop.loops = {7};
  CHECK_THROWS_AS(diag_canonicalize(q, bad_loop), InputError);
}

TEST_CASE("diagram serialization round trips") {
  DoubleQuiver q = one_loop();
  Diagram d = trp(q, {cw(q, {"a", "a*"}), CyclicWord::constant(q.vertex("v"))});
  CHECK(format_diagram(q, d) == "comp(a>,a*>)+loop(v)");
  CHECK(parse_diagram(q, format_diagram(q, d)) == d);

  Diagram empty;
  CHECK(format_diagram(q, empty) == "1");
  CHECK(parse_diagram(q, "1") == empty);

  DiagramElement e;
  CHECK(format_diagram_element(q, e) == "0");
  add_term(e, d, Rational(-2));
  CHECK(format_diagram_element(q, e) == "-2·comp(a>,a*>)+loop(v)");

  CHECK_THROWS_AS(parse_diagram(q, "comp(a>"), InputError);
  CHECK_THROWS_AS(parse_diagram(q, "comp(a)"), InputError);
  CHECK_THROWS_AS(parse_diagram(q, "blob(a>)"), InputError);
}

TEST_CASE("strand calculus composes cups caps and crossings") {
  DoubleQuiver q = a2();
  int u = q.vertex("1"), v = q.vertex("2");

  // cap over cup closes into one loop
  StrandMorphism circle = strand_compose(strand_cup(v), strand_cap(v));
  CHECK(circle.dom.empty());
  CHECK(circle.cod.empty());
  CHECK(circle.loops == std::map<int, int>{{v, 1}});
  Diagram d = strand_to_diagram(q, circle);
  CHECK(d == tr(q, {CyclicWord::constant(v)}));

  // snake identity
  StrandMorphism lhs = strand_compose(
      strand_tensor(strand_id({u}), strand_cup(u)),
      strand_tensor(strand_cap(u), strand_id({u})));
  CHECK(lhs == strand_id({u}));

  // a crossing is an involution
  StrandMorphism twice =
      strand_compose(strand_cross(u, v), strand_cross(v, u));
  CHECK(twice == strand_id({u, v}));

  CHECK_THROWS_AS(strand_compose(strand_cup(u), strand_cap(v)), InputError);
  CHECK_THROWS_AS(strand_to_diagram(q, strand_cup(v)), InputError);
}

TEST_CASE("trace is multiplicative and respects linear combinations") {
  DoubleQuiver q = two_loop();
  std::vector<CyclicWord> words = enumerate_necklaces(q, 2);
  for (const CyclicWord& x : words) {
    for (const CyclicWord& y : words) {
      CHECK(trp(q, {x, y}) == diagram_mul(tr(q, {x}), tr(q, {y})));
    }
  }
  // unit maps to the empty diagram, distinct from every loop and cycle
  Diagram unit = trp(q, {});
  CHECK(unit == Diagram{});
  for (const CyclicWord& x : words) CHECK(tr(q, {x}) != unit);
}

TEST_CASE("plain bracket on one-loop generators") {
  DoubleQuiver q = one_loop();
  CyclicWord wa = cw(q, {"a"}), was = cw(q, {"a*"});
  Diagram da = tr(q, {wa}), das = tr(q, {was});
  Diagram loop_v = tr(q, {CyclicWord::constant(q.vertex("v"))});

  DiagramElement minus = diag_bracket(q, '-', da, das);
  CHECK(minus == unit_el(loop_v));
  DiagramElement minus_rev = diag_bracket(q, '-', das, da);
  CHECK(minus_rev == scaled(unit_el(loop_v), Rational(-1)));

  DiagramElement plus = diag_bracket(q, '+', da, das);
  CHECK(plus == unit_el(tr(q, {cw(q, {"a", "a", "a*", "a*"})})));

  // both brackets agree with the necklace brackets through tr
  for (char sign : {'-', '+'}) {
    CHECK(diag_bracket(q, sign, da, das) == tr(q, br(q, sign, wa, was)));
  }
}

TEST_CASE("bracket output slot counts drop or grow by two") {
  DoubleQuiver q = two_loop();
  std::vector<CyclicWord> words = enumerate_necklaces(q, 3, false);
  for (const CyclicWord& x : words) {
    for (const CyclicWord& y : words) {
      DiagramElement minus = diag_bracket(q, '-', tr(q, {x}), tr(q, {y}));
      for (const auto& [d, c] : minus)
        CHECK(d.slot_count() == x.length() + y.length() - 2);
      DiagramElement plus = diag_bracket(q, '+', tr(q, {x}), tr(q, {y}));
      for (const auto& [d, c] : plus)
        CHECK(d.slot_count() == x.length() + y.length() + 2);
    }
  }
}

TEST_CASE("plain bracket is antisymmetric and a biderivation") {
  DoubleQuiver q = one_loop();
  std::vector<CyclicWord> words = enumerate_necklaces(q, 2);
  for (char sign : {'-', '+'}) {
    for (const CyclicWord& x : words) {
      for (const CyclicWord& y : words) {
        DiagramElement sum = diag_bracket(q, sign, tr(q, {x}), tr(q, {y}));
        add_scaled(sum, diag_bracket(q, sign, tr(q, {y}), tr(q, {x})),
                   Rational(1));
        CHECK(sum.empty());
      }
    }
  }
  // {d1 d2, d3} = d1 {d2, d3} + {d1, d3} d2
  CyclicWord x = cw(q, {"a"}), y = cw(q, {"a*"}), z = cw(q, {"a", "a*"});
  for (char sign : {'-', '+'}) {
    DiagramElement lhs = diag_bracket(
        q, sign, unit_el(diagram_mul(tr(q, {x}), tr(q, {y}))),
        unit_el(tr(q, {z})));
    DiagramElement rhs = mul_el(
        unit_el(tr(q, {x})),
        diag_bracket(q, sign, unit_el(tr(q, {y})), unit_el(tr(q, {z}))));
    add_scaled(rhs,
               mul_el(diag_bracket(q, sign, unit_el(tr(q, {x})),
                                   unit_el(tr(q, {z}))),
                      unit_el(tr(q, {y}))),
               Rational(1));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("plain bracket satisfies Jacobi on small sweeps") {
  CHECK(check_diag_jacobi(one_loop(), '-', 2).ok);
  CHECK(check_diag_jacobi(one_loop(), '+', 2).ok);
}

TEST_CASE("plain bracket intertwines the necklace bracket") {
  for (const DoubleQuiver& q : {one_loop(), a2()}) {
    CHECK(check_intertwine(q, "plain-", 3, 0).ok);
    CHECK(check_intertwine(q, "plain+", 3, 0).ok);
  }
  CHECK(check_intertwine(two_loop(), "plain-", 2, 0).ok);
  CHECK(check_intertwine(two_loop(), "plain+", 2, 0).ok);
}

TEST_CASE("trace is injective on small product bases") {
  CHECK(check_tr_injective(one_loop(), 5).ok);
  CHECK(check_tr_injective(two_loop(), 3).ok);
  CHECK(check_tr_injective(a2(), 4).ok);
}

TEST_CASE("graded trace goldens") {
  DoubleQuiver q = one_loop();
  // constants stay even and nonzero
  GradedDiagramElement ev =
      trg(q, {CyclicWord::constant(0)});
  REQUIRE(ev.size() == 1);
  CHECK(ev.begin()->second == Rational(1));

  // an odd square dies: the reflection symmetry of [a* a*] is odd
  GradedDiagramElement dead = trg(q, {cw(q, {"a*", "a*"})});
  CHECK(dead.empty());
  // while the even counterpart survives
  CHECK(trg(q, {cw(q, {"a", "a"})}).size() == 1);

  // one odd slot: nonzero, and the component is registered as one strand
  GradedDiagramElement mixed = trg(q, {cw(q, {"a", "a*"})});
  REQUIRE(mixed.size() == 1);
  CHECK(mixed.begin()->first.comps.size() == 1);
  CHECK(mixed.begin()->second == Rational(1));
}

TEST_CASE("graded trace carries Koszul signs of the factor order") {
  DoubleQuiver q = two_loop();
  CyclicWord was = cw(q, {"a*"}), wbs = cw(q, {"b*"});
  GradedDiagramElement fwd = trg(q, {was, wbs});
  GradedDiagramElement rev = trg(q, {wbs, was});
  REQUIRE(fwd.size() == 1);
  REQUIRE(rev.size() == 1);
  CHECK(fwd.begin()->first == rev.begin()->first);
  CHECK(fwd.begin()->second == -rev.begin()->second);

  // odd repeated factor vanishes
  CHECK(trg(q, {was, was}).empty());
}

TEST_CASE("graded zero detection agrees with the permutation oracle") {
  for (const DoubleQuiver& q : {one_loop(), two_loop()}) {
    int bound = q.num_arrows() == 2 ? 4 : 3;
    for (const auto& prod : enumerate_products(q, bound, false)) {
      RawDiagram raw = raw_of_product(prod);
      if (static_cast<int>(raw.slots.size()) > 6) continue;
      CAPTURE(format_diagram(q, diag_canonicalize(q, raw)));
      CHECK(graded_canonicalize(q, raw).sign.is_zero() == brute_zero(q, raw));
    }
  }

  // mixed-direction components: the even reflection survives, the odd dies
  DoubleQuiver q = one_loop();
  int a = q.arrow("a"), as = q.arrow("a*");
  RawDiagram even_refl;
  even_refl.slots = {a, a};
  even_refl.arcs = {{DiagEndpoint{0, 1}, DiagEndpoint{1, 1}},
                    {DiagEndpoint{0, 0}, DiagEndpoint{1, 0}}};
  CHECK(!graded_canonicalize(q, even_refl).sign.is_zero());
  CHECK(!brute_zero(q, even_refl));

  RawDiagram odd_refl;
  odd_refl.slots = {as, as};
  odd_refl.arcs = {{DiagEndpoint{0, 1}, DiagEndpoint{1, 1}},
                   {DiagEndpoint{0, 0}, DiagEndpoint{1, 0}}};
  CHECK(graded_canonicalize(q, odd_refl).sign.is_zero());
  CHECK(brute_zero(q, odd_refl));
}

TEST_CASE("graded trace is injective on small product bases") {
  CHECK(check_trgr_injective(one_loop(), 5).ok);
  CHECK(check_trgr_injective(two_loop(), 3).ok);
}

TEST_CASE("diagram and monomial pictures convert back and forth") {
  for (const DoubleQuiver& q : {one_loop(), two_loop()}) {
    for (const auto& prod : enumerate_products(q, 4, true)) {
      GradedDiagramElement el = tr_gr(q, prod);
      if (el.empty()) continue;
      const Diagram& d = el.begin()->first;
      SuperPolynomial p = diagram_to_monomial(q, d);
      REQUIRE(p.size() == 1);
      GradedCanon back = monomial_to_diagram(q, p.begin()->first);
      CHECK(back.d == d);
      CHECK(back.sign * p.begin()->second == Rational(1));
    }
  }
}

TEST_CASE("graded operator goldens on the one-loop quiver") {
  DoubleQuiver q = one_loop();
  Diagram loop_v = tr(q, {CyclicWord::constant(0)});

  // contraction of the mixed 2-cycle: both slot pairs contract to two loops
  GradedDiagramElement x = trg(q, {cw(q, {"a", "a*"})});
  GradedDiagramElement got = apply_diag_op(q, nabla(q, '-'), x);
  GradedDiagramElement want;
  add_term(want, diagram_mul(loop_v, loop_v), Rational(1));
  CHECK(got == want);

  // the insertion images of the two ordered pairs are equal odd components
  // and cancel
  CHECK(apply_diag_op(q, nabla(q, '+'), x).empty());

  // cross contraction of two single-slot strands closes one loop
  GradedDiagramElement prod = trg(q, {cw(q, {"a"}), cw(q, {"a*"})});
  GradedDiagramElement got2 = apply_diag_op(q, nabla(q, '-'), prod);
  GradedDiagramElement want2;
  add_term(want2, loop_v, Rational(1));
  CHECK(got2 == want2);

  // units and pure loops are annihilated
  CHECK(apply_diag_op(q, nabla(q, '-'), GradedDiagramElement{}).empty());
  GradedDiagramElement just_loop;
  add_term(just_loop, loop_v, Rational(1));
  CHECK(apply_diag_op(q, nabla(q, '-'), just_loop).empty());
  CHECK(apply_diag_op(q, nabla(q, '+'), just_loop).empty());
}

TEST_CASE("graded operators shift slot count and parity") {
  DoubleQuiver q = two_loop();
  for (char sign : {'-', '+'}) {
    DiffOp op = nabla(q, sign);
    for (const auto& prod : enumerate_products(q, 3, true)) {
      GradedDiagramElement x = tr_gr(q, prod);
      if (x.empty()) continue;
      int n = x.begin()->first.slot_count();
      int par = 0;
      for (const auto& c : x.begin()->first.comps)
        for (const auto& [arr, dir] : c.steps) par ^= arrow_parity(q, arr);
      for (const auto& [d, c] : apply_diag_op(q, op, x)) {
        CHECK(d.slot_count() == n + (sign == '-' ? -2 : 2));
        int par2 = 0;
        for (const auto& cc : d.comps)
          for (const auto& [arr, dir] : cc.steps)
            par2 ^= arrow_parity(q, arr);
        CHECK(par2 == (par ^ 1));
      }
    }
  }
}

TEST_CASE("graded operators square to zero") {
  CHECK(check_nabla_squared(one_loop(), '-', 3, 2).ok);
  CHECK(check_nabla_squared(one_loop(), '+', 3, 2).ok);
  CHECK(check_nabla_squared(two_loop(), '-', 2, 2).ok);
  CHECK(check_nabla_squared(two_loop(), '+', 2, 2).ok);
}

TEST_CASE("graded operators intertwine the necklace operators") {
  CHECK(check_intertwine(one_loop(), "graded-", 3, 2).ok);
  CHECK(check_intertwine(one_loop(), "graded+", 3, 2).ok);
  CHECK(check_intertwine(two_loop(), "graded-", 2, 2).ok);
  CHECK(check_intertwine(two_loop(), "graded+", 2, 2).ok);
  CHECK_THROWS_AS(check_intertwine(one_loop(), "sideways", 2, 2), InputError);
}
