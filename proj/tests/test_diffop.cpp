#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "necklace/diffop.hpp"
#include "necklace/error.hpp"

using namespace necklace;

namespace {

const GradedGenerator W{"w", 0};
const GradedGenerator X{"x", 1};
const GradedGenerator Y{"y", 1};
const GradedGenerator Z{"z", 0};

SuperPolynomial poly(std::vector<std::pair<SuperMonomial, int>> terms) {
  SuperPolynomial p;
  for (auto& [m, c] : terms) add_term(p, m, Rational(c));
  return p;
}

// First-order operator of odd parity. Kernel values are parity-homogeneous
// (|phi(m)| = |m| + 1), which the Leibniz-form oracle below relies on.
DiffOp odd_first_order() {
  DiffOp op;
  op.parity = 1;
  op.order_bound = 1;
  op.kernel_table[{}] = poly({{{X}, 1}});
  op.kernel_table[{W}] = poly({{{X}, 2}, {{Z, Y}, 1}});
  op.kernel_table[{X}] = poly({{{W}, 1}, {{}, 1}});
  op.kernel_table[{Y}] = poly({{{Z}, 3}});
  op.kernel_table[{Z}] = poly({{{Y}, 1}, {{X}, -1}});
  return op;
}

// Even counterpart with a different kernel.
DiffOp even_first_order() {
  DiffOp op;
  op.parity = 0;
  op.order_bound = 1;
  op.kernel_table[{}] = poly({{{}, 1}, {{W}, 1}});
  op.kernel_table[{W}] = poly({{{Z}, 1}});
  op.kernel_table[{X}] = poly({{{Y}, 1}});
  op.kernel_table[{Y}] = poly({{{X}, 1}, {{Y}, 2}});
  op.kernel_table[{Z}] = poly({{{}, 2}, {{W}, 1}});
  return op;
}

// Second-order operator whose kernel vanishes in degree <= 1.
DiffOp contraction_like() {
  DiffOp op;
  op.parity = 1;
  op.order_bound = 2;
  op.kernel_table[{W, X}] = poly({{{Y}, 1}});
  op.kernel_table[{W, Y}] = poly({{{X}, 2}});
  op.kernel_table[{X, Y}] = poly({{{}, 1}, {{W}, 1}});
  op.kernel_table[{X, Z}] = poly({{{Y}, -1}});
  op.kernel_table[{Y, Z}] = poly({{{X}, 1}});
  op.kernel_table[{W, Z}] = poly({{{X}, 1}, {{Y}, 1}});
  op.kernel_table[{W, W}] = poly({{{Z, X}, 1}});
  op.kernel_table[{Z, Z}] = poly({{{W, Y}, 1}});
  return op;
}

std::vector<SuperMonomial> small_monomials() {
  return enumerate_monomials({W, X, Y, Z}, 2);
}

bool is_zero(const SuperPolynomial& p) { return p.empty(); }

}  // namespace

TEST_CASE("extended binomials") {
  CHECK(binom_ext(4, 2) == 6);
  CHECK(binom_ext(2, 5) == 0);
  CHECK(binom_ext(5, 0) == 1);
  CHECK(binom_ext(0, 0) == 1);
  CHECK(binom_ext(-1, 0) == 1);
  CHECK(binom_ext(-1, 3) == -1);
  CHECK(binom_ext(-1, 4) == 1);
  CHECK(binom_ext(10, 5) == 252);
  CHECK_THROWS_AS(binom_ext(-2, 0), InputError);
  CHECK_THROWS_AS(binom_ext(3, -1), InputError);
}

TEST_CASE("first-order extension matches the Leibniz form") {
  for (const DiffOp& op : {odd_first_order(), even_first_order()}) {
    for (const GradedGenerator& g1 : {W, X, Y, Z}) {
      for (const GradedGenerator& g2 : {W, X, Y, Z}) {
        SuperPolynomial m = make_monomial({g1, g2});
        if (m.empty()) continue;  // odd square
        SuperPolynomial got = apply_diffop(op, m);

        SuperPolynomial f1 = gen_poly(g1), f2 = gen_poly(g2);
        SuperPolynomial want;
        add_scaled(want, super_mul(apply_diffop(op, SuperMonomial{g1}), f2),
                   Rational(1));
        add_scaled(want, super_mul(f1, apply_diffop(op, SuperMonomial{g2})),
                   Rational((op.parity && g1.parity) ? -1 : 1));
        add_scaled(want, super_mul(kernel_value(op, {}), super_mul(f1, f2)),
                   Rational(-1));
        CHECK(got == want);
      }
    }
  }
}

TEST_CASE("extension weights on longer monomials") {
  // Kernel phi(1) = 1, phi(g) = 0 extends to m -> (1 - deg m) m.
  DiffOp op;
  op.parity = 0;
  op.order_bound = 1;
  op.kernel_table[{}] = super_unit();

  SuperMonomial m{W, X, Y, Z};
  CHECK(apply_diffop(op, m) == poly({{m, -3}}));
  CHECK(apply_diffop(op, SuperMonomial{W, Z}) ==
        poly({{SuperMonomial{W, Z}, -1}}));
  CHECK(apply_diffop(op, SuperMonomial{}) == super_unit());

  DiffOp zero;
  zero.order_bound = 2;
  CHECK(is_zero(apply_diffop(zero, m)));
  CHECK(is_zero(apply_diffop(zero, SuperMonomial{})));
}

TEST_CASE("second-order extension sums over pairs") {
  DiffOp op = contraction_like();
  std::vector<GradedGenerator> gens{W, X, Y, Z};
  for (const GradedGenerator& g1 : gens) {
    for (const GradedGenerator& g2 : gens) {
      for (const GradedGenerator& g3 : gens) {
        SuperPolynomial m = make_monomial({g1, g2, g3});
        if (m.empty()) continue;
        const SuperMonomial& mono = m.begin()->first;
        SuperPolynomial want;
        for (int i = 0; i < 3; ++i) {
          for (int j = i + 1; j < 3; ++j) {
            KoszulSplit ks = koszul_extract(mono, {i, j});
            SuperPolynomial rest;
            add_term(rest, ks.rest, Rational(1));
            add_scaled(want, super_mul(kernel_value(op, ks.front), rest),
                       ks.sign);
          }
        }
        CHECK(apply_diffop(op, mono) == want);
      }
    }
  }
}

TEST_CASE("restriction of an extension returns the kernel") {
  for (const DiffOp& op : {odd_first_order(), contraction_like()}) {
    DiffOp back = restrict_evaluator(to_evaluator(op), op.parity,
                                     op.order_bound, {W, X, Y, Z});
    CHECK(back.order_bound == op.order_bound);
    CHECK(back.parity == op.parity);
    for (const SuperMonomial& m :
         enumerate_monomials({W, X, Y, Z}, op.order_bound)) {
      CHECK(kernel_value(back, m) == kernel_value(op, m));
    }
  }
}

TEST_CASE("order defect vanishes at the declared order") {
  auto mono_of = [](const SuperPolynomial& p) { return p.begin()->first; };

  DiffOp d1 = odd_first_order();
  DiffOpEvaluator e1 = to_evaluator(d1);
  for (const SuperMonomial& m1 : small_monomials())
    for (const SuperMonomial& m2 : small_monomials())
      CHECK(is_zero(order_defect(e1, 1, {m1, m2})));

  DiffOp d2 = contraction_like();
  DiffOpEvaluator e2 = to_evaluator(d2);
  for (const GradedGenerator& g1 : {W, X, Y, Z})
    for (const GradedGenerator& g2 : {W, X, Y, Z})
      for (const GradedGenerator& g3 : {W, X, Z})
        CHECK(is_zero(order_defect(
            e2, 2, {SuperMonomial{g1}, SuperMonomial{g2}, SuperMonomial{g3}})));
  CHECK(is_zero(order_defect(
      e2, 2,
      {mono_of(make_monomial({W, X})), SuperMonomial{Y}, SuperMonomial{Z}})));

  // Multiplication operators have order 0.
  DiffOp mul;
  mul.parity = 1;
  mul.order_bound = 0;
  mul.kernel_table[{}] = poly({{{Y}, 1}});
  DiffOpEvaluator em = to_evaluator(mul);
  for (const SuperMonomial& m : small_monomials())
    CHECK(is_zero(order_defect(em, 0, {m})));

  // Negative control: a genuine second-order operator fails at order 1.
  CHECK(order_defect(e2, 1, {SuperMonomial{X}, SuperMonomial{Y}}) ==
        poly({{{}, 1}, {{W}, 1}}));
  CHECK_THROWS_AS(order_defect(e2, 1, {SuperMonomial{X}}), InputError);
}

TEST_CASE("composition and commutator order bounds") {
  DiffOp d1 = odd_first_order();
  DiffOp d0 = even_first_order();
  DiffOpEvaluator comp = compose_diffops(to_evaluator(d1), to_evaluator(d0));
  DiffOpEvaluator comm =
      commutator(to_evaluator(d1), d1.parity, to_evaluator(d0), d0.parity);

  for (const GradedGenerator& g1 : {W, X, Y})
    for (const GradedGenerator& g2 : {X, Y, Z})
      for (const GradedGenerator& g3 : {W, Z}) {
        CHECK(is_zero(order_defect(
            comp, 2,
            {SuperMonomial{g1}, SuperMonomial{g2}, SuperMonomial{g3}})));
      }

  // The commutator of two first-order operators is again first order.
  for (const SuperMonomial& m1 : small_monomials())
    for (const SuperMonomial& m2 : small_monomials())
      CHECK(is_zero(order_defect(comm, 1, {m1, m2})));

  // Composing with the zero evaluator gives zero.
  DiffOpEvaluator zero = [](const SuperMonomial&) { return SuperPolynomial{}; };
  DiffOpEvaluator cz = compose_diffops(zero, to_evaluator(d1));
  CHECK(is_zero(cz(SuperMonomial{W, X})));
}

TEST_CASE("bracket associated to a second-order operator") {
  DiffOp op = contraction_like();
  // On generators the bracket reduces to the degree-two kernel entries.
  CHECK(associated_bracket(op, gen_poly(X), gen_poly(Y)) ==
        poly({{{}, 1}, {{W}, 1}}));
  CHECK(associated_bracket(op, gen_poly(W), gen_poly(X)) == poly({{{Y}, 1}}));
  // Unit in either slot gives zero.
  CHECK(is_zero(associated_bracket(op, super_unit(), gen_poly(X))));
  CHECK(is_zero(associated_bracket(op, gen_poly(Y), super_unit())));
}

static DoubleQuiver one_loop() {
  return parse_quiver("vertex v\narrow a: v -> v\n");
}

static DoubleQuiver two_loop() {
  return parse_quiver("vertex v\narrow a: v -> v\narrow b: v -> v\n");
}

namespace {

SuperMonomial nmono(const DoubleQuiver& q, std::vector<std::string> words) {
  std::vector<GradedGenerator> gens;
  for (const auto& s : words) gens.push_back(necklace_gen(q, parse_necklace(q, s)));
  SuperPolynomial p = make_monomial(gens);
  REQUIRE(p.size() == 1);
  REQUIRE(p.begin()->second == Rational(1));
  return p.begin()->first;
}

std::vector<SuperMonomial> necklace_monomials(const DoubleQuiver& q,
                                              int max_len, int max_deg,
                                              bool graded) {
  std::vector<GradedGenerator> gens;
  for (const CyclicWord& w : enumerate_necklaces(q, max_len)) {
    if (graded) {
      if (!w.is_constant() && graded_normalize(q, w.arrows).empty()) continue;
      gens.push_back(graded_necklace_gen(q, w));
    } else {
      gens.push_back(necklace_gen(q, w));
    }
  }
  return enumerate_monomials(gens, max_deg);
}

}  // namespace

TEST_CASE("necklace operator on small inputs") {
  auto q = one_loop();
  DiffOp dm = necklace_bv(q, '-');
  DiffOp dp = necklace_bv(q, '+');

  CHECK(is_zero(apply_diffop(dm, SuperMonomial{})));
  CHECK(is_zero(apply_diffop(dp, SuperMonomial{})));

  // Two disjoint loops pair into a vertex constant.
  SuperPolynomial pair_in = make_monomial(
      {necklace_gen(q, parse_necklace(q, "[a]")),
       necklace_gen(q, parse_necklace(q, "[a*]"))});
  CHECK(apply_diffop(dm, pair_in) ==
        poly({{nmono(q, {"[e(v)]"}), 2}}));

  // A single contractible loop has no self-pairing in the minus theory.
  CHECK(is_zero(apply_diffop(dm, nmono(q, {"[a a*]"}))));

  auto q2 = two_loop();
  DiffOp dm2 = necklace_bv(q2, '-');
  SuperPolynomial out = apply_diffop(dm2, nmono(q2, {"[a a* b b*]"}));
  SuperPolynomial want;
  add_scaled(want, poly({{nmono(q2, {"[a a*]", "[e(v)]"}), 1}}), Rational(1));
  add_scaled(want, poly({{nmono(q2, {"[b b*]", "[e(v)]"}), 1}}), Rational(1));
  CHECK(out == want);
}

TEST_CASE("necklace operator squares to zero") {
  struct Cfg {
    DoubleQuiver q;
    int max_len;
  };
  for (const Cfg& cfg : {Cfg{one_loop(), 3}, Cfg{two_loop(), 2}}) {
    for (char s : {'-', '+'}) {
      DiffOp op = necklace_bv(cfg.q, s);
      for (const SuperMonomial& m :
           necklace_monomials(cfg.q, cfg.max_len, 2, false)) {
        SuperPolynomial once = apply_diffop(op, m);
        CHECK(is_zero(apply_diffop(op, once)));
      }
    }
  }
}

TEST_CASE("necklace operator induces twice the bracket") {
  for (const DoubleQuiver& q : {one_loop(), two_loop()}) {
    for (char s : {'-', '+'}) {
      DiffOp op = necklace_bv(q, s);
      auto words = enumerate_necklaces(q, 2);
      for (const CyclicWord& wx : words) {
        for (const CyclicWord& wy : words) {
          SuperPolynomial want;
          for (const auto& [g, c] : br(q, s, wx, wy))
            add_term(want, SuperMonomial{necklace_gen(q, g)}, c * Rational(2));
          SuperPolynomial got = associated_bracket(
              op, gen_poly(necklace_gen(q, wx)), gen_poly(necklace_gen(q, wy)));
          CHECK(got == want);
        }
      }
    }
  }

  // The induced bracket is a derivation in each slot.
  auto q = one_loop();
  DiffOp op = necklace_bv(q, '-');
  auto g = [&](const char* s) { return gen_poly(necklace_gen(q, parse_necklace(q, s))); };
  SuperPolynomial x = g("[a]"), y = g("[a a*]"), z = g("[a*]");
  SuperPolynomial lhs = associated_bracket(op, x, super_mul(y, z));
  SuperPolynomial rhs;
  add_scaled(rhs, super_mul(associated_bracket(op, x, y), z), Rational(1));
  add_scaled(rhs, super_mul(y, associated_bracket(op, x, z)), Rational(1));
  CHECK(lhs == rhs);
}

TEST_CASE("graded necklace operator") {
  auto q = one_loop();
  DiffOp dm = graded_necklace_bv(q, '-');
  DiffOp dp = graded_necklace_bv(q, '+');

  CHECK(is_zero(apply_diffop(dm, SuperMonomial{})));
  CHECK(is_zero(apply_diffop(dp, SuperMonomial{})));

  // In the graded theory the contractible loop splits into two constants.
  GradedGenerator gaa = graded_necklace_gen(q, parse_necklace(q, "[a a*]"));
  GradedGenerator ge = graded_necklace_gen(q, parse_necklace(q, "[e(v)]"));
  CHECK(gaa.parity == 1);
  CHECK(ge.parity == 0);
  CHECK(apply_diffop(dm, SuperMonomial{gaa}) ==
        poly({{SuperMonomial{ge, ge}, 1}}));

  struct Cfg {
    DoubleQuiver q;
    int max_len;
  };
  for (const Cfg& cfg : {Cfg{one_loop(), 3}, Cfg{two_loop(), 2}}) {
    for (char s : {'-', '+'}) {
      DiffOp op = graded_necklace_bv(cfg.q, s);
      for (const SuperMonomial& m :
           necklace_monomials(cfg.q, cfg.max_len, 2, true)) {
        SuperPolynomial once = apply_diffop(op, m);
        CHECK(is_zero(apply_diffop(op, once)));
        // Parity shift: every term of the image is opposite to the input.
        for (const auto& [om, c] : once)
          CHECK(monomial_parity(om) == (monomial_parity(m) ^ 1));
      }
    }
  }
}

TEST_CASE("alternating binomial sums over set partitions") {
  // Exhaustive sweep: every size tuple and admissible marked subset.
  for (int k = 0; k <= 3; ++k) {
    std::vector<int> sizes(k + 1, 0);
    auto next = [&](std::vector<int>& v, int bound) {
      for (int i = 0; i < static_cast<int>(v.size()); ++i) {
        if (v[i] < bound) {
          ++v[i];
          return true;
        }
        v[i] = 0;
      }
      return false;
    };
    do {
      std::vector<int> j(k + 1, 0);
      do {
        long long total = 0;
        for (int i = 0; i <= k; ++i) total += j[i];
        bool ok = true;
        for (int i = 0; i <= k; ++i) ok = ok && j[i] <= sizes[i];
        if (!ok || total > k) continue;
        CHECK(appendixA_identity(k, sizes, j) == 0);
        CHECK(appendixA_identity_simple(k, sizes, j) == 0);
      } while (next(j, 2));
    } while (next(sizes, k <= 2 ? 3 : 2));
  }

  CHECK_THROWS_AS(appendixA_identity(1, {2, 1}, {2, 0}), InputError);
  CHECK_THROWS_AS(appendixA_identity(0, {1}, {2}), InputError);
  CHECK_THROWS_AS(appendixA_identity(1, {1}, {0}), InputError);
  CHECK_THROWS_AS(appendixA_identity(1, {1, 1}, {0}), InputError);
  CHECK_THROWS_AS(appendixA_identity_simple(2, {1, -1, 0}, {0, 0, 0}),
                  InputError);
}
