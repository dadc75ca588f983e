#include "necklace/diffop.hpp"

#include <algorithm>

#include "necklace/error.hpp"

namespace necklace {

SuperPolynomial kernel_value(const DiffOp& op, const SuperMonomial& m) {
  auto it = op.kernel_table.find(m);
  if (it != op.kernel_table.end()) return it->second;
  if (op.kernel_ext) return op.kernel_ext(m);
  return {};
}

long long binom_ext(long long alpha, long long beta) {
  if (alpha < -1) throw InputError("binom_ext: alpha < -1");
  if (beta < 0) throw InputError("binom_ext: beta < 0");
  if (alpha == -1) return (beta % 2) ? -1 : 1;
  if (beta > alpha) return 0;
  beta = std::min(beta, alpha - beta);
  long long r = 1;
  for (long long i = 1; i <= beta; ++i) r = r * (alpha - beta + i) / i;
  return r;
}

SuperPolynomial apply_diffop(const DiffOp& op, const SuperMonomial& m) {
  const int N = static_cast<int>(m.size());
  const int k = op.order_bound;
  if (N <= k) return kernel_value(op, m);

  SuperPolynomial out;
  std::vector<int> I;
  auto contribute = [&]() {
    const long long bc =
        binom_ext(N - static_cast<long long>(I.size()) - 1, N - k - 1);
    if (bc == 0) return;
    KoszulSplit ks = koszul_extract(m, I);
    SuperPolynomial phi = kernel_value(op, ks.front);
    if (phi.empty()) return;
    Rational coeff = ks.sign * Rational(bc);
    if ((k + I.size()) % 2) coeff = -coeff;
    SuperPolynomial rest;
    add_term(rest, ks.rest, Rational(1));
    add_scaled(out, super_mul(phi, rest), coeff);
  };
  std::function<void(int)> rec = [&](int start) {
    contribute();
    if (static_cast<int>(I.size()) == k) return;
    for (int i = start; i < N; ++i) {
      I.push_back(i);
      rec(i + 1);
      I.pop_back();
    }
  };
  rec(0);
  return out;
}

SuperPolynomial apply_diffop(const DiffOp& op, const SuperPolynomial& p) {
  SuperPolynomial out;
  for (const auto& [m, c] : p) add_scaled(out, apply_diffop(op, m), c);
  return out;
}

DiffOpEvaluator to_evaluator(const DiffOp& op) {
  return [op](const SuperMonomial& m) { return apply_diffop(op, m); };
}

SuperPolynomial order_defect(const DiffOpEvaluator& d, int k,
                             const std::vector<SuperMonomial>& tuple) {
  const int n = static_cast<int>(tuple.size());
  if (n != k + 1) throw InputError("order_defect needs a (k+1)-tuple");
  std::vector<int> par(n);
  for (int i = 0; i < n; ++i) par[i] = monomial_parity(tuple[i]);

  SuperPolynomial out;
  for (int mask = 0; mask < (1 << n); ++mask) {
    int flips = 0, odd_behind = 0, bits = 0;
    SuperPolynomial prod_in = super_unit(), prod_out = super_unit();
    for (int i = 0; i < n; ++i) {
      SuperPolynomial fac;
      add_term(fac, tuple[i], Rational(1));
      if (mask & (1 << i)) {
        ++bits;
        if (par[i] && (odd_behind % 2)) flips ^= 1;
        prod_in = super_mul(prod_in, fac);
      } else {
        odd_behind += par[i];
        prod_out = super_mul(prod_out, fac);
      }
    }
    SuperPolynomial dval;
    for (const auto& [m, c] : prod_in) add_scaled(dval, d(m), c);
    Rational coeff((bits + flips) % 2 ? -1 : 1);
    add_scaled(out, super_mul(dval, prod_out), coeff);
  }
  return out;
}

DiffOpEvaluator compose_diffops(const DiffOpEvaluator& a,
                                const DiffOpEvaluator& b) {
  return [a, b](const SuperMonomial& m) {
    SuperPolynomial out;
    for (const auto& [mm, c] : b(m)) add_scaled(out, a(mm), c);
    return out;
  };
}

DiffOpEvaluator commutator(const DiffOpEvaluator& a, int pa,
                           const DiffOpEvaluator& b, int pb) {
  DiffOpEvaluator ab = compose_diffops(a, b), ba = compose_diffops(b, a);
  Rational s((pa & pb & 1) ? 1 : -1);
  return [ab, ba, s](const SuperMonomial& m) {
    SuperPolynomial out = ab(m);
    add_scaled(out, ba(m), s);
    return out;
  };
}

DiffOp restrict_evaluator(const DiffOpEvaluator& d, int parity, int k,
                          const std::vector<GradedGenerator>& gens) {
  DiffOp op;
  op.parity = parity;
  op.order_bound = k;
  for (const SuperMonomial& m : enumerate_monomials(gens, k)) {
    SuperPolynomial v = d(m);
    if (!v.empty()) op.kernel_table.emplace(m, std::move(v));
  }
  return op;
}

SuperPolynomial associated_bracket(const DiffOp& bv, const SuperPolynomial& p,
                                   const SuperPolynomial& q) {
  SuperPolynomial out;
  for (const auto& [mp, cp] : p) {
    SuperPolynomial pp = apply_diffop(bv, mp);
    const Rational mid(monomial_parity(mp) ? -1 : 1);
    for (const auto& [mq, cq] : q) {
      const Rational c = cp * cq;
      SuperPolynomial fp, fq;
      add_term(fp, mp, Rational(1));
      add_term(fq, mq, Rational(1));
      add_scaled(out, apply_diffop(bv, super_mul(fp, fq)), c);
      add_scaled(out, super_mul(pp, fq), -c);
      add_scaled(out, super_mul(fp, apply_diffop(bv, mq)), -mid * c);
    }
  }
  return out;
}

GradedGenerator necklace_gen(const DoubleQuiver& q, const CyclicWord& w) {
  return GradedGenerator{format_necklace(q, w), 1};
}

GradedGenerator graded_necklace_gen(const DoubleQuiver& q,
                                    const CyclicWord& w) {
  return GradedGenerator{format_necklace(q, w), word_parity(q, w)};
}

DiffOp necklace_bv(const DoubleQuiver& q, char sign) {
  DiffOp op;
  op.parity = 1;
  op.order_bound = 2;
  DoubleQuiver qq = q;
  op.kernel_ext = [qq, sign](const SuperMonomial& m) -> SuperPolynomial {
    if (m.empty()) return {};
    auto mdelta = [&](const CyclicWord& w) {
      SuperPolynomial out;
      for (const auto& [legs, c] : delta(qq, sign, w))
        add_scaled(out,
                   make_monomial({necklace_gen(qq, legs.first),
                                  necklace_gen(qq, legs.second)}),
                   c);
      return out;
    };
    const CyclicWord w1 = parse_necklace(qq, m[0].key);
    if (m.size() == 1) return scaled(mdelta(w1), Rational(-1));
    const CyclicWord w2 = parse_necklace(qq, m[1].key);
    // true restriction: 2 br(x1,x2) - m(delta x1) x2 + m(delta x2) x1
    SuperPolynomial out;
    for (const auto& [g, c] : br(qq, sign, w1, w2))
      add_term(out, SuperMonomial{necklace_gen(qq, g)}, c * Rational(2));
    add_scaled(out, super_mul(mdelta(w1), gen_poly(m[1])), Rational(-1));
    add_scaled(out, super_mul(mdelta(w2), gen_poly(m[0])), Rational(1));
    return out;
  };
  return op;
}

DiffOp graded_necklace_bv(const DoubleQuiver& q, char sign) {
  DiffOp op;
  op.parity = 1;
  op.order_bound = 2;
  DoubleQuiver qq = q;
  op.kernel_ext = [qq, sign](const SuperMonomial& m) -> SuperPolynomial {
    if (m.empty()) return {};
    auto mdelta = [&](const CyclicWord& w) {
      SuperPolynomial out;
      for (const auto& [legs, c] : delta_gr(qq, sign, w))
        add_scaled(out,
                   make_monomial({graded_necklace_gen(qq, legs.first),
                                  graded_necklace_gen(qq, legs.second)}),
                   c);
      return out;
    };
    const CyclicWord w1 = parse_necklace(qq, m[0].key);
    if (m.size() == 1) return mdelta(w1);
    const CyclicWord w2 = parse_necklace(qq, m[1].key);
    // br_gr(x1,x2) + D(x1) x2 + (-1)^{|x1|} x1 D(x2), D = legs of delta_gr
    SuperPolynomial out;
    for (const auto& [g, c] : br_gr(qq, sign, w1, w2))
      add_term(out, SuperMonomial{graded_necklace_gen(qq, g)}, c);
    add_scaled(out, super_mul(mdelta(w1), gen_poly(m[1])), Rational(1));
    add_scaled(out, super_mul(gen_poly(m[0]), mdelta(w2)),
               Rational(m[0].parity ? -1 : 1));
    return out;
  };
  return op;
}

namespace {

long long appendixA_core(int k, const std::vector<int>& sizes,
                         const std::vector<int>& j_counts, int shift) {
  if (k < 0) throw InputError("k must be nonnegative");
  if (static_cast<int>(sizes.size()) != k + 1)
    throw InputError("need exactly k+1 set sizes");
  if (j_counts.size() != sizes.size())
    throw InputError("J counts must align with the sizes");
  long long J = 0;
  for (size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 0) throw InputError("set sizes must be nonnegative");
    if (j_counts[i] < 0 || j_counts[i] > sizes[i])
      throw InputError("J is not a subset of the disjoint union");
    J += j_counts[i];
  }
  if (J > k) throw InputError("|J| exceeds k");

  long long total = 0;
  for (int mask = 0; mask < (1 << (k + 1)); ++mask) {
    long long B = 0;
    int bits = 0;
    bool contains = true;
    for (int i = 0; i <= k; ++i) {
      if (mask & (1 << i)) {
        B += sizes[i];
        ++bits;
      } else if (j_counts[i] > 0) {
        contains = false;
        break;
      }
    }
    if (!contains) continue;
    total += (bits % 2 ? -1 : 1) * binom_ext(B - J - shift, k - J);
  }
  return total;
}

}  // namespace

long long appendixA_identity(int k, const std::vector<int>& sizes,
                             const std::vector<int>& j_counts) {
  return appendixA_core(k, sizes, j_counts, 1);
}

long long appendixA_identity_simple(int k, const std::vector<int>& sizes,
                                    const std::vector<int>& j_counts) {
  return appendixA_core(k, sizes, j_counts, 0);
}

}  // namespace necklace
