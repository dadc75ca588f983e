#pragma once

#include <functional>
#include <map>

#include "necklace/necklace.hpp"
#include "necklace/superalgebra.hpp"

namespace necklace {

using KernelFn = std::function<SuperPolynomial(const SuperMonomial&)>;
using DiffOpEvaluator = std::function<SuperPolynomial(const SuperMonomial&)>;

// A differential operator of order <= order_bound on a free supercommutative
// algebra, represented by its restriction to monomials of degree <= k: the
// stored kernel_table, optionally backed by kernel_ext for keys outside it
// (closed-form kernels over infinite generator sets). A missing key with no
// kernel_ext means zero. Evaluation anywhere is apply_diffop's extension
// formula; restricting it back to degrees <= k returns the kernel exactly.
struct DiffOp {
  int parity = 0;  // operators are homogeneous; 0 even, 1 odd
  int order_bound = 0;
  std::map<SuperMonomial, SuperPolynomial> kernel_table;
  KernelFn kernel_ext;
};

// kernel_table lookup falling back to kernel_ext, then to zero
SuperPolynomial kernel_value(const DiffOp& op, const SuperMonomial& m);

// binomial with the extension convention: ordinary for alpha >= beta >= 0,
// 0 for beta > alpha >= 0, (-1)^beta for alpha = -1; alpha < -1 or beta < 0
// is an input error
long long binom_ext(long long alpha, long long beta);

// Degree <= k: kernel lookup. Degree N > k:
//   sum over I in {1..N}, |I| <= k, of
//   (-1)^{k+|I|} binom_ext(N-|I|-1, N-k-1) kappa(I) phi(x_I) x_complement,
// kappa(I) the koszul_extract sign (odd-odd transpositions only).
SuperPolynomial apply_diffop(const DiffOp& op, const SuperMonomial& m);
SuperPolynomial apply_diffop(const DiffOp& op, const SuperPolynomial& p);

DiffOpEvaluator to_evaluator(const DiffOp& op);

// order-k deviation: sum over I in {1..k+1} of
//   (-1)^{|I|} kappa(I) D(prod_{i in I} x_i) prod_{i not in I} x_i;
// vanishes for all tuples iff D has order <= k. tuple size must be k+1.
SuperPolynomial order_defect(const DiffOpEvaluator& d, int k,
                             const std::vector<SuperMonomial>& tuple);

// pointwise composition (second applied first)
DiffOpEvaluator compose_diffops(const DiffOpEvaluator& a,
                                const DiffOpEvaluator& b);

// graded commutator a b - (-1)^{|a||b|} b a as an evaluator
DiffOpEvaluator commutator(const DiffOpEvaluator& a, int pa,
                           const DiffOpEvaluator& b, int pb);

// restriction of an evaluator to a finite kernel table over the monomials of
// degree <= k in the given generators
DiffOp restrict_evaluator(const DiffOpEvaluator& d, int parity, int k,
                          const std::vector<GradedGenerator>& gens);

// {p,q} = D(pq) - D(p)q - (-1)^{|p|} p D(q), extended bilinearly
SuperPolynomial associated_bracket(const DiffOp& bv, const SuperPolynomial& p,
                                   const SuperPolynomial& q);

// generators of the free algebras the BV operators act on
GradedGenerator necklace_gen(const DoubleQuiver& q, const CyclicWord& w);
GradedGenerator graded_necklace_gen(const DoubleQuiver& q,
                                    const CyclicWord& w);

// BV operator 2 br^s - delta^s on the shifted necklace algebra (every
// generator odd, constants included); odd, order 2, closed-form kernel
DiffOp necklace_bv(const DoubleQuiver& q, char sign);

// BV operator br_gr^s + delta_gr^s on the graded necklace algebra
// (generator parity = word parity); odd, order 2, closed-form kernel
DiffOp graded_necklace_bv(const DoubleQuiver& q, char sign);

// Inclusion-exclusion identity behind the extension theorem: with
// A = {1..k+1}, disjoint sets B_i of the given sizes, and J picking
// j_counts[i] elements from B_i,
//   sum over I subset A with B_I containing J of
//     (-1)^{|I|} binom_ext(|B_I| - |J| - 1, k - |J|)
// which is always 0. |J| > k or a count exceeding its size is an input
// error. The simple variant drops the -1 shift in the upper argument.
long long appendixA_identity(int k, const std::vector<int>& sizes,
                             const std::vector<int>& j_counts);
long long appendixA_identity_simple(int k, const std::vector<int>& sizes,
                                    const std::vector<int>& j_counts);

}  // namespace necklace
