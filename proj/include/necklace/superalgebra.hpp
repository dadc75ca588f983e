#pragma once

#include <string>
#include <vector>

#include "necklace/lincomb.hpp"

namespace necklace {

// Generator of a free supercommutative algebra. The key is a canonical
// serialization of the underlying object (cyclic word, diagram, ...), so
// distinct modules share this engine; parity is fixed per key.
struct GradedGenerator {
  std::string key;
  int parity = 0;  // 0 even, 1 odd

  auto operator<=>(const GradedGenerator&) const = default;
};

// Sorted ascending by key; odd generators never repeat (such a monomial is
// zero and is never stored). Even generators repeat with multiplicity. The
// empty monomial is the unit.
using SuperMonomial = std::vector<GradedGenerator>;
using SuperPolynomial = LinComb<SuperMonomial>;

// canonical monomial from an unordered generator list: +/- the sorted
// monomial (Koszul sign of the sorting permutation on odd generators), or 0
// when an odd generator repeats
SuperPolynomial make_monomial(std::vector<GradedGenerator> gens);

SuperPolynomial super_unit();
SuperPolynomial gen_poly(const GradedGenerator& g);

// bilinear supercommutative product
SuperPolynomial super_mul(const SuperPolynomial& p, const SuperPolynomial& q);

int monomial_parity(const SuperMonomial& m);

struct KoszulSplit {
  Rational sign;        // Koszul sign of moving the I block to the front
  SuperMonomial front;  // m restricted to I, in order
  SuperMonomial rest;   // complement, in order
};

// I: sorted 0-based positions into m; sign counts odd-odd transpositions
// only. Out-of-range or repeated index -> InputError.
KoszulSplit koszul_extract(const SuperMonomial& m, const std::vector<int>& I);

// "x·y·z" with the generators' keys; "1" for the unit monomial
std::string format_monomial(const SuperMonomial& m);
std::string format_polynomial(const SuperPolynomial& p);

// all canonical monomials of degree <= max_degree over the given generators
// (including the unit)
std::vector<SuperMonomial> enumerate_monomials(
    const std::vector<GradedGenerator>& gens, int max_degree);

}  // namespace necklace
