#pragma once

#include <map>

#include "necklace/rational.hpp"

namespace necklace {

// Linear combination with exact rational coefficients. std::map keeps terms
// in key order, which makes printing and reports deterministic. Invariant:
// no zero coefficients are stored.
template <class Key>
using LinComb = std::map<Key, Rational>;

template <class Key>
void add_term(LinComb<Key>& lc, const Key& k, const Rational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = lc.emplace(k, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) lc.erase(it);
  }
}

template <class Key>
void add_scaled(LinComb<Key>& dst, const LinComb<Key>& src,
                const Rational& c) {
  if (c.is_zero()) return;
  for (const auto& [k, v] : src) add_term(dst, k, v * c);
}

template <class Key>
LinComb<Key> scaled(const LinComb<Key>& src, const Rational& c) {
  LinComb<Key> out;
  add_scaled(out, src, c);
  return out;
}

}  // namespace necklace
