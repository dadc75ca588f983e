#include "necklace/superalgebra.hpp"

#include <algorithm>

#include "necklace/error.hpp"

namespace necklace {

SuperPolynomial make_monomial(std::vector<GradedGenerator> gens) {
  // insertion sort, counting odd-odd transpositions
  int swaps = 0;
  for (size_t i = 1; i < gens.size(); ++i) {
    GradedGenerator g = std::move(gens[i]);
    size_t j = i;
    while (j > 0 && g < gens[j - 1]) {
      swaps += gens[j - 1].parity & g.parity;
      gens[j] = std::move(gens[j - 1]);
      --j;
    }
    gens[j] = std::move(g);
  }
  for (size_t i = 1; i < gens.size(); ++i) {
    if (gens[i].key != gens[i - 1].key) continue;
    if (gens[i].parity != gens[i - 1].parity)
      throw InputError("generator key '" + gens[i].key +
                       "' used with two parities");
    if (gens[i].parity) return {};  // odd square
  }
  SuperPolynomial out;
  add_term(out, gens, Rational(swaps % 2 ? -1 : 1));
  return out;
}

SuperPolynomial super_unit() {
  SuperPolynomial out;
  add_term(out, SuperMonomial{}, Rational(1));
  return out;
}

SuperPolynomial gen_poly(const GradedGenerator& g) {
  SuperPolynomial out;
  add_term(out, SuperMonomial{g}, Rational(1));
  return out;
}

SuperPolynomial super_mul(const SuperPolynomial& p, const SuperPolynomial& q) {
  SuperPolynomial out;
  for (const auto& [mp, cp] : p) {
    for (const auto& [mq, cq] : q) {
      std::vector<GradedGenerator> gens = mp;
      gens.insert(gens.end(), mq.begin(), mq.end());
      add_scaled(out, make_monomial(std::move(gens)), cp * cq);
    }
  }
  return out;
}

int monomial_parity(const SuperMonomial& m) {
  int p = 0;
  for (const auto& g : m) p += g.parity;
  return p % 2;
}

KoszulSplit koszul_extract(const SuperMonomial& m, const std::vector<int>& I) {
  const int n = static_cast<int>(m.size());
  std::vector<bool> in(n, false);
  for (size_t t = 0; t < I.size(); ++t) {
    if (I[t] < 0 || I[t] >= n) throw InputError("extract index out of range");
    if (t > 0 && I[t] <= I[t - 1])
      throw InputError("extract indices must be strictly increasing");
    in[I[t]] = true;
  }
  KoszulSplit out{Rational(1), {}, {}};
  int odd_skipped = 0;  // odd generators seen so far that stay behind
  for (int i = 0; i < n; ++i) {
    if (in[i]) {
      out.front.push_back(m[i]);
      if (m[i].parity && (odd_skipped % 2)) out.sign = -out.sign;
    } else {
      out.rest.push_back(m[i]);
      odd_skipped += m[i].parity;
    }
  }
  return out;
}

std::string format_monomial(const SuperMonomial& m) {
  if (m.empty()) return "1";
  std::string s;
  for (const auto& g : m) {
    if (!s.empty()) s += "·";
    s += g.key;
  }
  return s;
}

std::string format_polynomial(const SuperPolynomial& p) {
  if (p.empty()) return "0";
  std::string s;
  for (const auto& [m, c] : p) {
    if (!s.empty()) s += " + ";
    s += c.str() + "·" + format_monomial(m);
  }
  return s;
}

namespace {

void grow(const std::vector<GradedGenerator>& gens, size_t start,
          SuperMonomial& cur, int room, std::vector<SuperMonomial>& out) {
  out.push_back(cur);
  if (room == 0) return;
  for (size_t i = start; i < gens.size(); ++i) {
    if (gens[i].parity && !cur.empty() && cur.back() == gens[i]) continue;
    cur.push_back(gens[i]);
    grow(gens, i, cur, room - 1, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<SuperMonomial> enumerate_monomials(
    const std::vector<GradedGenerator>& gens, int max_degree) {
  std::vector<GradedGenerator> sorted = gens;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<SuperMonomial> out;
  SuperMonomial cur;
  grow(sorted, 0, cur, max_degree, out);
  return out;
}

}  // namespace necklace
