#include "necklace/diagram.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <set>

#include "necklace/error.hpp"

namespace necklace {

namespace {

inline int ep(int slot, int end) { return slot * 2 + end; }
inline int ep_slot(int e) { return e / 2; }
inline int ep_end(int e) { return e % 2; }

int end_color(const DoubleQuiver& q, int arrow, int end) {
  return end == 0 ? q.src(arrow) : q.tgt(arrow);
}

// Validates the raw diagram and returns the endpoint partner map.
std::vector<int> partner_map(const DoubleQuiver& q, const RawDiagram& raw) {
  const int n = static_cast<int>(raw.slots.size());
  for (int a : raw.slots)
    if (a < 0 || a >= q.num_arrows())
      throw InputError("unknown arrow in diagram slot");
  for (int v : raw.loops)
    if (v < 0 || v >= q.num_vertices())
      throw InputError("unknown vertex in diagram loop");
  std::vector<int> M(2 * n, -1);
  for (const auto& [e1, e2] : raw.arcs) {
    for (const DiagEndpoint& e : {e1, e2}) {
      if (e.slot < 0 || e.slot >= n || e.end < 0 || e.end > 1)
        throw InputError("arc endpoint out of range");
    }
    int a = ep(e1.slot, e1.end), b = ep(e2.slot, e2.end);
    if (a == b) throw InputError("arc joins an endpoint to itself");
    if (M[a] != -1 || M[b] != -1)
      throw InputError("endpoint lies on two arcs");
    if (end_color(q, raw.slots[e1.slot], e1.end) !=
        end_color(q, raw.slots[e2.slot], e2.end))
      throw InputError("arc endpoints have different colors");
    M[a] = b;
    M[b] = a;
  }
  for (int e = 0; e < 2 * n; ++e)
    if (M[e] < 0) throw InputError("dangling endpoint");
  return M;
}

struct Walk {
  std::vector<std::pair<int, int>> steps;  // (arrow, dir = enter end)
  std::vector<int> order;                  // raw slot index per step
};

Walk walk_from(const RawDiagram& raw, const std::vector<int>& M,
               int start_slot, int enter_end) {
  Walk w;
  int slot = start_slot, enter = enter_end;
  do {
    w.steps.emplace_back(raw.slots[slot], enter);
    w.order.push_back(slot);
    int nxt = M[ep(slot, 1 - enter)];
    slot = ep_slot(nxt);
    enter = ep_end(nxt);
  } while (slot != start_slot || enter != enter_end);
  return w;
}

std::vector<std::pair<int, int>> rotate_steps(
    const std::vector<std::pair<int, int>>& s, int k) {
  std::vector<std::pair<int, int>> out;
  const int n = static_cast<int>(s.size());
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(s[(k + i) % n]);
  return out;
}

struct CanonComponent {
  DiagComponent comp;
  std::vector<int> order;                  // chosen slot order
  std::vector<std::vector<int>> stab;     // slot orders of all tied walks
  int odd_count = 0;
};

// Canonicalizes one component from any walk of it: minimize the step
// sequence over all rotations of the walk and of its reversal.
CanonComponent canon_component(const DoubleQuiver& q, const Walk& w) {
  const int n = static_cast<int>(w.steps.size());
  std::vector<std::pair<int, int>> rev_steps(n);
  std::vector<int> rev_order(n);
  for (int i = 0; i < n; ++i) {
    rev_steps[i] = {w.steps[n - 1 - i].first, 1 - w.steps[n - 1 - i].second};
    rev_order[i] = w.order[n - 1 - i];
  }
  CanonComponent out;
  bool have = false;
  auto consider = [&](const std::vector<std::pair<int, int>>& steps,
                      const std::vector<int>& order, int k) {
    std::vector<std::pair<int, int>> cand = rotate_steps(steps, k);
    if (!have || cand < out.comp.steps) {
      have = true;
      out.comp.steps = cand;
      out.stab.clear();
    } else if (cand != out.comp.steps) {
      return;
    }
    std::vector<int> ord(n);
    for (int i = 0; i < n; ++i) ord[i] = order[(k + i) % n];
    out.stab.push_back(std::move(ord));
  };
  for (int k = 0; k < n; ++k) {
    consider(w.steps, w.order, k);
    consider(rev_steps, rev_order, k);
  }
  out.order = out.stab.front();
  for (const auto& [a, d] : out.comp.steps) out.odd_count += arrow_parity(q, a);
  return out;
}

struct CanonResult {
  Diagram d;
  std::vector<int> order;  // canonical position -> raw slot index
  bool graded_zero = false;
};

// Koszul sign exponent for reordering: count pairs of odd slots whose raw
// indices appear out of order in the target sequence.
int odd_inversions(const DoubleQuiver& q, const RawDiagram& raw,
                   const std::vector<int>& target) {
  int inv = 0;
  const int n = static_cast<int>(target.size());
  for (int i = 0; i < n; ++i) {
    if (!arrow_parity(q, raw.slots[target[i]])) continue;
    for (int j = i + 1; j < n; ++j)
      if (arrow_parity(q, raw.slots[target[j]]) && target[i] > target[j])
        ++inv;
  }
  return inv;
}

CanonResult canonicalize_core(const DoubleQuiver& q, const RawDiagram& raw,
                              bool graded) {
  std::vector<int> M = partner_map(q, raw);
  const int n = static_cast<int>(raw.slots.size());
  std::vector<bool> seen(n, false);
  std::vector<CanonComponent> comps;
  for (int s = 0; s < n; ++s) {
    if (seen[s]) continue;
    Walk w = walk_from(raw, M, s, 0);
    for (int idx : w.order) seen[idx] = true;
    comps.push_back(canon_component(q, w));
  }
  std::sort(comps.begin(), comps.end(),
            [](const CanonComponent& a, const CanonComponent& b) {
              return a.comp < b.comp;
            });

  CanonResult res;
  for (size_t c = 0; c < comps.size(); ++c) {
    res.d.comps.push_back(comps[c].comp);
    res.order.insert(res.order.end(), comps[c].order.begin(),
                     comps[c].order.end());
    if (!graded) continue;
    // Zero tests: a slot symmetry of odd Koszul sign kills the diagram.
    if (c > 0 && comps[c].comp == comps[c - 1].comp &&
        (comps[c].odd_count % 2))
      res.graded_zero = true;
    for (const auto& tied : comps[c].stab) {
      if (tied == comps[c].order) continue;
      // Sign of the automorphism sending the chosen order to the tied one:
      // odd-odd inversions of the induced position permutation.
      const auto& base = comps[c].order;
      const int m = static_cast<int>(base.size());
      std::vector<int> pos(n, -1);
      for (int i = 0; i < m; ++i) pos[tied[i]] = i;
      int inv = 0;
      for (int i = 0; i < m; ++i) {
        if (!arrow_parity(q, raw.slots[base[i]])) continue;
        for (int j = i + 1; j < m; ++j)
          if (arrow_parity(q, raw.slots[base[j]]) &&
              pos[base[i]] > pos[base[j]])
            ++inv;
      }
      if (inv % 2) res.graded_zero = true;
    }
  }
  res.d.loops = raw.loops;
  std::sort(res.d.loops.begin(), res.d.loops.end());
  return res;
}

}  // namespace

int Diagram::slot_count() const {
  int n = 0;
  for (const auto& c : comps) n += static_cast<int>(c.steps.size());
  return n;
}

Diagram diag_canonicalize(const DoubleQuiver& q, const RawDiagram& raw) {
  return canonicalize_core(q, raw, false).d;
}

GradedCanon graded_canonicalize(const DoubleQuiver& q, const RawDiagram& raw) {
  CanonResult res = canonicalize_core(q, raw, true);
  if (res.graded_zero) return {Diagram{}, Rational(0)};
  int inv = odd_inversions(q, raw, res.order);
  return {res.d, Rational(inv % 2 ? -1 : 1)};
}

RawDiagram to_raw(const Diagram& d) {
  RawDiagram raw;
  for (const auto& c : d.comps) {
    const int base = static_cast<int>(raw.slots.size());
    const int n = static_cast<int>(c.steps.size());
    for (const auto& [a, dir] : c.steps) raw.slots.push_back(a);
    for (int i = 0; i < n; ++i) {
      int j = (i + 1) % n;
      raw.arcs.push_back({DiagEndpoint{base + i, 1 - c.steps[i].second},
                          DiagEndpoint{base + j, c.steps[j].second}});
    }
  }
  raw.loops = d.loops;
  return raw;
}

std::string format_diagram(const DoubleQuiver& q, const Diagram& d) {
  if (d.comps.empty() && d.loops.empty()) return "1";
  std::string out;
  auto sep = [&] {
    if (!out.empty()) out += "+";
  };
  for (const auto& c : d.comps) {
    sep();
    out += "comp(";
    for (size_t i = 0; i < c.steps.size(); ++i) {
      if (i) out += ",";
      out += q.arrow_name(c.steps[i].first);
      out += (c.steps[i].second == 0) ? ">" : "<";
    }
    out += ")";
  }
  for (int v : d.loops) {
    sep();
    out += "loop(" + q.vertex_name(v) + ")";
  }
  return out;
}

std::string format_diagram_element(const DoubleQuiver& q,
                                   const DiagramElement& x) {
  if (x.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [d, c] : x) {
    std::string cs = c.str();
    if (first) {
      out = cs;
      first = false;
    } else if (!cs.empty() && cs[0] == '-') {
      out += " - " + cs.substr(1);
    } else {
      out += " + " + cs;
    }
    out += "·" + format_diagram(q, d);
  }
  return out;
}

Diagram parse_diagram(const DoubleQuiver& q, std::string_view text) {
  RawDiagram raw;
  size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && text[pos] == ' ') ++pos;
  };
  skip_ws();
  if (text.substr(pos) == "1") return Diagram{};
  while (pos < text.size()) {
    skip_ws();
    size_t open = text.find('(', pos);
    if (open == std::string_view::npos)
      throw InputError("diagram literal: expected comp(...) or loop(...)");
    std::string_view head = text.substr(pos, open - pos);
    size_t close = text.find(')', open);
    if (close == std::string_view::npos)
      throw InputError("diagram literal: unbalanced parentheses");
    std::string_view body = text.substr(open + 1, close - open - 1);
    if (head == "loop") {
      raw.loops.push_back(q.vertex(body));
    } else if (head == "comp") {
      const int base = static_cast<int>(raw.slots.size());
      std::vector<int> dirs;
      size_t b = 0;
      while (b < body.size()) {
        size_t e = body.find(',', b);
        if (e == std::string_view::npos) e = body.size();
        std::string_view step = body.substr(b, e - b);
        if (step.empty()) throw InputError("diagram literal: empty step");
        char tail = step.back();
        if (tail != '>' && tail != '<')
          throw InputError("diagram literal: step needs a direction");
        raw.slots.push_back(q.arrow(step.substr(0, step.size() - 1)));
        dirs.push_back(tail == '>' ? 0 : 1);
        b = e + 1;
      }
      const int n = static_cast<int>(dirs.size());
      if (n == 0) throw InputError("diagram literal: empty component");
      for (int i = 0; i < n; ++i) {
        int j = (i + 1) % n;
        raw.arcs.push_back({DiagEndpoint{base + i, 1 - dirs[i]},
                            DiagEndpoint{base + j, dirs[j]}});
      }
    } else {
      throw InputError("diagram literal: unknown element");
    }
    pos = close + 1;
    skip_ws();
    if (pos < text.size()) {
      if (text[pos] != '+')
        throw InputError("diagram literal: expected '+'");
      ++pos;
    }
  }
  return diag_canonicalize(q, raw);
}

// ---------------------------------------------------------------------------
// strand morphisms

StrandMorphism strand_id(const std::vector<int>& colors) {
  StrandMorphism f;
  f.dom = colors;
  f.cod = colors;
  const int n = static_cast<int>(colors.size());
  f.match.resize(2 * n);
  for (int i = 0; i < n; ++i) {
    f.match[i] = n + i;
    f.match[n + i] = i;
  }
  return f;
}

StrandMorphism strand_cup(int color) {
  StrandMorphism f;
  f.cod = {color, color};
  f.match = {1, 0};
  return f;
}

StrandMorphism strand_cap(int color) {
  StrandMorphism f;
  f.dom = {color, color};
  f.match = {1, 0};
  return f;
}

StrandMorphism strand_cross(int c1, int c2) {
  StrandMorphism f;
  f.dom = {c1, c2};
  f.cod = {c2, c1};
  f.match = {3, 2, 1, 0};
  return f;
}

StrandMorphism strand_tensor(const StrandMorphism& f,
                             const StrandMorphism& g) {
  StrandMorphism h;
  h.dom = f.dom;
  h.dom.insert(h.dom.end(), g.dom.begin(), g.dom.end());
  h.cod = f.cod;
  h.cod.insert(h.cod.end(), g.cod.begin(), g.cod.end());
  const int df = static_cast<int>(f.dom.size());
  const int dg = static_cast<int>(g.dom.size());
  const int cf = static_cast<int>(f.cod.size());
  auto map_f = [&](int i) { return i < df ? i : dg + i; };
  auto map_g = [&](int i) {
    return i < dg ? df + i : df + cf + i;
  };
  h.match.resize(h.dom.size() + h.cod.size());
  for (size_t i = 0; i < f.match.size(); ++i)
    h.match[map_f(static_cast<int>(i))] = map_f(f.match[i]);
  for (size_t i = 0; i < g.match.size(); ++i)
    h.match[map_g(static_cast<int>(i))] = map_g(g.match[i]);
  h.loops = f.loops;
  for (const auto& [c, k] : g.loops) h.loops[c] += k;
  return h;
}

StrandMorphism strand_compose(const StrandMorphism& f,
                              const StrandMorphism& g) {
  if (f.cod != g.dom) throw InputError("strand boundary mismatch");
  const int df = static_cast<int>(f.dom.size());
  const int cf = static_cast<int>(f.cod.size());
  const int cg = static_cast<int>(g.cod.size());
  StrandMorphism h;
  h.dom = f.dom;
  h.cod = g.cod;
  h.loops = f.loops;
  for (const auto& [c, k] : g.loops) h.loops[c] += k;
  h.match.assign(df + cg, -1);
  // Node spaces: f points (0..df+cf), g points (0..dg+cg); interface node k
  // is f's cod point df+k = g's dom point k.
  auto resolve = [&](bool in_f, int point) {
    // Follows the strand until it leaves the interface. Returns (side, point)
    // with side 0 = h's domain (an f dom point), 1 = h's codomain (g cod).
    bool side_f = in_f;
    int p = point;
    while (true) {
      if (side_f) {
        int t = f.match[p];
        if (t < df) return std::pair<int, int>{0, t};
        side_f = false;
        p = t - df;  // enter g at interface node
      } else {
        int t = g.match[p];
        if (t >= cf) return std::pair<int, int>{1, t - cf};
        side_f = true;
        p = df + t;  // back into f through the interface
      }
    }
  };
  for (int i = 0; i < df; ++i) {
    if (h.match[i] != -1) continue;
    auto [side, t] = resolve(true, i);
    int j = side == 0 ? t : df + t;
    h.match[i] = j;
    h.match[j] = i;
  }
  for (int i = 0; i < cg; ++i) {
    if (h.match[df + i] != -1) continue;
    auto [side, t] = resolve(false, cf + i);
    int j = side == 0 ? t : df + t;
    h.match[df + i] = j;
    h.match[j] = df + i;
  }
  // Closed curves: interface nodes never reached from the boundary.
  std::vector<bool> used(cf, false);
  for (int i = 0; i < df; ++i) {
    // mark interface nodes on boundary strands
    bool side_f = true;
    int p = i;
    while (true) {
      if (side_f) {
        int t = f.match[p];
        if (t < df) break;
        used[t - df] = true;
        side_f = false;
        p = t - df;
      } else {
        int t = g.match[p];
        if (t >= cf) break;
        used[t] = true;
        side_f = true;
        p = df + t;
      }
    }
  }
  for (int i = 0; i < cg; ++i) {
    bool side_f = false;
    int p = cf + i;
    while (true) {
      if (side_f) {
        int t = f.match[p];
        if (t < df) break;
        used[t - df] = true;
        side_f = false;
        p = t - df;
      } else {
        int t = g.match[p];
        if (t >= cf) break;
        used[t] = true;
        side_f = true;
        p = df + t;
      }
    }
  }
  for (int k = 0; k < cf; ++k) {
    if (used[k]) continue;
    // trace the closed curve through the interface
    int p = k;
    do {
      used[p] = true;
      int t = f.match[df + p];  // f side: interface node p is f cod df+p
      if (t < df) throw InputError("strand composition escaped a closed curve");
      int gk = t - df;
      used[gk] = true;
      int u = g.match[gk];
      if (u >= cf) throw InputError("strand composition escaped a closed curve");
      p = u;
    } while (p != k);
    h.loops[f.cod[k]] += 1;
  }
  return h;
}

Diagram strand_to_diagram(const DoubleQuiver& q, const StrandMorphism& f) {
  if (!f.dom.empty() || !f.cod.empty())
    throw InputError("only a closed strand morphism is a diagram");
  Diagram d;
  for (const auto& [c, k] : f.loops) {
    if (c < 0 || c >= q.num_vertices())
      throw InputError("unknown vertex color in strand loops");
    for (int i = 0; i < k; ++i) d.loops.push_back(c);
  }
  std::sort(d.loops.begin(), d.loops.end());
  return d;
}

// ---------------------------------------------------------------------------
// traces

Diagram tr(const DoubleQuiver& q, const std::vector<CyclicWord>& factors) {
  Diagram d;
  for (const CyclicWord& w : factors) {
    if (w.is_constant()) {
      if (w.vertex < 0 || w.vertex >= q.num_vertices())
        throw InputError("constant necklace at unknown vertex");
      d.loops.push_back(w.vertex);
      continue;
    }
    DiagComponent c;
    for (int a : w.arrows) c.steps.emplace_back(a, 0);
    d.comps.push_back(std::move(c));
  }
  std::sort(d.comps.begin(), d.comps.end());
  std::sort(d.loops.begin(), d.loops.end());
  return d;
}

DiagramElement tr(const DoubleQuiver& q, const NecklaceElement& x) {
  DiagramElement out;
  for (const auto& [w, c] : x) add_term(out, tr(q, {w}), c);
  return out;
}

Diagram diagram_mul(const Diagram& d1, const Diagram& d2) {
  Diagram d = d1;
  d.comps.insert(d.comps.end(), d2.comps.begin(), d2.comps.end());
  d.loops.insert(d.loops.end(), d2.loops.begin(), d2.loops.end());
  std::sort(d.comps.begin(), d.comps.end());
  std::sort(d.loops.begin(), d.loops.end());
  return d;
}

namespace {

RawDiagram raw_union(const Diagram& d1, const Diagram& d2) {
  RawDiagram r1 = to_raw(d1), r2 = to_raw(d2);
  const int off = static_cast<int>(r1.slots.size());
  for (int a : r2.slots) r1.slots.push_back(a);
  for (auto [e1, e2] : r2.arcs) {
    e1.slot += off;
    e2.slot += off;
    r1.arcs.push_back({e1, e2});
  }
  r1.loops.insert(r1.loops.end(), r2.loops.begin(), r2.loops.end());
  return r1;
}

}  // namespace

GradedDiagramElement tr_gr(const DoubleQuiver& q,
                           const std::vector<CyclicWord>& factors) {
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
  GradedCanon gc = graded_canonicalize(q, raw);
  GradedDiagramElement out;
  if (!gc.sign.is_zero()) add_term(out, gc.d, gc.sign);
  return out;
}

GradedDiagramElement tr_gr(const DoubleQuiver& q, const SuperPolynomial& x) {
  GradedDiagramElement out;
  for (const auto& [m, c] : x) {
    std::vector<CyclicWord> factors;
    for (const GradedGenerator& g : m)
      factors.push_back(parse_necklace(q, g.key));
    add_scaled(out, tr_gr(q, factors), c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// surgeries

namespace {

// Deletes slots p and qq, identifying s_p with t_qq and t_p with s_qq. The
// surviving slots are emitted in strand order starting after p (then after
// qq); slot-free closed curves become loops.
RawDiagram surgery_minus(const DoubleQuiver& q, const RawDiagram& raw, int p,
                         int qq) {
  std::vector<int> M = partner_map(q, raw);
  const int n = static_cast<int>(raw.slots.size());
  std::vector<int> J(2 * n, -1);
  J[ep(p, 0)] = ep(qq, 1);
  J[ep(qq, 1)] = ep(p, 0);
  J[ep(p, 1)] = ep(qq, 0);
  J[ep(qq, 0)] = ep(p, 1);
  auto deleted = [&](int e) { return ep_slot(e) == p || ep_slot(e) == qq; };

  // New matching on surviving endpoints.
  std::vector<int> M2(2 * n, -1);
  std::vector<bool> del_seen(2 * n, false);
  for (int e = 0; e < 2 * n; ++e) {
    if (deleted(e) || M2[e] != -1) continue;
    int cur = M[e];
    while (deleted(cur)) {
      del_seen[cur] = true;
      cur = J[cur];
      del_seen[cur] = true;
      cur = M[cur];
    }
    M2[e] = cur;
    M2[cur] = e;
  }
  RawDiagram out;
  out.loops = raw.loops;
  // Slot-free curves among the deleted endpoints.
  for (int e = 0; e < 2 * n; ++e) {
    if (!deleted(e) || del_seen[e]) continue;
    int cur = e;
    do {
      del_seen[cur] = true;
      int x = J[cur];
      del_seen[x] = true;
      cur = M[x];
    } while (cur != e);
    out.loops.push_back(end_color(q, raw.slots[ep_slot(e)], ep_end(e)));
  }

  // Emit survivors by walking the new matching; start after p, then after qq.
  auto resolve_after = [&](int slot) -> int {
    int cur = M[ep(slot, 1)];
    for (int steps = 0; steps <= 2 * n; ++steps) {
      if (!deleted(cur)) return cur;
      cur = M[J[cur]];
    }
    return -1;  // strand closed up entirely
  };
  std::vector<int> starts;
  if (int e = resolve_after(p); e >= 0) starts.push_back(e);
  if (int e = resolve_after(qq); e >= 0) starts.push_back(e);
  for (int s = 0; s < n; ++s)
    if (s != p && s != qq) starts.push_back(ep(s, 0));

  std::vector<int> new_idx(n, -1);
  std::vector<bool> visited(n, false);
  std::vector<std::pair<int, int>> arc_eps;  // endpoint pairs, old encoding
  for (int st : starts) {
    int s0 = ep_slot(st);
    if (visited[s0]) continue;
    int slot = s0, enter = ep_end(st);
    do {
      visited[slot] = true;
      new_idx[slot] = static_cast<int>(out.slots.size());
      out.slots.push_back(raw.slots[slot]);
      int exit_ep = ep(slot, 1 - enter);
      int nxt = M2[exit_ep];
      arc_eps.emplace_back(exit_ep, nxt);
      slot = ep_slot(nxt);
      enter = ep_end(nxt);
    } while (slot != s0 || enter != ep_end(st));
  }
  for (const auto& [a, b] : arc_eps)
    out.arcs.push_back({DiagEndpoint{new_idx[ep_slot(a)], ep_end(a)},
                        DiagEndpoint{new_idx[ep_slot(b)], ep_end(b)}});
  return out;
}

// Inserts fresh copies of slots p and qq. The copies take over the source
// arcs; the originals keep their target arcs; two new arcs close the braid:
// t(copy of p) - s(qq) and t(copy of qq) - s(p). Slots are emitted in strand
// order starting at p (then at qq).
RawDiagram surgery_plus(const DoubleQuiver& q, const RawDiagram& raw, int p,
                        int qq) {
  const int n = static_cast<int>(raw.slots.size());
  RawDiagram grown = raw;
  grown.slots.push_back(raw.slots[p]);   // p2 = n
  grown.slots.push_back(raw.slots[qq]);  // q2 = n + 1
  const int p2 = n, q2 = n + 1;
  auto remap = [&](DiagEndpoint e) {
    if (e.slot == p && e.end == 0) return DiagEndpoint{p2, 0};
    if (e.slot == qq && e.end == 0) return DiagEndpoint{q2, 0};
    return e;
  };
  for (auto& [e1, e2] : grown.arcs) {
    e1 = remap(e1);
    e2 = remap(e2);
  }
  grown.arcs.push_back({DiagEndpoint{p2, 1}, DiagEndpoint{qq, 0}});
  grown.arcs.push_back({DiagEndpoint{q2, 1}, DiagEndpoint{p, 0}});

  std::vector<int> M = partner_map(q, grown);
  const int total = n + 2;
  std::vector<int> starts{ep(p, 0), ep(qq, 0)};
  for (int s = 0; s < total; ++s)
    if (s != p && s != qq) starts.push_back(ep(s, 0));

  RawDiagram out;
  out.loops = grown.loops;
  std::vector<int> new_idx(total, -1);
  std::vector<bool> visited(total, false);
  std::vector<std::pair<int, int>> arc_eps;
  for (int st : starts) {
    int s0 = ep_slot(st);
    if (visited[s0]) continue;
    int slot = s0, enter = ep_end(st);
    do {
      visited[slot] = true;
      new_idx[slot] = static_cast<int>(out.slots.size());
      out.slots.push_back(grown.slots[slot]);
      int exit_ep = ep(slot, 1 - enter);
      int nxt = M[exit_ep];
      arc_eps.emplace_back(exit_ep, nxt);
      slot = ep_slot(nxt);
      enter = ep_end(nxt);
    } while (slot != s0 || enter != ep_end(st));
  }
  for (const auto& [a, b] : arc_eps)
    out.arcs.push_back({DiagEndpoint{new_idx[ep_slot(a)], ep_end(a)},
                        DiagEndpoint{new_idx[ep_slot(b)], ep_end(b)}});
  return out;
}

}  // namespace

DiagramElement diag_bracket(const DoubleQuiver& q, char sign,
                            const Diagram& d1, const Diagram& d2) {
  if (sign != '-' && sign != '+') throw InputError("sign must be '-' or '+'");
  RawDiagram uni = raw_union(d1, d2);
  const int n1 = d1.slot_count();
  const int n2 = d2.slot_count();
  DiagramElement out;
  for (int p = 0; p < n1; ++p) {
    for (int j = 0; j < n2; ++j) {
      int c = pairing(q, uni.slots[p], uni.slots[n1 + j]);
      if (!c) continue;
      RawDiagram res = (sign == '-') ? surgery_minus(q, uni, p, n1 + j)
                                     : surgery_plus(q, uni, p, n1 + j);
      add_term(out, diag_canonicalize(q, res), Rational(c));
    }
  }
  return out;
}

DiagramElement diag_bracket(const DoubleQuiver& q, char sign,
                            const DiagramElement& d1,
                            const DiagramElement& d2) {
  DiagramElement out;
  for (const auto& [a, ca] : d1)
    for (const auto& [b, cb] : d2)
      add_scaled(out, diag_bracket(q, sign, a, b), ca * cb);
  return out;
}

// ---------------------------------------------------------------------------
// graded BV operators

SuperPolynomial diagram_to_monomial(const DoubleQuiver& q, const Diagram& d) {
  std::vector<GradedGenerator> gens;
  for (const auto& c : d.comps) {
    Diagram single;
    single.comps.push_back(c);
    int par = 0;
    for (const auto& [a, dir] : c.steps) par ^= arrow_parity(q, a);
    gens.push_back(GradedGenerator{format_diagram(q, single), par});
  }
  for (int v : d.loops) {
    Diagram single;
    single.loops.push_back(v);
    gens.push_back(GradedGenerator{format_diagram(q, single), 0});
  }
  return make_monomial(gens);
}

GradedCanon monomial_to_diagram(const DoubleQuiver& q,
                                const SuperMonomial& m) {
  RawDiagram raw;
  for (const GradedGenerator& g : m) {
    Diagram part = parse_diagram(q, g.key);
    RawDiagram praw = to_raw(part);
    const int off = static_cast<int>(raw.slots.size());
    for (int a : praw.slots) raw.slots.push_back(a);
    for (auto [e1, e2] : praw.arcs) {
      e1.slot += off;
      e2.slot += off;
      raw.arcs.push_back({e1, e2});
    }
    raw.loops.insert(raw.loops.end(), praw.loops.begin(), praw.loops.end());
  }
  return graded_canonicalize(q, raw);
}

namespace {

// Slot-pair kernel on a single connected generator: the ordered-pair sum
// with the graded pairing, transported from the necklace cobrackets. Loops
// have no slots and map to zero.
SuperPolynomial nabla_deg1(const DoubleQuiver& q, char sign,
                           const Diagram& gen) {
  SuperPolynomial out;
  if (gen.comps.empty()) return out;
  RawDiagram raw = to_raw(gen);
  const int n = static_cast<int>(raw.slots.size());
  std::vector<int> r(n), ps(n + 1, 0);
  int P = 0;
  for (int t = 0; t < n; ++t) {
    r[t] = arrow_parity(q, raw.slots[t]);
    ps[t + 1] = ps[t] + r[t];
    P += r[t];
  }
  auto seg_par = [&](int from, int to) {  // strictly between, cyclic forward
    int s = 0;
    for (int t = (from + 1) % n; t != to; t = (t + 1) % n) s += r[t];
    return s;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      int c = pairing_gr(q, raw.slots[i], raw.slots[j]);
      if (!c) continue;
      int par_ij = seg_par(i, j);
      int par_ji = P - r[i] - r[j] - par_ij;
      int eps;
      if (sign == '-') {
        eps = ps[i] * (P - ps[i]) + par_ij * r[j];
      } else {
        eps = ps[i] * (P - ps[i]) + par_ij + par_ji * r[i] + r[j];
      }
      RawDiagram res = (sign == '-') ? surgery_minus(q, raw, i, j)
                                     : surgery_plus(q, raw, i, j);
      GradedCanon gc = graded_canonicalize(q, res);
      if (gc.sign.is_zero()) continue;
      Rational coeff = Rational(c) * gc.sign * Rational(1, 2);
      if (eps % 2) coeff = -coeff;
      add_scaled(out, diagram_to_monomial(q, gc.d), coeff);
    }
  }
  return out;
}

// Cross-pair sum for two connected generators, transported from the
// necklace brackets.
SuperPolynomial nabla_cross(const DoubleQuiver& q, char sign,
                            const Diagram& g1, const Diagram& g2) {
  SuperPolynomial out;
  if (g1.comps.empty() || g2.comps.empty()) return out;
  RawDiagram uni = raw_union(g1, g2);
  const int nx = g1.slot_count();
  const int ny = g2.slot_count();
  std::vector<int> rx(nx), ry(ny), psx(nx + 1, 0), psy(ny + 1, 0);
  int PX = 0, PY = 0;
  for (int t = 0; t < nx; ++t) {
    rx[t] = arrow_parity(q, uni.slots[t]);
    psx[t + 1] = psx[t] + rx[t];
    PX += rx[t];
  }
  for (int t = 0; t < ny; ++t) {
    ry[t] = arrow_parity(q, uni.slots[nx + t]);
    psy[t + 1] = psy[t] + ry[t];
    PY += ry[t];
  }
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      int c = pairing_gr(q, uni.slots[i], uni.slots[nx + j]);
      if (!c) continue;
      int eps = psx[i] * (PX - psx[i]) + psy[j] * (PY - psy[j]);
      if (sign == '-') {
        eps += (PX - rx[i]) * ry[j];
      } else {
        eps += (PX - rx[i]) + (PY - ry[j]) * ry[j];
      }
      RawDiagram res = (sign == '-') ? surgery_minus(q, uni, i, nx + j)
                                     : surgery_plus(q, uni, i, nx + j);
      GradedCanon gc = graded_canonicalize(q, res);
      if (gc.sign.is_zero()) continue;
      Rational coeff = Rational(c) * gc.sign;
      if (eps % 2) coeff = -coeff;
      add_scaled(out, diagram_to_monomial(q, gc.d), coeff);
    }
  }
  return out;
}

}  // namespace

DiffOp nabla(const DoubleQuiver& q, char sign) {
  if (sign != '-' && sign != '+') throw InputError("sign must be '-' or '+'");
  DiffOp op;
  op.parity = 1;
  op.order_bound = 2;
  DoubleQuiver qq = q;
  op.kernel_ext = [qq, sign](const SuperMonomial& m) -> SuperPolynomial {
    if (m.empty()) return {};
    Diagram g1 = parse_diagram(qq, m[0].key);
    if (m.size() == 1) return nabla_deg1(qq, sign, g1);
    Diagram g2 = parse_diagram(qq, m[1].key);
    SuperPolynomial out = nabla_cross(qq, sign, g1, g2);
    add_scaled(out, super_mul(nabla_deg1(qq, sign, g1), gen_poly(m[1])),
               Rational(1));
    add_scaled(out, super_mul(gen_poly(m[0]), nabla_deg1(qq, sign, g2)),
               Rational(m[0].parity ? -1 : 1));
    return out;
  };
  return op;
}

GradedDiagramElement apply_diag_op(const DoubleQuiver& q, const DiffOp& op,
                                   const GradedDiagramElement& x) {
  GradedDiagramElement out;
  for (const auto& [d, c] : x) {
    SuperPolynomial img = apply_diffop(op, scaled(diagram_to_monomial(q, d), c));
    for (const auto& [m, cm] : img) {
      GradedCanon gc = monomial_to_diagram(q, m);
      if (gc.sign.is_zero()) continue;
      add_term(out, gc.d, cm * gc.sign);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// checkers

std::vector<std::vector<CyclicWord>> enumerate_products(const DoubleQuiver& q,
                                                        int bound,
                                                        bool graded) {
  std::vector<CyclicWord> words = enumerate_necklaces(q, bound);
  if (graded) {
    std::vector<CyclicWord> keep;
    for (const CyclicWord& w : words)
      if (w.is_constant() || !graded_normalize(q, w.arrows).empty())
        keep.push_back(w);
    words = std::move(keep);
  }
  std::vector<std::vector<CyclicWord>> out;
  std::vector<CyclicWord> cur;
  std::function<void(size_t, int)> rec = [&](size_t from, int room) {
    out.push_back(cur);
    for (size_t i = from; i < words.size(); ++i) {
      int len = std::max(1, words[i].length());
      if (len > room) continue;
      if (graded && !cur.empty() && cur.back() == words[i] &&
          !words[i].is_constant() && word_parity(q, words[i]))
        continue;  // odd square vanishes
      cur.push_back(words[i]);
      rec(i, room - len);
      cur.pop_back();
    }
  };
  rec(0, bound);
  return out;
}

namespace {

std::string format_product(const DoubleQuiver& q,
                           const std::vector<CyclicWord>& factors) {
  if (factors.empty()) return "1";
  std::string out;
  for (size_t i = 0; i < factors.size(); ++i) {
    if (i) out += "·";
    out += format_necklace(q, factors[i]);
  }
  return out;
}

}  // namespace

AxiomReport check_tr_injective(const DoubleQuiver& q, int bound) {
  AxiomReport rep;
  rep.axiom = "tr injectivity";
  std::map<Diagram, std::vector<CyclicWord>> seen;
  for (const auto& prod : enumerate_products(q, bound, false)) {
    Diagram d = tr(q, prod);
    auto [it, inserted] = seen.emplace(d, prod);
    if (!inserted) {
      rep.ok = false;
      rep.counterexample = "tr(" + format_product(q, prod) + ") == tr(" +
                           format_product(q, it->second) + ")";
      return rep;
    }
  }
  return rep;
}

AxiomReport check_trgr_injective(const DoubleQuiver& q, int bound) {
  AxiomReport rep;
  rep.axiom = "tr_gr injectivity";
  std::map<Diagram, std::vector<CyclicWord>> seen;
  for (const auto& prod : enumerate_products(q, bound, true)) {
    GradedDiagramElement el = tr_gr(q, prod);
    if (el.size() != 1) {
      rep.ok = false;
      rep.counterexample =
          "tr_gr(" + format_product(q, prod) + ") vanished on a basis element";
      return rep;
    }
    auto [it, inserted] = seen.emplace(el.begin()->first, prod);
    if (!inserted) {
      rep.ok = false;
      rep.counterexample = "tr_gr(" + format_product(q, prod) + ") == tr_gr(" +
                           format_product(q, it->second) + ") up to sign";
      return rep;
    }
  }
  return rep;
}

namespace {

AxiomReport check_intertwine_plain(const DoubleQuiver& q, char sign,
                                   int max_len) {
  AxiomReport rep;
  rep.axiom = std::string("intertwine plain") + sign;
  std::vector<CyclicWord> words = enumerate_necklaces(q, max_len);
  for (const CyclicWord& x : words) {
    for (const CyclicWord& y : words) {
      DiagramElement lhs =
          diag_bracket(q, sign, tr(q, {x}), tr(q, {y}));
      DiagramElement rhs = tr(q, br(q, sign, x, y));
      if (lhs != rhs) {
        rep.ok = false;
        rep.counterexample = "x = " + format_necklace(q, x) +
                             ", y = " + format_necklace(q, y);
        return rep;
      }
    }
  }
  return rep;
}

std::vector<std::vector<CyclicWord>> graded_monomial_sample(
    const DoubleQuiver& q, int max_len, int max_factors) {
  std::vector<CyclicWord> words = enumerate_necklaces(q, max_len);
  std::vector<CyclicWord> keep;
  for (const CyclicWord& w : words)
    if (w.is_constant() || !graded_normalize(q, w.arrows).empty())
      keep.push_back(w);
  std::vector<std::vector<CyclicWord>> out;
  std::vector<CyclicWord> cur;
  std::function<void(size_t)> rec = [&](size_t from) {
    out.push_back(cur);
    if (static_cast<int>(cur.size()) == max_factors) return;
    for (size_t i = from; i < keep.size(); ++i) {
      if (!cur.empty() && cur.back() == keep[i] && !keep[i].is_constant() &&
          word_parity(q, keep[i]))
        continue;
      cur.push_back(keep[i]);
      rec(i);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

SuperPolynomial necklace_monomial(const DoubleQuiver& q,
                                  const std::vector<CyclicWord>& factors) {
  std::vector<GradedGenerator> gens;
  for (const CyclicWord& w : factors)
    gens.push_back(graded_necklace_gen(q, w));
  return make_monomial(gens);
}

AxiomReport check_intertwine_graded(const DoubleQuiver& q, char sign,
                                    int max_len, int max_factors) {
  AxiomReport rep;
  rep.axiom = std::string("intertwine graded") + sign;
  DiffOp bv = graded_necklace_bv(q, sign);
  DiffOp nb = nabla(q, sign);
  for (const auto& prod : graded_monomial_sample(q, max_len, max_factors)) {
    GradedDiagramElement lhs = apply_diag_op(q, nb, tr_gr(q, prod));
    GradedDiagramElement rhs =
        tr_gr(q, apply_diffop(bv, necklace_monomial(q, prod)));
    if (lhs != rhs) {
      rep.ok = false;
      rep.counterexample = format_product(q, prod);
      return rep;
    }
  }
  return rep;
}

}  // namespace

AxiomReport check_intertwine(const DoubleQuiver& q, const std::string& model,
                             int max_len, int max_factors) {
  if (model == "plain-") return check_intertwine_plain(q, '-', max_len);
  if (model == "plain+") return check_intertwine_plain(q, '+', max_len);
  if (model == "graded-")
    return check_intertwine_graded(q, '-', max_len, max_factors);
  if (model == "graded+")
    return check_intertwine_graded(q, '+', max_len, max_factors);
  throw InputError("unknown intertwining model: " + model);
}

AxiomReport check_diag_jacobi(const DoubleQuiver& q, char sign, int max_len) {
  AxiomReport rep;
  rep.axiom = std::string("diagram Jacobi ") + sign;
  std::vector<CyclicWord> words = enumerate_necklaces(q, max_len);
  std::vector<Diagram> ds;
  ds.reserve(words.size());
  for (const CyclicWord& w : words) ds.push_back(tr(q, {w}));
  const int n = static_cast<int>(ds.size());
  for (int i = 0; i < n; ++i) {
    DiagramElement ei;
    add_term(ei, ds[i], Rational(1));
    for (int j = i; j < n; ++j) {
      DiagramElement ej;
      add_term(ej, ds[j], Rational(1));
      DiagramElement bij = diag_bracket(q, sign, ei, ej);
      for (int k = j; k < n; ++k) {
        DiagramElement ek;
        add_term(ek, ds[k], Rational(1));
        DiagramElement sum = diag_bracket(q, sign, bij, ek);
        add_scaled(sum,
                   diag_bracket(q, sign, diag_bracket(q, sign, ej, ek), ei),
                   Rational(1));
        add_scaled(sum,
                   diag_bracket(q, sign, diag_bracket(q, sign, ek, ei), ej),
                   Rational(1));
        if (!sum.empty()) {
          rep.ok = false;
          rep.counterexample = format_necklace(q, words[i]) + ", " +
                               format_necklace(q, words[j]) + ", " +
                               format_necklace(q, words[k]);
          return rep;
        }
      }
    }
  }
  return rep;
}

AxiomReport check_nabla_squared(const DoubleQuiver& q, char sign, int max_len,
                                int max_factors) {
  AxiomReport rep;
  rep.axiom = std::string("nabla") + sign + " squared";
  DiffOp nb = nabla(q, sign);
  for (const auto& prod : graded_monomial_sample(q, max_len, max_factors)) {
    GradedDiagramElement x = tr_gr(q, prod);
    GradedDiagramElement once = apply_diag_op(q, nb, x);
    GradedDiagramElement twice = apply_diag_op(q, nb, once);
    if (!twice.empty()) {
      rep.ok = false;
      rep.counterexample = format_product(q, prod);
      return rep;
    }
  }
  return rep;
}

}  // namespace necklace
