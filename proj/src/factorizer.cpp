#include "derham/factorizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>

namespace derham {

namespace {

std::vector<int> normal_form(const ProductWitness& w) {
  // relabel both coordinates by first appearance in point order
  std::vector<int> ymap(static_cast<std::size_t>(w.y_count), -1);
  std::vector<int> bmap(static_cast<std::size_t>(w.ybar_count), -1);
  int yn = 0, bn = 0;
  std::vector<int> key;
  key.reserve(2 * w.y_index.size() + 2);
  key.push_back(w.y_count);
  key.push_back(w.ybar_count);
  for (std::size_t p = 0; p < w.y_index.size(); ++p) {
    int& ym = ymap[static_cast<std::size_t>(w.y_index[p])];
    if (ym < 0) ym = yn++;
    int& bm = bmap[static_cast<std::size_t>(w.ybar_index[p])];
    if (bm < 0) bm = bn++;
    key.push_back(ym);
    key.push_back(bm);
  }
  return key;
}

}  // namespace

std::vector<int> witness_canonical_key(const ProductWitness& w) {
  return std::min(normal_form(w), normal_form(w.swapped()));
}

namespace {

// restores canonical coordinates from a key produced above
ProductWitness witness_from_key(const std::vector<int>& key) {
  ProductWitness w;
  w.y_count = key[0];
  w.ybar_count = key[1];
  const std::size_t n = (key.size() - 2) / 2;
  w.y_index.resize(n);
  w.ybar_index.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    w.y_index[p] = key[2 + 2 * p];
    w.ybar_index[p] = key[3 + 2 * p];
  }
  return w;
}

std::vector<int> proper_divisors(int n) {
  std::vector<int> out;
  for (int k = 2; k * 2 <= n; ++k) {
    if (n % k == 0) out.push_back(k);
  }
  return out;
}

// Search state for fibers through point 0. cons[z][a] holds the bitmask of
// candidate projections p with (d2(z,a)-d2(p,a)) == (d2(z,0)-d2(p,0)).
struct FiberSearch {
  const FiniteMetricSpace& s;
  const Tolerance& tol;
  const SearchBudget& budget;
  int n;
  Matrix d2;
  double slack;
  std::vector<std::vector<std::uint32_t>> cons;
  long nodes = 0;
  bool complete = true;
  std::set<std::vector<int>>* keys;

  FiberSearch(const FiniteMetricSpace& sp, const Tolerance& t, const SearchBudget& b,
              std::set<std::vector<int>>* out)
      : s(sp), tol(t), budget(b), n(sp.size()), d2(sp.squared()), keys(out) {
    slack = 4.0 * tol.sq + 1e-12 * std::max(1.0, d2.maxCoeff());
    cons.assign(static_cast<std::size_t>(n), std::vector<std::uint32_t>(static_cast<std::size_t>(n), 0));
    for (int z = 0; z < n; ++z) {
      for (int a = 0; a < n; ++a) {
        std::uint32_t mask = 0;
        for (int p = 0; p < n; ++p) {
          const double delta = (d2(z, a) - d2(p, a)) - (d2(z, 0) - d2(p, 0));
          if (std::abs(delta) <= slack) mask |= (1u << p);
        }
        cons[static_cast<std::size_t>(z)][static_cast<std::size_t>(a)] = mask;
      }
    }
  }

  void run(int k) {
    std::vector<int> fiber{0};
    std::vector<std::uint32_t> cand(static_cast<std::size_t>(n), ~0u);
    dfs(fiber, 1, k, cand);
  }

  void dfs(std::vector<int>& fiber, int next, int k, const std::vector<std::uint32_t>& cand) {
    if (++nodes > budget.max_nodes) {
      complete = false;
      return;
    }
    if (static_cast<int>(fiber.size()) == k) {
      finalize(fiber);
      return;
    }
    const int need = k - static_cast<int>(fiber.size());
    for (int a = next; a + need <= n; ++a) {
      std::vector<std::uint32_t> nc(cand);
      bool dead = false;
      std::uint32_t amask = 0;
      for (int q : fiber) amask |= (1u << q);
      amask |= (1u << a);
      const std::uint32_t future = (a + 1 >= n) ? 0u : (~0u << (a + 1)) & ((n == 32 ? ~0u : (1u << n) - 1u));
      for (int z = 0; z < n; ++z) {
        nc[static_cast<std::size_t>(z)] &= cons[static_cast<std::size_t>(z)][static_cast<std::size_t>(a)];
        if (amask & (1u << z)) continue;
        // excluded points must keep a viable projection target
        if (z < a && !(nc[static_cast<std::size_t>(z)] & (amask | future))) {
          dead = true;
          break;
        }
      }
      if (!dead) {
        fiber.push_back(a);
        dfs(fiber, a + 1, k, nc);
        fiber.pop_back();
        if (!complete) return;
      }
    }
  }

  // the fiber determines projections, the complementary fiber, and the grid
  void finalize(const std::vector<int>& fiber) {
    const int k = static_cast<int>(fiber.size());
    std::vector<int> proj(static_cast<std::size_t>(n), -1);
    std::vector<int> pos_in_fiber(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < k; ++i) pos_in_fiber[static_cast<std::size_t>(fiber[static_cast<std::size_t>(i)])] = i;

    for (int z = 0; z < n; ++z) {
      if (pos_in_fiber[static_cast<std::size_t>(z)] >= 0) {
        proj[static_cast<std::size_t>(z)] = z;
        continue;
      }
      int best = -1;
      double bestv = 0;
      for (int p : fiber) {
        bool consistent = true;
        for (int a : fiber) {
          if (std::abs((d2(z, a) - d2(p, a)) - (d2(z, 0) - d2(p, 0))) > slack) {
            consistent = false;
            break;
          }
        }
        if (!consistent) continue;
        const double c = d2(z, p);
        if (best < 0 || c < bestv) {
          best = p;
          bestv = c;
        }
      }
      if (best < 0) return;
      proj[static_cast<std::size_t>(z)] = best;
    }

    // column of the base point
    std::vector<int> column;
    for (int z = 0; z < n; ++z) {
      if (proj[static_cast<std::size_t>(z)] == 0) column.push_back(z);
    }
    if (static_cast<int>(column.size()) * k != n) return;
    std::vector<int> pos_in_col(static_cast<std::size_t>(n), -1);
    for (std::size_t q = 0; q < column.size(); ++q) pos_in_col[static_cast<std::size_t>(column[q])] = static_cast<int>(q);

    ProductWitness w;
    w.y_count = k;
    w.ybar_count = static_cast<int>(column.size());
    w.y_index.assign(static_cast<std::size_t>(n), -1);
    w.ybar_index.assign(static_cast<std::size_t>(n), -1);
    for (int z = 0; z < n; ++z) {
      w.y_index[static_cast<std::size_t>(z)] = pos_in_fiber[static_cast<std::size_t>(proj[static_cast<std::size_t>(z)])];
      // the row of z meets the base column in its nearest point
      int best = -1;
      double bestv = 0;
      for (int q : column) {
        const double v = d2(z, q);
        if (best < 0 || v < bestv) {
          best = q;
          bestv = v;
        }
      }
      w.ybar_index[static_cast<std::size_t>(z)] = pos_in_col[static_cast<std::size_t>(best)];
    }
    if (check_witness(s, w, tol).ok) keys->insert(witness_canonical_key(w));
  }
};

}  // namespace

WitnessList enumerate_witnesses(const FiniteMetricSpace& s, const Tolerance& tol,
                                const SearchBudget& budget) {
  WitnessList out;
  const int n = s.size();
  if (n > budget.max_points) {
    out.complete = false;
    out.note = "point budget exceeded";
    return out;
  }
  if (n < 4) return out;
  std::set<std::vector<int>> keys;
  FiberSearch search(s, tol, budget, &keys);
  for (int k : proper_divisors(n)) {
    if (static_cast<long>(k) * k > static_cast<long>(n)) break;  // smaller factor suffices
    search.run(k);
  }
  out.complete = search.complete;
  if (!out.complete) out.note = "node budget exceeded";
  for (const auto& key : keys) out.witnesses.push_back(witness_from_key(key));
  return out;
}

namespace {

struct PartitionSearch {
  const FiniteMetricSpace& s;
  const Tolerance& tol;
  const SearchBudget& budget;
  int n, k;
  long nodes = 0;
  bool complete = true;
  std::set<std::vector<int>>* keys;
  std::vector<std::vector<int>> blocks;
  std::vector<bool> used;

  PartitionSearch(const FiniteMetricSpace& sp, const Tolerance& t, const SearchBudget& b,
                  int block_size, std::set<std::vector<int>>* out)
      : s(sp), tol(t), budget(b), n(sp.size()), k(block_size), keys(out),
        used(static_cast<std::size_t>(sp.size()), false) {}

  void run() { recurse(); }

  void recurse() {
    if (++nodes > budget.max_nodes) {
      complete = false;
      return;
    }
    int first = -1;
    for (int p = 0; p < n; ++p) {
      if (!used[static_cast<std::size_t>(p)]) {
        first = p;
        break;
      }
    }
    if (first < 0) {
      try_partition();
      return;
    }
    std::vector<int> block{first};
    used[static_cast<std::size_t>(first)] = true;
    choose(block, first + 1);
    used[static_cast<std::size_t>(first)] = false;
  }

  void choose(std::vector<int>& block, int next) {
    if (!complete) return;
    if (static_cast<int>(block.size()) == k) {
      blocks.push_back(block);
      recurse();
      blocks.pop_back();
      return;
    }
    const int need = k - static_cast<int>(block.size());
    for (int p = next; p + need <= n; ++p) {
      if (used[static_cast<std::size_t>(p)]) continue;
      used[static_cast<std::size_t>(p)] = true;
      block.push_back(p);
      choose(block, p + 1);
      block.pop_back();
      used[static_cast<std::size_t>(p)] = false;
    }
  }

  void try_partition() {
    auto fs = derive_matchings(s, blocks, tol);
    if (!fs) return;
    AssembleResult res = assemble_from_fibers(s, *fs, tol);
    if (res.ok) keys->insert(witness_canonical_key(res.witness));
  }
};

}  // namespace

WitnessList enumerate_witnesses_bruteforce(const FiniteMetricSpace& s, const Tolerance& tol,
                                           const SearchBudget& budget) {
  WitnessList out;
  const int n = s.size();
  if (n > budget.max_points) {
    out.complete = false;
    out.note = "point budget exceeded";
    return out;
  }
  if (n < 4) return out;
  std::set<std::vector<int>> keys;
  for (int k : proper_divisors(n)) {
    PartitionSearch search(s, tol, budget, k, &keys);
    search.run();
    if (!search.complete) {
      out.complete = false;
      out.note = "node budget exceeded";
    }
  }
  for (const auto& key : keys) out.witnesses.push_back(witness_from_key(key));
  return out;
}

namespace {

using Coordinates = std::vector<std::vector<int>>;

std::vector<int> renumber(const std::vector<int>& v) {
  std::vector<int> map(v.size(), -1);
  std::vector<int> out(v.size());
  int next = 0;
  for (std::size_t p = 0; p < v.size(); ++p) {
    int& m = map[static_cast<std::size_t>(v[p])];
    if (m < 0) m = next++;
    out[p] = m;
  }
  return out;
}

Coordinates canonical_coords(Coordinates coords) {
  for (auto& c : coords) c = renumber(c);
  std::sort(coords.begin(), coords.end());
  return coords;
}

int coord_count(const std::vector<int>& c) {
  return 1 + *std::max_element(c.begin(), c.end());
}

// metric on the coordinate values of factor f, read along the fiber through point 0
FiniteMetricSpace factor_space(const FiniteMetricSpace& s, const Coordinates& coords, std::size_t f) {
  const int m = coord_count(coords[f]);
  std::vector<int> rep(static_cast<std::size_t>(m), -1);
  for (int p = 0; p < s.size(); ++p) {
    bool on_fiber = true;
    for (std::size_t g = 0; g < coords.size(); ++g) {
      if (g != f && coords[g][static_cast<std::size_t>(p)] != coords[g][0]) {
        on_fiber = false;
        break;
      }
    }
    if (on_fiber) rep[static_cast<std::size_t>(coords[f][static_cast<std::size_t>(p)])] = p;
  }
  std::vector<std::string> labels;
  Matrix d(m, m);
  for (int a = 0; a < m; ++a) {
    labels.push_back(s.label(rep[static_cast<std::size_t>(a)]));
    for (int b = 0; b < m; ++b) {
      d(a, b) = s(rep[static_cast<std::size_t>(a)], rep[static_cast<std::size_t>(b)]);
    }
  }
  return FiniteMetricSpace(std::move(labels), std::move(d));
}

struct Refinery {
  const FiniteMetricSpace& s;
  const Tolerance& tol;
  const SearchBudget& budget;
  bool complete = true;
  std::set<Coordinates> visited;
  std::vector<Coordinates> terminals;

  void expand(const Coordinates& coords) {
    if (!visited.insert(canonical_coords(coords)).second) return;
    bool any = false;
    for (std::size_t f = 0; f < coords.size(); ++f) {
      if (coord_count(coords[f]) < 4) continue;  // no nontrivial split below 2x2
      FiniteMetricSpace fs = factor_space(s, coords, f);
      WitnessList wl = enumerate_witnesses(fs, tol, budget);
      if (!wl.complete) complete = false;
      for (const auto& w : wl.witnesses) {
        Coordinates refined;
        for (std::size_t g = 0; g < coords.size(); ++g) {
          if (g == f) continue;
          refined.push_back(coords[g]);
        }
        std::vector<int> ya(coords[f].size()), ba(coords[f].size());
        for (std::size_t p = 0; p < coords[f].size(); ++p) {
          ya[p] = w.y_index[static_cast<std::size_t>(coords[f][p])];
          ba[p] = w.ybar_index[static_cast<std::size_t>(coords[f][p])];
        }
        refined.push_back(std::move(ya));
        refined.push_back(std::move(ba));
        any = true;
        expand(refined);
      }
    }
    if (!any) {
      Coordinates canon = canonical_coords(coords);
      if (std::find(terminals.begin(), terminals.end(), canon) == terminals.end()) {
        terminals.push_back(canon);
      }
    }
  }
};

// factor fibers through point 0, as sorted point sets, for uniqueness matching
std::set<std::vector<int>> fibers_through_base(const FiniteMetricSpace& s, const Coordinates& coords) {
  std::set<std::vector<int>> out;
  for (std::size_t f = 0; f < coords.size(); ++f) {
    std::vector<int> fiber;
    for (int p = 0; p < s.size(); ++p) {
      bool on = true;
      for (std::size_t g = 0; g < coords.size(); ++g) {
        if (g != f && coords[g][static_cast<std::size_t>(p)] != coords[g][0]) {
          on = false;
          break;
        }
      }
      if (on) fiber.push_back(p);
    }
    out.insert(std::move(fiber));
  }
  return out;
}

}  // namespace

FactorizationReport factorize(const FiniteMetricSpace& s, const Tolerance& tol,
                              const SearchBudget& budget) {
  FactorizationReport rep;
  const int n = s.size();
  if (n > budget.max_points) {
    rep.coordinates = {std::vector<int>(static_cast<std::size_t>(n))};
    for (int p = 0; p < n; ++p) rep.coordinates[0][static_cast<std::size_t>(p)] = p;
    rep.factors.push_back(s);
    rep.irreducible_flags.push_back(false);
    rep.complete = false;
    rep.note = "point budget exceeded";
    return rep;
  }
  if (n == 1) {
    rep.note = "single point: empty factor list";
    return rep;
  }

  Coordinates start{std::vector<int>(static_cast<std::size_t>(n))};
  for (int p = 0; p < n; ++p) start[0][static_cast<std::size_t>(p)] = p;

  Refinery refinery{s, tol, budget};
  refinery.expand(start);
  rep.complete = refinery.complete;
  if (!rep.complete) rep.note = "search budget exceeded";

  std::sort(refinery.terminals.begin(), refinery.terminals.end());
  rep.coordinates = refinery.terminals.front();
  for (std::size_t f = 0; f < rep.coordinates.size(); ++f) {
    rep.factors.push_back(factor_space(s, rep.coordinates, f));
    // a terminal factor admitted no witness; certified only by a complete search
    rep.irreducible_flags.push_back(rep.complete);
  }

  auto base_fibers = fibers_through_base(s, rep.coordinates);
  for (std::size_t t = 1; t < refinery.terminals.size(); ++t) {
    if (fibers_through_base(s, refinery.terminals[t]) != base_fibers) {
      rep.unique = false;
      rep.alternatives.push_back(refinery.terminals[t]);
    }
  }
  return rep;
}

IsometryList isometry_group(const FiniteMetricSpace& s, const Tolerance& tol,
                            const SearchBudget& budget) {
  IsometryList out;
  const int n = s.size();
  std::vector<int> map(static_cast<std::size_t>(n), -1);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  long nodes = 0;

  // profile prefilter: sorted distance rows must agree
  std::vector<std::vector<double>> profile(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) profile[static_cast<std::size_t>(p)].push_back(s(p, q));
    std::sort(profile[static_cast<std::size_t>(p)].begin(), profile[static_cast<std::size_t>(p)].end());
  }
  auto profile_match = [&](int a, int b) {
    for (int i = 0; i < n; ++i) {
      if (std::abs(profile[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] -
                   profile[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)]) > tol.metric) {
        return false;
      }
    }
    return true;
  };

  std::function<void(int)> rec = [&](int t) {
    if (!out.complete) return;
    if (++nodes > budget.max_nodes) {
      out.complete = false;
      return;
    }
    if (t == n) {
      out.perms.push_back(map);
      if (static_cast<long>(out.perms.size()) > budget.max_group) out.complete = false;
      return;
    }
    for (int c = 0; c < n; ++c) {
      if (used[static_cast<std::size_t>(c)] || !profile_match(t, c)) continue;
      bool fits = true;
      for (int j = 0; j < t; ++j) {
        if (std::abs(s(t, j) - s(c, map[static_cast<std::size_t>(j)])) > tol.metric) {
          fits = false;
          break;
        }
      }
      if (!fits) continue;
      map[static_cast<std::size_t>(t)] = c;
      used[static_cast<std::size_t>(c)] = true;
      rec(t + 1);
      used[static_cast<std::size_t>(c)] = false;
    }
  };
  rec(0);
  return out;
}

IsometryGroupReport verify_exact_sequence(const FiniteMetricSpace& s,
                                          const FactorizationReport& rep, const Tolerance& tol,
                                          const SearchBudget& budget) {
  IsometryGroupReport out;
  if (!rep.unique) {
    out.reason = "factorization is not unique; sequence not defined";
    return out;
  }
  if (!rep.complete) {
    out.reason = "factorization incomplete under budget";
    return out;
  }
  IsometryList iso = isometry_group(s, tol, budget);
  if (!iso.complete) {
    out.reason = "isometry enumeration exceeded budget";
    return out;
  }
  out.order = static_cast<long>(iso.perms.size());
  out.generators = iso.perms;

  const std::size_t m = rep.factors.size();
  for (const auto& factor : rep.factors) {
    IsometryList fi = isometry_group(factor, tol, budget);
    if (!fi.complete) {
      out.reason = "factor isometry enumeration exceeded budget";
      return out;
    }
    out.factor_group_order *= static_cast<long>(fi.perms.size());
  }

  // permutations allowed on isometric factors only
  std::vector<int> klass(m, -1);
  int nclasses = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (klass[i] >= 0) continue;
    klass[i] = nclasses++;
    for (std::size_t j = i + 1; j < m; ++j) {
      if (klass[j] < 0 && find_isometry(rep.factors[i], rep.factors[j], tol)) klass[j] = klass[i];
    }
  }
  for (int c = 0; c < nclasses; ++c) {
    long size = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (klass[i] == c) ++size;
    }
    for (long v = 2; v <= size; ++v) out.permutation_group_order *= v;
  }

  out.exact = out.order == out.factor_group_order * out.permutation_group_order;

  // kernel characterization at base point 0
  out.kernel_trivial = true;
  for (const auto& g : iso.perms) {
    if (g[0] != 0) continue;
    bool fixes_fibers = true;
    for (std::size_t f = 0; f < m && fixes_fibers; ++f) {
      for (int p = 0; p < s.size(); ++p) {
        bool on = true;
        for (std::size_t h = 0; h < m; ++h) {
          if (h != f && rep.coordinates[h][static_cast<std::size_t>(p)] != rep.coordinates[h][0]) {
            on = false;
            break;
          }
        }
        if (on && g[static_cast<std::size_t>(p)] != p) {
          fixes_fibers = false;
          break;
        }
      }
    }
    if (!fixes_fibers) continue;
    bool identity = true;
    for (int p = 0; p < s.size(); ++p) {
      if (g[static_cast<std::size_t>(p)] != p) {
        identity = false;
        break;
      }
    }
    if (!identity) {
      out.kernel_trivial = false;
      out.kernel_counterexample = g;
      break;
    }
  }

  out.ok = out.exact && out.kernel_trivial;
  if (!out.ok && out.reason.empty()) {
    out.reason = out.exact ? "kernel contains a nontrivial fiber-fixing isometry"
                           : "group order does not match the factor data";
  }
  return out;
}

}  // namespace derham
