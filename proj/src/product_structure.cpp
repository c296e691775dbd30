#include "derham/product_structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace derham {

namespace {

std::vector<std::vector<int>> grid_of(const ProductWitness& w) {
  std::vector<std::vector<int>> g(static_cast<std::size_t>(w.y_count),
                                  std::vector<int>(static_cast<std::size_t>(w.ybar_count), -1));
  for (std::size_t p = 0; p < w.y_index.size(); ++p) {
    const int i = w.y_index[p], j = w.ybar_index[p];
    if (i < 0 || i >= w.y_count || j < 0 || j >= w.ybar_count) return {};
    if (g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] != -1) return {};
    g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = static_cast<int>(p);
  }
  return g;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      a = parent[static_cast<std::size_t>(a)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
    }
    return a;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

}  // namespace

int point_at(const ProductWitness& w, int i, int j) {
  for (std::size_t p = 0; p < w.y_index.size(); ++p) {
    if (w.y_index[p] == i && w.ybar_index[p] == j) return static_cast<int>(p);
  }
  return -1;
}

WitnessCheck check_witness(const FiniteMetricSpace& s, const ProductWitness& w,
                           const Tolerance& tol) {
  WitnessCheck res;
  const int n = s.size();
  if (static_cast<int>(w.y_index.size()) != n || static_cast<int>(w.ybar_index.size()) != n) {
    res.reason = "index vectors do not match the point count";
    return res;
  }
  if (w.y_count < 1 || w.ybar_count < 1 || w.y_count * w.ybar_count != n) {
    res.reason = "factor sizes do not multiply to the point count";
    return res;
  }
  auto grid = grid_of(w);
  if (grid.empty()) {
    res.reason = "assignment is not a bijection onto the grid";
    return res;
  }

  // representative factor metrics, squared; any parallel read that disagrees
  // shows up as a residual on the corresponding mixed pair
  const Matrix d2 = s.squared();
  Matrix y2(w.y_count, w.y_count), b2(w.ybar_count, w.ybar_count);
  for (int i = 0; i < w.y_count; ++i) {
    for (int k = 0; k < w.y_count; ++k) {
      y2(i, k) = d2(grid[static_cast<std::size_t>(i)][0], grid[static_cast<std::size_t>(k)][0]);
    }
  }
  for (int j = 0; j < w.ybar_count; ++j) {
    for (int l = 0; l < w.ybar_count; ++l) {
      b2(j, l) = d2(grid[0][static_cast<std::size_t>(j)], grid[0][static_cast<std::size_t>(l)]);
    }
  }
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      const double want = y2(w.y_index[static_cast<std::size_t>(p)], w.y_index[static_cast<std::size_t>(q)]) +
                          b2(w.ybar_index[static_cast<std::size_t>(p)], w.ybar_index[static_cast<std::size_t>(q)]);
      const double r = std::abs(d2(p, q) - want);
      if (r > res.worst_residual) {
        res.worst_residual = r;
        res.worst_pair = {p, q};
      }
    }
  }
  res.ok = res.worst_residual <= tol.sq;
  if (!res.ok) res.reason = "squared-distance split violated";
  return res;
}

InducedFactors induced_factors(const FiniteMetricSpace& s, const ProductWitness& w,
                               const Tolerance& tol) {
  InducedFactors out;
  WitnessCheck chk = check_witness(s, w, tol);
  if (!chk.ok) {
    out.reason = chk.reason.empty() ? "witness rejected" : chk.reason;
    out.worst_inconsistency = chk.worst_residual;
    out.offending_pair = chk.worst_pair;
    return out;
  }
  auto grid = grid_of(w);

  // cross-check every parallel copy before committing to representative reads
  for (int i = 0; i < w.y_count; ++i) {
    for (int k = i + 1; k < w.y_count; ++k) {
      const double ref = s(grid[static_cast<std::size_t>(i)][0], grid[static_cast<std::size_t>(k)][0]);
      for (int j = 1; j < w.ybar_count; ++j) {
        const double v = s(grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                           grid[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]);
        const double spread = std::abs(v - ref);
        if (spread > out.worst_inconsistency) {
          out.worst_inconsistency = spread;
          out.offending_pair = {grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                                grid[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]};
        }
      }
    }
  }
  for (int j = 0; j < w.ybar_count; ++j) {
    for (int l = j + 1; l < w.ybar_count; ++l) {
      const double ref = s(grid[0][static_cast<std::size_t>(j)], grid[0][static_cast<std::size_t>(l)]);
      for (int i = 1; i < w.y_count; ++i) {
        const double v = s(grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                           grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)]);
        const double spread = std::abs(v - ref);
        if (spread > out.worst_inconsistency) {
          out.worst_inconsistency = spread;
          out.offending_pair = {grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                                grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)]};
        }
      }
    }
  }
  if (out.worst_inconsistency > tol.metric) {
    out.reason = "inconsistent fiber metrics";
    return out;
  }

  std::vector<std::string> ylab, blab;
  Matrix ymat(w.y_count, w.y_count), bmat(w.ybar_count, w.ybar_count);
  for (int i = 0; i < w.y_count; ++i) {
    ylab.push_back(s.label(grid[static_cast<std::size_t>(i)][0]));
    for (int k = 0; k < w.y_count; ++k) {
      ymat(i, k) = s(grid[static_cast<std::size_t>(i)][0], grid[static_cast<std::size_t>(k)][0]);
    }
  }
  for (int j = 0; j < w.ybar_count; ++j) {
    blab.push_back(s.label(grid[0][static_cast<std::size_t>(j)]));
    for (int l = 0; l < w.ybar_count; ++l) {
      bmat(j, l) = s(grid[0][static_cast<std::size_t>(j)], grid[0][static_cast<std::size_t>(l)]);
    }
  }
  out.ok = true;
  out.y = FiniteMetricSpace(std::move(ylab), std::move(ymat));
  out.ybar = FiniteMetricSpace(std::move(blab), std::move(bmat));
  return out;
}

std::optional<FiberSystem> derive_matchings(const FiniteMetricSpace& s,
                                            std::vector<std::vector<int>> fibers,
                                            const Tolerance& tol) {
  FiberSystem fs;
  fs.fibers = std::move(fibers);
  const int m = static_cast<int>(fs.fibers.size());
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      const auto& fi = fs.fibers[static_cast<std::size_t>(i)];
      const auto& fj = fs.fibers[static_cast<std::size_t>(j)];
      if (fi.size() != fj.size()) return std::nullopt;
      std::vector<int> match(fi.size(), -1);
      std::vector<bool> taken(fj.size(), false);
      for (std::size_t p = 0; p < fi.size(); ++p) {
        int best = -1;
        double bestd = 0;
        bool tie = false;
        for (std::size_t q = 0; q < fj.size(); ++q) {
          const double d = s(fi[p], fj[q]);
          if (best < 0 || d < bestd - tol.metric) {
            best = static_cast<int>(q);
            bestd = d;
            tie = false;
          } else if (d < bestd + tol.metric) {
            tie = true;
          }
        }
        if (tie || best < 0 || taken[static_cast<std::size_t>(best)]) return std::nullopt;
        taken[static_cast<std::size_t>(best)] = true;
        match[p] = best;
      }
      fs.matchings[{i, j}] = std::move(match);
    }
  }
  return fs;
}

AssembleResult assemble_from_fibers(const FiniteMetricSpace& s, const FiberSystem& fs,
                                    const Tolerance& tol) {
  AssembleResult out;
  const int m = static_cast<int>(fs.fibers.size());
  if (m == 0) {
    out.error = "no fibers";
    return out;
  }
  const std::size_t k = fs.fibers[0].size();
  if (k == 0) {
    out.error = "empty fiber";
    return out;
  }
  for (const auto& f : fs.fibers) {
    if (f.size() != k) {
      out.error = "fiber sizes differ";
      return out;
    }
    for (int p : f) {
      if (p < 0 || p >= s.size()) {
        out.error = "fiber point out of range";
        return out;
      }
    }
  }

  auto matching = [&fs](int i, int j) -> const std::vector<int>* {
    auto it = fs.matchings.find({i, j});
    return it == fs.matchings.end() ? nullptr : &it->second;
  };
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      const auto* pm = matching(i, j);
      if (!pm) {
        out.error = "missing matching";
        out.offending = {i, j};
        return out;
      }
      if (pm->size() != k) {
        out.error = "matching has wrong length";
        out.offending = {i, j};
        return out;
      }
      std::vector<bool> seen(k, false);
      for (int q : *pm) {
        if (q < 0 || static_cast<std::size_t>(q) >= k || seen[static_cast<std::size_t>(q)]) {
          out.error = "matching is not a bijection";
          out.offending = {i, j};
          return out;
        }
        seen[static_cast<std::size_t>(q)] = true;
      }
    }
  }

  // inverse and composition laws are exact index identities
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      const auto& pij = *matching(i, j);
      const auto& pji = *matching(j, i);
      for (std::size_t p = 0; p < k; ++p) {
        if (pji[static_cast<std::size_t>(pij[p])] != static_cast<int>(p)) {
          out.error = "inverse law fails";
          out.offending = {i, j, static_cast<int>(p)};
          return out;
        }
      }
      for (int l = 0; l < m; ++l) {
        if (l == i || l == j) continue;
        const auto& pjl = *matching(j, l);
        const auto& pil = *matching(i, l);
        for (std::size_t p = 0; p < k; ++p) {
          if (pjl[static_cast<std::size_t>(pij[p])] != pil[p]) {
            out.error = "composition law fails";
            out.offending = {i, j, l, static_cast<int>(p)};
            return out;
          }
        }
      }
    }
  }

  // the squared-distance split across every fiber pair
  const Matrix d2 = s.squared();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      const auto& fi = fs.fibers[static_cast<std::size_t>(i)];
      const auto& fj = fs.fibers[static_cast<std::size_t>(j)];
      const auto& pij = *matching(i, j);
      for (std::size_t p = 0; p < k; ++p) {
        const int x = fi[p];
        const int px = fj[static_cast<std::size_t>(pij[p])];
        for (std::size_t q = 0; q < k; ++q) {
          const int xb = fj[q];
          const double r = std::abs(d2(x, xb) - d2(x, px) - d2(px, xb));
          out.worst_residual = std::max(out.worst_residual, r);
          if (r > tol.sq) {
            out.error = "squared-distance split fails";
            out.offending = {i, j, x, xb};
            return out;
          }
        }
      }
    }
  }

  // base distances must not depend on the probe point
  Matrix base_d = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const auto& fi = fs.fibers[static_cast<std::size_t>(i)];
      const auto& fj = fs.fibers[static_cast<std::size_t>(j)];
      const auto& pij = *matching(i, j);
      const double ref = s(fi[0], fj[static_cast<std::size_t>(pij[0])]);
      for (std::size_t p = 1; p < k; ++p) {
        const double v = s(fi[p], fj[static_cast<std::size_t>(pij[p])]);
        if (std::abs(v - ref) > tol.metric) {
          out.error = "base distance depends on the point";
          out.offending = {i, j, static_cast<int>(p)};
          return out;
        }
      }
      base_d(i, j) = base_d(j, i) = ref;
    }
  }

  // merge zero-distance fibers; they must coincide as subsets
  UnionFind uf(m);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      if (base_d(i, j) <= tol.metric) uf.unite(i, j);
    }
  }
  std::vector<int> class_rep;
  out.fiber_class.assign(static_cast<std::size_t>(m), -1);
  for (int i = 0; i < m; ++i) {
    if (uf.find(i) == i) {
      out.fiber_class[static_cast<std::size_t>(i)] = static_cast<int>(class_rep.size());
      class_rep.push_back(i);
    }
  }
  for (int i = 0; i < m; ++i) {
    out.fiber_class[static_cast<std::size_t>(i)] = out.fiber_class[static_cast<std::size_t>(uf.find(i))];
  }
  const int r = static_cast<int>(class_rep.size());
  for (int i = 0; i < m; ++i) {
    const int rep = class_rep[static_cast<std::size_t>(out.fiber_class[static_cast<std::size_t>(i)])];
    if (rep == i) continue;
    auto a = fs.fibers[static_cast<std::size_t>(i)];
    auto b = fs.fibers[static_cast<std::size_t>(rep)];
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) {
      out.error = "zero-distance fibers differ as subsets";
      out.offending = {i, rep};
      return out;
    }
  }

  // merged classes must partition the space
  std::vector<int> owner(static_cast<std::size_t>(s.size()), -1);
  for (int c = 0; c < r; ++c) {
    for (int p : fs.fibers[static_cast<std::size_t>(class_rep[static_cast<std::size_t>(c)])]) {
      if (owner[static_cast<std::size_t>(p)] != -1) {
        out.error = "fibers overlap at positive distance";
        out.offending = {owner[static_cast<std::size_t>(p)], c, p};
        return out;
      }
      owner[static_cast<std::size_t>(p)] = c;
    }
  }
  for (int p = 0; p < s.size(); ++p) {
    if (owner[static_cast<std::size_t>(p)] < 0) {
      out.error = "fibers do not cover the space";
      out.offending = {p};
      return out;
    }
  }

  // witness: Y = fiber of class o (the class of fiber 0), Ybar = merged base
  const int oc = out.fiber_class[0];
  const int orep = class_rep[static_cast<std::size_t>(oc)];
  ProductWitness w;
  w.y_count = static_cast<int>(k);
  w.ybar_count = r;
  w.y_index.assign(static_cast<std::size_t>(s.size()), -1);
  w.ybar_index.assign(static_cast<std::size_t>(s.size()), -1);
  for (int c = 0; c < r; ++c) {
    const int frep = class_rep[static_cast<std::size_t>(c)];
    const auto& f = fs.fibers[static_cast<std::size_t>(frep)];
    const std::vector<int>* to_o = frep == orep ? nullptr : matching(frep, orep);
    for (std::size_t p = 0; p < k; ++p) {
      const int x = f[p];
      w.y_index[static_cast<std::size_t>(x)] = to_o ? (*to_o)[p] : static_cast<int>(p);
      w.ybar_index[static_cast<std::size_t>(x)] = c;
    }
  }

  WitnessCheck chk = check_witness(s, w, tol);
  out.worst_residual = std::max(out.worst_residual, chk.worst_residual);
  if (!chk.ok) {
    out.error = "assembled witness fails validation: " + chk.reason;
    return out;
  }

  std::vector<std::string> blab;
  Matrix bmat(r, r);
  const auto& fo = fs.fibers[static_cast<std::size_t>(orep)];
  for (int c = 0; c < r; ++c) {
    const int frep = class_rep[static_cast<std::size_t>(c)];
    const std::vector<int>* from_o = frep == orep ? nullptr : matching(orep, frep);
    const int anchor = from_o ? fs.fibers[static_cast<std::size_t>(frep)][static_cast<std::size_t>((*from_o)[0])]
                              : fo[0];
    blab.push_back(s.label(anchor));
    for (int c2 = 0; c2 < r; ++c2) {
      bmat(c, c2) = base_d(frep, class_rep[static_cast<std::size_t>(c2)]);
    }
  }
  out.base = FiniteMetricSpace(std::move(blab), std::move(bmat));
  out.witness = std::move(w);
  out.ok = true;
  return out;
}

namespace {

std::vector<int> fiber_through(const ProductWitness& w, int x, bool y_fiber) {
  // y_fiber: points sharing x's ybar coordinate (a copy of Y); else the Ybar copy
  std::vector<int> out;
  for (std::size_t p = 0; p < w.y_index.size(); ++p) {
    if (y_fiber ? w.ybar_index[p] == w.ybar_index[static_cast<std::size_t>(x)]
                : w.y_index[p] == w.y_index[static_cast<std::size_t>(x)]) {
      out.push_back(static_cast<int>(p));
    }
  }
  return out;
}

}  // namespace

InterbaseReport check_interbase(const FiniteMetricSpace& s, const ProductWitness& w1,
                                const ProductWitness& w2, int x, const Tolerance& tol) {
  InterbaseReport rep;
  if (x < 0 || x >= s.size()) throw std::out_of_range("check_interbase: bad point index");
  if (!check_witness(s, w1, tol).ok || !check_witness(s, w2, tol).ok) {
    rep.reason = "witness validation failed";
    return rep;
  }
  const auto grid2 = grid_of(w2);
  const auto yx = fiber_through(w1, x, true);
  const auto ybarx = fiber_through(w1, x, false);
  const auto zx = fiber_through(w2, x, true);
  std::vector<int> fx;
  std::set_intersection(yx.begin(), yx.end(), zx.begin(), zx.end(), std::back_inserter(fx));

  const int xbar2 = w2.ybar_index[static_cast<std::size_t>(x)];
  auto proj_z = [&](int p) {
    return grid2[static_cast<std::size_t>(w2.y_index[static_cast<std::size_t>(p)])]
                [static_cast<std::size_t>(xbar2)];
  };

  const Matrix d2 = s.squared();
  for (int p : ybarx) {
    const int pp = proj_z(p);
    for (int q : fx) {
      const double r = std::abs(d2(pp, q) - d2(pp, x) - d2(x, q));
      if (r > rep.worst_residual) {
        rep.worst_residual = r;
        rep.worst_pair = {p, q};
      }
    }
  }
  rep.ok = rep.worst_residual <= tol.sq;
  if (!rep.ok) rep.reason = "interbase identity violated";
  return rep;
}

Slope slope(const FiniteMetricSpace& s, const ProductWitness& w, int x, int z) {
  const double d = s(x, z);
  if (d <= 0) throw std::invalid_argument("slope: zero-distance pair");
  const int corner = point_at(w, w.y_index[static_cast<std::size_t>(x)],
                              w.ybar_index[static_cast<std::size_t>(z)]);
  if (corner < 0) throw std::invalid_argument("slope: witness has no grid corner");
  return Slope{s(corner, z) / d, s(x, corner) / d};
}

bool is_rectangular(const ProductWitness& w, const std::vector<int>& subset) {
  std::set<int> is, js;
  std::set<std::pair<int, int>> cells;
  for (int p : subset) {
    const int i = w.y_index[static_cast<std::size_t>(p)];
    const int j = w.ybar_index[static_cast<std::size_t>(p)];
    is.insert(i);
    js.insert(j);
    cells.insert({i, j});
  }
  if (cells.size() != subset.size()) return false;  // repeated points
  return cells.size() == is.size() * js.size();
}

PropertyOReport check_property_O(const FiniteMetricSpace& s, const ProductWitness& w_yz,
                                 const ProductWitness& w_zz, int x, const Tolerance& tol) {
  PropertyOReport rep;
  if (x < 0 || x >= s.size()) throw std::out_of_range("check_property_O: bad point index");
  if (!check_witness(s, w_yz, tol).ok || !check_witness(s, w_zz, tol).ok) {
    rep.reason = "witness validation failed";
    return rep;
  }
  const auto grid2 = grid_of(w_zz);
  const int xbar2 = w_zz.ybar_index[static_cast<std::size_t>(x)];
  auto proj_z = [&](int p) {
    return grid2[static_cast<std::size_t>(w_zz.y_index[static_cast<std::size_t>(p)])]
                [static_cast<std::size_t>(xbar2)];
  };
  auto fiber_inter = [&](int p) {
    // F_p = Y_p n Z_p, sorted point indices
    auto yp = fiber_through(w_yz, p, true);
    auto zp = fiber_through(w_zz, p, true);
    std::vector<int> f;
    std::set_intersection(yp.begin(), yp.end(), zp.begin(), zp.end(), std::back_inserter(f));
    return f;
  };

  const auto fx = fiber_inter(x);
  std::set<int> ys;
  for (int q : fx) ys.insert(w_yz.y_index[static_cast<std::size_t>(q)]);

  // T = P^Y(F_x) x Ybar; representatives of its distinct Y-fibers
  std::vector<int> treps;
  std::vector<int> tpoints;
  for (int p = 0; p < s.size(); ++p) {
    if (ys.count(w_yz.y_index[static_cast<std::size_t>(p)])) tpoints.push_back(p);
  }
  {
    std::set<int> seen_bars;
    // x's own fiber first so the assembled Y factor is P^Z(F_x)
    seen_bars.insert(w_yz.ybar_index[static_cast<std::size_t>(x)]);
    treps.push_back(x);
    for (int p : tpoints) {
      if (seen_bars.insert(w_yz.ybar_index[static_cast<std::size_t>(p)]).second) treps.push_back(p);
    }
  }

  // project each F_p into Z_x; drop duplicate images (parallel fibers can agree)
  std::vector<std::vector<int>> images;
  std::vector<std::vector<int>> sources;  // the F_p lists, aligned with images
  std::set<std::vector<int>> seen;
  for (int p : treps) {
    auto fp = fiber_inter(p);
    if (fp.size() != fx.size()) {
      rep.reason = "parallel fiber intersections have unequal sizes";
      return rep;
    }
    std::vector<int> img;
    img.reserve(fp.size());
    for (int u : fp) img.push_back(proj_z(u));
    auto key = img;
    std::sort(key.begin(), key.end());
    if (std::unique(key.begin(), key.end()) != key.end()) {
      rep.reason = "projection collapses a fiber intersection";
      return rep;
    }
    if (seen.insert(key).second) {
      images.push_back(std::move(img));
      sources.push_back(std::move(fp));
    }
  }

  // restriction of the space to P^Z(T)
  std::vector<int> pzt;
  {
    std::set<int> acc;
    for (const auto& img : images) acc.insert(img.begin(), img.end());
    pzt.assign(acc.begin(), acc.end());
  }
  std::vector<int> local(static_cast<std::size_t>(s.size()), -1);
  for (std::size_t i = 0; i < pzt.size(); ++i) local[static_cast<std::size_t>(pzt[i])] = static_cast<int>(i);
  FiniteMetricSpace sub = s.restricted(pzt);

  // matchings via the w1-Ybar fibers: u in F_p pairs with the unique point of
  // F_q sharing its Y coordinate
  FiberSystem fsys;
  for (const auto& img : images) {
    std::vector<int> f;
    f.reserve(img.size());
    for (int u : img) f.push_back(local[static_cast<std::size_t>(u)]);
    fsys.fibers.push_back(std::move(f));
  }
  const int m = static_cast<int>(images.size());
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      std::vector<int> match(sources[static_cast<std::size_t>(i)].size(), -1);
      for (std::size_t p = 0; p < sources[static_cast<std::size_t>(i)].size(); ++p) {
        const int u = sources[static_cast<std::size_t>(i)][p];
        int hit = -1;
        for (std::size_t q = 0; q < sources[static_cast<std::size_t>(j)].size(); ++q) {
          if (w_yz.y_index[static_cast<std::size_t>(sources[static_cast<std::size_t>(j)][q])] ==
              w_yz.y_index[static_cast<std::size_t>(u)]) {
            if (hit != -1) {
              rep.reason = "matching construction hit a duplicate Y coordinate";
              return rep;
            }
            hit = static_cast<int>(q);
          }
        }
        if (hit < 0) {
          rep.reason = "matching construction found no partner";
          return rep;
        }
        match[p] = hit;
      }
      fsys.matchings[{i, j}] = std::move(match);
    }
  }

  Tolerance sub_tol = tol;
  AssembleResult asm_res = assemble_from_fibers(sub, fsys, sub_tol);
  rep.worst_residual = asm_res.worst_residual;
  rep.splits = asm_res.ok;
  if (!asm_res.ok) {
    rep.reason = "projected family does not assemble: " + asm_res.error;
    return rep;
  }

  // base factor must be P^Z(Ybar_x) with its induced metric
  std::vector<int> pz_ybar;
  {
    std::set<int> acc;
    for (int p : fiber_through(w_yz, x, false)) acc.insert(proj_z(p));
    pz_ybar.assign(acc.begin(), acc.end());
  }
  if (asm_res.base && static_cast<int>(pz_ybar.size()) == asm_res.base->size()) {
    FiniteMetricSpace target = s.restricted(pz_ybar);
    rep.base_matches = find_isometry(*asm_res.base, target, tol).has_value();
  }

  // surjectivity: P^Z(T) = Z_x
  const auto zx = fiber_through(w_zz, x, true);
  rep.surjective = pzt.size() == zx.size() && std::equal(pzt.begin(), pzt.end(), zx.begin());

  rep.ok = rep.splits && rep.base_matches && rep.surjective;
  if (!rep.ok && rep.reason.empty()) {
    rep.reason = !rep.base_matches ? "base factor does not match P^Z(Ybar_x)"
                                   : "projection does not fill the Z fiber";
  }
  return rep;
}

}  // namespace derham
