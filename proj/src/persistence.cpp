#include "regimescope/persistence.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <unordered_map>

namespace regimescope::ph {

namespace {

std::uint64_t pack_edge(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

// Z2 column addition: symmetric difference of two ascending index lists.
void add_column(std::vector<std::size_t>& col, const std::vector<std::size_t>& other) {
  std::vector<std::size_t> out;
  out.reserve(col.size() + other.size());
  std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                std::back_inserter(out));
  col.swap(out);
}

bool pair_less(const PersistencePair& a, const PersistencePair& b) {
  if (a.dim != b.dim) return a.dim < b.dim;
  if (a.birth != b.birth) return a.birth < b.birth;
  return a.death < b.death;
}

}  // namespace

std::size_t PersistenceDiagram::count(int dim) const {
  return static_cast<std::size_t>(
      std::count_if(pairs.begin(), pairs.end(), [dim](const auto& p) { return p.dim == dim; }));
}

std::vector<PersistencePair> PersistenceDiagram::dim_pairs(int dim) const {
  std::vector<PersistencePair> out;
  for (const auto& p : pairs)
    if (p.dim == dim) out.push_back(p);
  return out;
}

void sort_pairs(std::vector<PersistencePair>& pairs) {
  std::sort(pairs.begin(), pairs.end(), pair_less);
}

PersistenceDiagram persistence(const FilteredComplex& complex) {
  const auto& sx = complex.simplices;
  const std::size_t m = sx.size();

  // Filtration index of every vertex and edge, for boundary rows.
  std::vector<std::size_t> vertex_at(complex.num_points, 0);
  std::unordered_map<std::uint64_t, std::size_t> edge_at;
  for (std::size_t idx = 0; idx < m; ++idx) {
    const Simplex& s = sx[idx];
    if (s.dim == 0) {
      vertex_at[s.v[0]] = idx;
    } else if (s.dim == 1) {
      edge_at.emplace(pack_edge(s.v[0], s.v[1]), idx);
    }
  }

  std::vector<std::ptrdiff_t> pivot(m, -1);
  std::vector<char> cleared(m, 0);
  std::vector<char> paired(m, 0);
  std::vector<std::vector<std::size_t>> cols(m);

  auto reduce = [&](std::vector<std::size_t>& col) {
    while (!col.empty()) {
      const std::ptrdiff_t other = pivot[col.back()];
      if (other < 0) break;
      add_column(col, cols[static_cast<std::size_t>(other)]);
    }
  };

  std::vector<PersistencePair> out;

  // Triangle columns first; a pairing (edge, triangle) is an H1 class and
  // clears the edge column, which is then known to reduce to zero.
  for (std::size_t idx = 0; idx < m; ++idx) {
    if (sx[idx].dim != 2) continue;
    const auto& v = sx[idx].v;
    std::vector<std::size_t> col = {edge_at.at(pack_edge(v[0], v[1])),
                                    edge_at.at(pack_edge(v[0], v[2])),
                                    edge_at.at(pack_edge(v[1], v[2]))};
    std::sort(col.begin(), col.end());
    reduce(col);
    if (!col.empty()) {
      const std::size_t low = col.back();
      pivot[low] = static_cast<std::ptrdiff_t>(idx);
      cols[idx] = std::move(col);
      cleared[low] = 1;
      paired[low] = 1;
      paired[idx] = 1;
      const double birth = sx[low].value;
      const double death = sx[idx].value;
      if (death > birth) out.push_back({birth, death, 1});
    }
  }

  // Edge columns; a pairing (vertex, edge) is a finite H0 class, and an
  // uncleared edge reducing to zero is a cycle no triangle ever fills.
  for (std::size_t idx = 0; idx < m; ++idx) {
    if (sx[idx].dim != 1 || cleared[idx]) continue;
    const auto& v = sx[idx].v;
    std::vector<std::size_t> col = {vertex_at[v[0]], vertex_at[v[1]]};
    std::sort(col.begin(), col.end());
    reduce(col);
    if (!col.empty()) {
      const std::size_t low = col.back();
      pivot[low] = static_cast<std::ptrdiff_t>(idx);
      cols[idx] = std::move(col);
      paired[low] = 1;
      paired[idx] = 1;
      const double birth = sx[low].value;
      const double death = sx[idx].value;
      if (death > birth) out.push_back({birth, death, 0});
    } else {
      out.push_back({sx[idx].value, kInfiniteDeath, 1});
    }
  }

  // Unpaired vertices: components still alive at eps_max.
  for (std::size_t idx = 0; idx < m; ++idx) {
    if (sx[idx].dim == 0 && !paired[idx]) out.push_back({sx[idx].value, kInfiniteDeath, 0});
  }

  sort_pairs(out);
  return {std::move(out)};
}

PersistenceDiagram h0_union_find(const FilteredComplex& complex) {
  const std::size_t n = complex.num_points;
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);

  auto find = [&](std::uint32_t x) {
    std::uint32_t root = x;
    while (parent[root] != root) root = parent[root];
    while (parent[x] != root) {
      const std::uint32_t next = parent[x];
      parent[x] = root;
      x = next;
    }
    return root;
  };

  std::vector<PersistencePair> out;
  for (const Simplex& s : complex.simplices) {
    if (s.dim != 1) continue;
    std::uint32_t ra = find(s.v[0]);
    std::uint32_t rb = find(s.v[1]);
    if (ra == rb) continue;
    // Elder rule: all components are born at 0, so the tie-break keeps the
    // component whose representative entered the filtration first.
    if (rb < ra) std::swap(ra, rb);
    parent[rb] = ra;
    if (s.value > 0.0) out.push_back({0.0, s.value, 0});
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    if (find(i) == i) out.push_back({0.0, kInfiniteDeath, 0});
  }

  sort_pairs(out);
  return {std::move(out)};
}

}  // namespace regimescope::ph
