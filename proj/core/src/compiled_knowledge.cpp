#include "semcond/compiled_knowledge.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "semcond/errors.hpp"

namespace semcond {

namespace {

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Row x: every node excluded with x once exclusions are pushed down to all
// descendants. A set diagonal bit marks a node that can never be true.
BitMatrix dense_exclusion_matrix(const HexGraph& h, const BitMatrix& closure) {
  const std::size_t n = h.size();
  BitMatrix excl(n);
  for (const auto& [a, b] : h.exclusion()) {
    excl.set(a, b);
    excl.set(b, a);
  }
  BitMatrix desc_self = closure;
  for (std::size_t i = 0; i < n; ++i) desc_self.set(i, i);

  BitMatrix dense(n);
  BitMatrix partners(n);
  for (std::size_t x = 0; x < n; ++x) {
    partners.or_row(x, excl, x);
    for (std::size_t u = 0; u < n; ++u) {
      if (closure.test(u, x)) partners.or_row(x, excl, u);
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (partners.test(x, v)) dense.or_row(x, desc_self, v);
    }
  }
  return dense;
}

// Min-fill elimination on an undirected graph. Returns the maximal
// elimination cliques in elimination order.
std::vector<std::vector<std::size_t>> triangulate(std::size_t n, const std::vector<Edge>& edges) {
  BitMatrix adj(n);
  std::vector<std::set<std::size_t>> nbrs(n);
  for (const auto& [a, b] : edges) {
    adj.set(a, b);
    adj.set(b, a);
    nbrs[a].insert(b);
    nbrs[b].insert(a);
  }
  auto fill_of = [&](std::size_t v) {
    std::size_t fill = 0;
    for (auto i = nbrs[v].begin(); i != nbrs[v].end(); ++i) {
      for (auto j = std::next(i); j != nbrs[v].end(); ++j) {
        if (!adj.test(*i, *j)) ++fill;
      }
    }
    return fill;
  };

  std::vector<std::size_t> fill(n);
  for (std::size_t v = 0; v < n; ++v) fill[v] = fill_of(v);
  std::vector<bool> gone(n, false);
  std::vector<std::vector<std::size_t>> cliques;
  std::vector<std::vector<std::size_t>> cliques_of(n);

  for (std::size_t step = 0; step < n; ++step) {
    std::size_t v = n;
    for (std::size_t u = 0; u < n; ++u) {
      if (!gone[u] && (v == n || fill[u] < fill[v])) v = u;
    }
    std::vector<std::size_t> clique(nbrs[v].begin(), nbrs[v].end());
    clique.push_back(v);
    std::sort(clique.begin(), clique.end());
    if (clique.size() > kMaxCliqueSize) {
      throw TreewidthExceeded("junction tree clique of " + std::to_string(clique.size()) +
                              " variables exceeds the limit of " + std::to_string(kMaxCliqueSize));
    }

    const bool contained = std::any_of(cliques_of[v].begin(), cliques_of[v].end(), [&](std::size_t c) {
      return std::includes(cliques[c].begin(), cliques[c].end(), clique.begin(), clique.end());
    });
    if (!contained) {
      for (std::size_t x : clique) cliques_of[x].push_back(cliques.size());
      cliques.push_back(clique);
    }

    std::set<std::size_t> dirty(nbrs[v].begin(), nbrs[v].end());
    for (auto i = nbrs[v].begin(); i != nbrs[v].end(); ++i) {
      for (auto j = std::next(i); j != nbrs[v].end(); ++j) {
        if (!adj.test(*i, *j)) {
          adj.set(*i, *j);
          adj.set(*j, *i);
          nbrs[*i].insert(*j);
          nbrs[*j].insert(*i);
        }
      }
    }
    for (std::size_t u : nbrs[v]) {
      nbrs[u].erase(v);
      dirty.insert(nbrs[u].begin(), nbrs[u].end());
    }
    nbrs[v].clear();
    gone[v] = true;
    for (std::size_t u : dirty) {
      if (!gone[u]) fill[u] = fill_of(u);
    }
  }
  return cliques;
}

std::vector<std::size_t> intersect(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

// Maximum-weight spanning tree over clique intersections; components are
// joined to clique 0 through empty separators.
std::vector<std::vector<std::size_t>> spanning_tree(const std::vector<std::vector<std::size_t>>& cliques,
                                                    std::size_t n) {
  const std::size_t m = cliques.size();
  std::vector<std::vector<std::size_t>> containing(n);
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t v : cliques[c]) containing[v].push_back(c);
  }
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& list : containing) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      for (std::size_t j = i + 1; j < list.size(); ++j) pairs.emplace(list[i], list[j]);
    }
  }
  struct Candidate {
    std::size_t weight, a, b;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(pairs.size());
  for (const auto& [a, b] : pairs) candidates.push_back({intersect(cliques[a], cliques[b]).size(), a, b});
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    if (x.weight != y.weight) return x.weight > y.weight;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });

  std::vector<std::vector<std::size_t>> adj(m);
  DisjointSets sets(m);
  for (const auto& c : candidates) {
    if (sets.unite(c.a, c.b)) {
      adj[c.a].push_back(c.b);
      adj[c.b].push_back(c.a);
    }
  }
  for (std::size_t c = 1; c < m; ++c) {
    if (sets.unite(0, c)) {
      adj[0].push_back(c);
      adj[c].push_back(0);
    }
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

// All assignments of `vars` satisfying the dense constraints among them.
std::vector<std::uint32_t> valid_states(const std::vector<std::size_t>& vars, const BitMatrix& hier,
                                        const BitMatrix& excl) {
  const std::size_t s = vars.size();
  std::vector<std::uint32_t> out;
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0u, 0}};
  while (!stack.empty()) {
    auto [state, pos] = stack.back();
    stack.pop_back();
    if (pos == s) {
      out.push_back(state);
      continue;
    }
    const std::size_t v = vars[pos];
    // Extending with 0: a false node violates nothing unless one of its
    // already-assigned descendants is true.
    bool zero_ok = true;
    bool one_ok = !excl.test(v, v);
    for (std::size_t q = 0; q < pos; ++q) {
      const bool on = (state >> q) & 1u;
      const std::size_t u = vars[q];
      if (on && hier.test(v, u)) zero_ok = false;
      if (!on && hier.test(u, v)) one_ok = false;
      if (on && excl.test(u, v)) one_ok = false;
    }
    if (one_ok) stack.emplace_back(state | (1u << pos), pos + 1);
    if (zero_ok) stack.emplace_back(state, pos + 1);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint32_t project(std::uint32_t state, const std::vector<std::size_t>& positions) {
  std::uint32_t key = 0;
  for (std::size_t i = 0; i < positions.size(); ++i) key |= ((state >> positions[i]) & 1u) << i;
  return key;
}

std::vector<std::size_t> positions_of(const std::vector<std::size_t>& vars, const std::vector<std::size_t>& subset) {
  std::vector<std::size_t> pos;
  pos.reserve(subset.size());
  for (std::size_t v : subset) {
    pos.push_back(static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin()));
  }
  return pos;
}

std::string row_hex(const BitMatrix& m, std::size_t i) {
  std::string out;
  char buf[17];
  for (std::size_t w = 0; w < m.words_per_row(); ++w) {
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(m.row_words(i)[w]));
    out += buf;
  }
  return out;
}

void read_row_hex(BitMatrix& m, std::size_t i, const std::string& hex) {
  if (hex.size() != m.words_per_row() * 16) throw InputError("compiled matrix row has the wrong width");
  for (std::size_t w = 0; w < m.words_per_row(); ++w) {
    m.row_words(i)[w] = std::stoull(hex.substr(w * 16, 16), nullptr, 16);
  }
}

}  // namespace

CompiledKnowledge compile(const HexGraph& h) {
  const std::size_t n = h.size();
  CompiledKnowledge ck;
  ck.sig_ = Signature(n);
  ck.names_ = h.names();
  ck.source_hash_ = fnv1a_hex(h.to_json());
  ck.dense_hierarchy_ = h.ancestor_closure();
  ck.dense_exclusion_ = dense_exclusion_matrix(h, ck.dense_hierarchy_);
  ck.sparse_hierarchy_ = sparsify_hierarchy(h).hierarchy();

  const BitMatrix& excl = ck.dense_exclusion_;
  for (std::size_t x = 0; x < n; ++x) {
    if (excl.test(x, x)) ck.forced_false_.push_back(x);
  }
  const auto par = h.parents();
  for (std::size_t x = 0; x < n; ++x) {
    if (excl.test(x, x)) continue;
    for (std::size_t y = x + 1; y < n; ++y) {
      if (!excl.test(x, y) || excl.test(y, y)) continue;
      const bool implied = std::any_of(par[x].begin(), par[x].end(), [&](std::size_t p) { return excl.test(p, y); }) ||
                           std::any_of(par[y].begin(), par[y].end(), [&](std::size_t q) { return excl.test(x, q); });
      if (!implied) ck.sparse_exclusion_.emplace_back(x, y);
    }
  }

  std::vector<Edge> constraint_edges = ck.sparse_hierarchy_;
  constraint_edges.insert(constraint_edges.end(), ck.sparse_exclusion_.begin(), ck.sparse_exclusion_.end());
  const auto clique_vars = triangulate(n, constraint_edges);
  const auto adj = spanning_tree(clique_vars, n);

  JunctionTree& jt = ck.tree_;
  jt.cliques.resize(clique_vars.size());
  jt.root = 0;
  std::vector<bool> seen(clique_vars.size(), false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  while (!frontier.empty()) {
    const std::size_t c = frontier.front();
    frontier.pop();
    jt.schedule.push_back(c);
    for (std::size_t d : adj[c]) {
      if (seen[d]) continue;
      seen[d] = true;
      jt.cliques[d].parent = c;
      jt.cliques[c].children.push_back(d);
      frontier.push(d);
    }
  }

  std::vector<bool> owned(n, false);
  for (std::size_t c = 0; c < clique_vars.size(); ++c) {
    Clique& q = jt.cliques[c];
    q.vars = clique_vars[c];
    q.states = valid_states(q.vars, ck.dense_hierarchy_, excl);
    if (c != jt.root) q.separator = intersect(q.vars, clique_vars[q.parent]);
    for (std::size_t i = 0; i < q.vars.size(); ++i) {
      if (!owned[q.vars[i]]) {
        owned[q.vars[i]] = true;
        q.owned.push_back(i);
      }
    }
  }
  ck.build_separator_maps();
  return ck;
}

void CompiledKnowledge::build_separator_maps() {
  tree_.separator_maps.assign(tree_.cliques.size(), {});
  for (std::size_t c = 0; c < tree_.cliques.size(); ++c) {
    if (c == tree_.root) continue;
    const Clique& child = tree_.cliques[c];
    const Clique& parent = tree_.cliques[child.parent];
    const auto child_pos = positions_of(child.vars, child.separator);
    const auto parent_pos = positions_of(parent.vars, child.separator);
    SeparatorMap& map = tree_.separator_maps[c];
    std::unordered_map<std::uint32_t, std::uint32_t> ids;
    map.child_to_sep.reserve(child.states.size());
    for (std::uint32_t s : child.states) {
      auto [it, inserted] = ids.emplace(project(s, child_pos), static_cast<std::uint32_t>(ids.size()));
      map.child_to_sep.push_back(it->second);
    }
    map.count = ids.size();
    map.parent_to_sep.reserve(parent.states.size());
    for (std::uint32_t s : parent.states) {
      auto it = ids.find(project(s, parent_pos));
      map.parent_to_sep.push_back(it == ids.end() ? -1 : static_cast<std::int32_t>(it->second));
    }
  }
}

bool CompiledKnowledge::accepts(const LabelVector& y) const {
  if (y.size() != num_labels()) throw InputError("label vector length does not match the knowledge");
  for (const Clique& q : tree_.cliques) {
    std::uint32_t state = 0;
    for (std::size_t i = 0; i < q.vars.size(); ++i) {
      if (y[q.vars[i]]) state |= 1u << i;
    }
    if (!std::binary_search(q.states.begin(), q.states.end(), state)) return false;
  }
  return true;
}

std::size_t CompiledKnowledge::max_clique_size() const {
  std::size_t m = 0;
  for (const Clique& q : tree_.cliques) m = std::max(m, q.vars.size());
  return m;
}

std::size_t CompiledKnowledge::total_states() const {
  std::size_t t = 0;
  for (const Clique& q : tree_.cliques) t += q.states.size();
  return t;
}

std::string CompiledKnowledge::serialize() const {
  using nlohmann::json;
  json j;
  j["format"] = kCompiledFormat;
  j["version"] = kCompiledVersion;
  j["kind"] = "hex";
  j["signature"] = {{"k", num_labels()}, {"names", names_}};
  j["source_hash"] = source_hash_;
  auto edges = [](const std::vector<Edge>& es) {
    json arr = json::array();
    for (const auto& [a, b] : es) arr.push_back({a, b});
    return arr;
  };
  j["hierarchy_sparse"] = edges(sparse_hierarchy_);
  j["exclusion_sparse"] = edges(sparse_exclusion_);
  json hd = json::array(), ed = json::array();
  for (std::size_t i = 0; i < num_labels(); ++i) {
    hd.push_back(row_hex(dense_hierarchy_, i));
    ed.push_back(row_hex(dense_exclusion_, i));
  }
  j["hierarchy_dense"] = hd;
  j["exclusion_dense"] = ed;
  j["forced_false"] = forced_false_;
  json cliques = json::array();
  json separators = json::array();
  for (std::size_t c = 0; c < tree_.cliques.size(); ++c) {
    const Clique& q = tree_.cliques[c];
    cliques.push_back({{"vars", q.vars}, {"states", q.states}, {"owned", q.owned}});
    if (c != tree_.root) separators.push_back({{"child", c}, {"parent", q.parent}, {"vars", q.separator}});
  }
  j["cliques"] = cliques;
  j["separators"] = separators;
  j["schedule"] = {{"root", tree_.root}, {"order", tree_.schedule}};
  return j.dump();
}

CompiledKnowledge CompiledKnowledge::deserialize(const std::string& text) {
  using nlohmann::json;
  CompiledKnowledge ck;
  try {
    const json j = json::parse(text);
    if (j.at("format") != kCompiledFormat) throw InputError("not a compiled knowledge file");
    if (j.at("version") != kCompiledVersion) {
      throw InputError("unsupported compiled knowledge version " + j.at("version").dump());
    }
    if (j.at("kind") != "hex") throw InputError("compiled file does not hold a junction tree");
    const std::size_t n = j.at("signature").at("k").get<std::size_t>();
    ck.sig_ = Signature(n);
    ck.names_ = j.at("signature").at("names").get<std::vector<std::string>>();
    if (ck.names_.size() != n) throw InputError("compiled signature names do not match k");
    ck.source_hash_ = j.at("source_hash").get<std::string>();
    auto edges = [&](const char* key) {
      std::vector<Edge> out;
      for (const auto& e : j.at(key)) {
        Edge edge{e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>()};
        if (edge.first >= n || edge.second >= n) throw InputError("compiled edge out of range");
        out.push_back(edge);
      }
      return out;
    };
    ck.sparse_hierarchy_ = edges("hierarchy_sparse");
    ck.sparse_exclusion_ = edges("exclusion_sparse");
    ck.dense_hierarchy_ = BitMatrix(n);
    ck.dense_exclusion_ = BitMatrix(n);
    const auto& hd = j.at("hierarchy_dense");
    const auto& ed = j.at("exclusion_dense");
    if (hd.size() != n || ed.size() != n) throw InputError("compiled matrices do not match k");
    for (std::size_t i = 0; i < n; ++i) {
      read_row_hex(ck.dense_hierarchy_, i, hd[i].get<std::string>());
      read_row_hex(ck.dense_exclusion_, i, ed[i].get<std::string>());
    }
    ck.forced_false_ = j.at("forced_false").get<std::vector<std::size_t>>();

    JunctionTree& jt = ck.tree_;
    const auto& cl = j.at("cliques");
    if (cl.empty()) throw InputError("compiled tree has no cliques");
    jt.cliques.resize(cl.size());
    std::vector<bool> covered(n, false);
    for (std::size_t c = 0; c < cl.size(); ++c) {
      Clique& q = jt.cliques[c];
      q.vars = cl[c].at("vars").get<std::vector<std::size_t>>();
      q.states = cl[c].at("states").get<std::vector<std::uint32_t>>();
      q.owned = cl[c].at("owned").get<std::vector<std::size_t>>();
      if (q.vars.empty() || q.vars.size() > kMaxCliqueSize || !std::is_sorted(q.vars.begin(), q.vars.end()) ||
          q.vars.back() >= n) {
        throw InputError("compiled clique " + std::to_string(c) + " has invalid variables");
      }
      if (q.states.empty() || !std::is_sorted(q.states.begin(), q.states.end())) {
        throw InputError("compiled clique " + std::to_string(c) + " has invalid states");
      }
      for (std::size_t pos : q.owned) {
        if (pos >= q.vars.size() || covered[q.vars[pos]]) throw InputError("compiled ownership is inconsistent");
        covered[q.vars[pos]] = true;
      }
    }
    if (std::find(covered.begin(), covered.end(), false) != covered.end()) {
      throw InputError("compiled tree leaves a variable unscored");
    }
    jt.root = j.at("schedule").at("root").get<std::size_t>();
    jt.schedule = j.at("schedule").at("order").get<std::vector<std::size_t>>();
    if (jt.root >= cl.size() || jt.schedule.size() != cl.size() || jt.schedule.front() != jt.root) {
      throw InputError("compiled schedule is inconsistent");
    }
    for (const auto& s : j.at("separators")) {
      const std::size_t c = s.at("child").get<std::size_t>();
      const std::size_t p = s.at("parent").get<std::size_t>();
      if (c >= cl.size() || p >= cl.size() || c == jt.root) throw InputError("compiled separator out of range");
      jt.cliques[c].parent = p;
      jt.cliques[c].separator = s.at("vars").get<std::vector<std::size_t>>();
      jt.cliques[p].children.push_back(c);
    }
    for (auto& q : jt.cliques) std::sort(q.children.begin(), q.children.end());
    std::vector<std::size_t> position(cl.size(), cl.size());
    for (std::size_t i = 0; i < jt.schedule.size(); ++i) {
      if (jt.schedule[i] >= cl.size() || position[jt.schedule[i]] != cl.size()) {
        throw InputError("compiled schedule is not a permutation");
      }
      position[jt.schedule[i]] = i;
    }
    for (std::size_t c = 0; c < cl.size(); ++c) {
      if (c != jt.root && position[jt.cliques[c].parent] >= position[c]) {
        throw InputError("compiled schedule visits a clique before its parent");
      }
    }
  } catch (const json::exception& ex) {
    throw InputError(std::string("malformed compiled knowledge: ") + ex.what());
  }
  ck.build_separator_maps();
  return ck;
}

}  // namespace semcond
