#include "semcond/hex_graph.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "semcond/errors.hpp"

namespace semcond {

namespace {

void sort_unique(std::vector<Edge>& edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

}  // namespace

HexGraph HexGraph::from_edges(std::size_t n, std::vector<Edge> hierarchy, std::vector<Edge> exclusion,
                              std::vector<std::string> names) {
  if (n == 0) throw InputError("HEX graph needs at least one node");
  if (names.empty()) {
    names.reserve(n);
    for (std::size_t i = 0; i < n; ++i) names.push_back("y" + std::to_string(i + 1));
  }
  if (names.size() != n) throw InputError("node name count does not match node count");
  {
    std::set<std::string_view> seen;
    for (const auto& name : names) {
      if (!seen.insert(name).second) throw InputError("duplicate node '" + name + "'");
    }
  }
  auto check = [&](const Edge& e, const char* what) {
    if (e.first >= n || e.second >= n) throw InputError(std::string(what) + " edge references unknown node");
    if (e.first == e.second) throw InputError(std::string(what) + " self-loop on '" + names[e.first] + "'");
  };
  for (const auto& e : hierarchy) check(e, "hierarchy");
  for (auto& e : exclusion) {
    check(e, "exclusion");
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  sort_unique(hierarchy);
  sort_unique(exclusion);
  for (const auto& [p, c] : hierarchy) {
    if (std::binary_search(exclusion.begin(), exclusion.end(), Edge{std::min(p, c), std::max(p, c)})) {
      throw InputError("pair ('" + names[p] + "', '" + names[c] + "') is both a hierarchy and an exclusion edge");
    }
  }

  HexGraph g;
  g.names_ = std::move(names);
  g.hierarchy_ = std::move(hierarchy);
  g.exclusion_ = std::move(exclusion);
  if (g.topological_order().size() != n) throw CycleError("hierarchy contains a directed cycle");
  return g;
}

std::size_t HexGraph::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return names_.size();
}

std::vector<std::vector<std::size_t>> HexGraph::parents() const {
  std::vector<std::vector<std::size_t>> out(size());
  for (const auto& [p, c] : hierarchy_) out[c].push_back(p);
  return out;
}

std::vector<std::vector<std::size_t>> HexGraph::children() const {
  std::vector<std::vector<std::size_t>> out(size());
  for (const auto& [p, c] : hierarchy_) out[p].push_back(c);
  return out;
}

// Kahn's algorithm; returns fewer than size() nodes when there is a cycle.
std::vector<std::size_t> HexGraph::topological_order() const {
  const std::size_t n = size();
  std::vector<std::size_t> indegree(n, 0);
  const auto kids = children();
  for (const auto& [p, c] : hierarchy_) ++indegree[c];
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    const std::size_t v = ready.top();
    ready.pop();
    order.push_back(v);
    for (std::size_t c : kids[v]) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  return order;
}

BitMatrix HexGraph::ancestor_closure() const {
  const std::size_t n = size();
  BitMatrix anc(n);
  const auto par = parents();
  for (std::size_t v : topological_order()) {
    for (std::size_t p : par[v]) {
      anc.or_row(v, anc, p);
      anc.set(v, p);
    }
  }
  // anc currently holds rows "ancestors of v"; transpose into (ancestor, v).
  BitMatrix closure(n);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t a = 0; a < n; ++a) {
      if (anc.test(v, a)) closure.set(a, v);
    }
  }
  return closure;
}

std::string HexGraph::to_json() const {
  nlohmann::json j;
  j["nodes"] = names_;
  auto named = [&](const std::vector<Edge>& edges) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [a, b] : edges) arr.push_back({names_[a], names_[b]});
    return arr;
  };
  j["hierarchy"] = named(hierarchy_);
  j["exclusion"] = named(exclusion_);
  return j.dump();
}

HexGraph ingest_hex(std::vector<std::string> nodes, const std::vector<NamedEdge>& hierarchy,
                    const std::vector<NamedEdge>& exclusion) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!index.emplace(nodes[i], i).second) throw InputError("duplicate node '" + nodes[i] + "'");
  }
  auto resolve = [&](const std::vector<NamedEdge>& named, const char* what) {
    std::vector<Edge> edges;
    edges.reserve(named.size());
    for (const auto& [a, b] : named) {
      auto ia = index.find(a);
      auto ib = index.find(b);
      if (ia == index.end() || ib == index.end()) {
        throw InputError(std::string(what) + " edge ('" + a + "', '" + b + "') references an unknown node");
      }
      edges.emplace_back(ia->second, ib->second);
    }
    return edges;
  };
  auto h = resolve(hierarchy, "hierarchy");
  auto e = resolve(exclusion, "exclusion");
  const std::size_t n = nodes.size();
  return HexGraph::from_edges(n, std::move(h), std::move(e), std::move(nodes));
}

HexGraph parse_hex_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("invalid HEX JSON: ") + ex.what());
  }
  try {
    if (!j.is_object() || !j.contains("nodes")) throw InputError("HEX JSON needs a \"nodes\" array");
    auto nodes = j.at("nodes").get<std::vector<std::string>>();
    auto pairs = [&](const char* key) {
      std::vector<NamedEdge> out;
      if (!j.contains(key)) return out;
      for (const auto& item : j.at(key)) {
        if (!item.is_array() || item.size() != 2) {
          throw InputError(std::string("\"") + key + "\" entries must be [a, b] pairs");
        }
        out.emplace_back(item[0].get<std::string>(), item[1].get<std::string>());
      }
      return out;
    };
    return ingest_hex(std::move(nodes), pairs("hierarchy"), pairs("exclusion"));
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("malformed HEX JSON: ") + ex.what());
  }
}

HexGraph load_hex_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_hex_json(buf.str());
}

namespace {

// desc_or_self.test(i, j) iff j == i or j is a descendant of i.
BitMatrix descendant_or_self(const HexGraph& h) {
  BitMatrix d = h.ancestor_closure();
  for (std::size_t i = 0; i < h.size(); ++i) d.set(i, i);
  return d;
}

}  // namespace

HexGraph derive_exclusions(const HexGraph& h) {
  const std::size_t n = h.size();
  const BitMatrix desc = descendant_or_self(h);
  std::vector<Edge> exclusion = h.exclusion();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!desc.rows_intersect(i, desc, j)) exclusion.emplace_back(i, j);
    }
  }
  return HexGraph::from_edges(n, h.hierarchy(), std::move(exclusion), h.names());
}

HexGraph prune_pass_through(const HexGraph& h) {
  const std::size_t n = h.size();
  std::set<Edge> hier(h.hierarchy().begin(), h.hierarchy().end());
  std::set<Edge> excl(h.exclusion().begin(), h.exclusion().end());
  std::vector<bool> removed(n, false);
  std::vector<bool> stuck(n, false);

  auto norm = [](std::size_t a, std::size_t b) { return Edge{std::min(a, b), std::max(a, b)}; };

  for (bool changed = true; changed;) {
    changed = false;
    std::vector<std::vector<std::size_t>> par(n), kids(n);
    for (const auto& [p, c] : hier) {
      par[c].push_back(p);
      kids[p].push_back(c);
    }
    for (std::size_t b = 0; b < n && !changed; ++b) {
      if (removed[b] || stuck[b] || par[b].size() != 1 || kids[b].size() != 1) continue;
      const std::size_t a = par[b].front();
      const std::size_t c = kids[b].front();
      std::vector<std::size_t> partners;
      for (const auto& [x, y] : excl) {
        if (x == b) partners.push_back(y);
        if (y == b) partners.push_back(x);
      }
      const bool clash = excl.count(norm(a, c)) || std::any_of(partners.begin(), partners.end(), [&](std::size_t x) {
                           return x == a || x == c || hier.count({c, x}) || hier.count({x, c});
                         });
      if (clash) {
        stuck[b] = true;
        continue;
      }
      hier.erase({a, b});
      hier.erase({b, c});
      hier.insert({a, c});
      for (std::size_t x : partners) {
        excl.erase(norm(b, x));
        excl.insert(norm(c, x));
      }
      removed[b] = true;
      changed = true;
    }
  }

  std::vector<std::size_t> remap(n, n);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) {
    if (!removed[i]) {
      remap[i] = names.size();
      names.push_back(h.names()[i]);
    }
  }
  std::vector<Edge> new_h, new_e;
  for (const auto& [p, c] : hier) new_h.emplace_back(remap[p], remap[c]);
  for (const auto& [x, y] : excl) new_e.emplace_back(remap[x], remap[y]);
  const std::size_t kept = names.size();
  return HexGraph::from_edges(kept, std::move(new_h), std::move(new_e), std::move(names));
}

HexGraph sparsify_hierarchy(const HexGraph& h) {
  const BitMatrix closure = h.ancestor_closure();
  const auto kids = h.children();
  std::vector<Edge> reduced;
  for (const auto& [p, c] : h.hierarchy()) {
    const bool implied = std::any_of(kids[p].begin(), kids[p].end(),
                                     [&](std::size_t k) { return k != c && closure.test(k, c); });
    if (!implied) reduced.emplace_back(p, c);
  }
  return HexGraph::from_edges(h.size(), std::move(reduced), h.exclusion(), h.names());
}

}  // namespace semcond
