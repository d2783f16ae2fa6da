#pragma once

// Random generators and enumeration oracles shared by the unit and
// acceptance suites. The oracles read graph edges directly and never go
// through Formula or the compiler.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "semcond/distribution.hpp"
#include "semcond/hex_graph.hpp"
#include "semcond/logic.hpp"

namespace semcond::testing {

using Rng = std::mt19937_64;

/// Random DAG on n nodes (edges only from an earlier to a later node of a
/// random permutation) plus random exclusion pairs.
inline HexGraph random_hex(Rng& rng, std::size_t n, double p_hier = 0.25, double p_excl = 0.15) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::bernoulli_distribution h(p_hier), e(p_excl);
  std::vector<Edge> hier, excl;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (h(rng)) {
        hier.emplace_back(perm[i], perm[j]);
      } else if (e(rng)) {
        excl.emplace_back(perm[i], perm[j]);
      }
    }
  }
  return HexGraph::from_edges(n, hier, excl);
}

/// A forest-shaped hierarchy with sibling exclusions, closer to real label
/// taxonomies than random DAGs.
inline HexGraph random_taxonomy(Rng& rng, std::size_t n) {
  std::vector<Edge> hier, excl;
  std::vector<std::vector<std::size_t>> kids(n);
  std::bernoulli_distribution root(0.2);
  for (std::size_t v = 1; v < n; ++v) {
    if (root(rng)) continue;
    std::uniform_int_distribution<std::size_t> parent(0, v - 1);
    const std::size_t p = parent(rng);
    hier.emplace_back(p, v);
    kids[p].push_back(v);
  }
  std::bernoulli_distribution sib(0.7);
  for (const auto& ks : kids) {
    for (std::size_t i = 0; i < ks.size(); ++i) {
      for (std::size_t j = i + 1; j < ks.size(); ++j) {
        if (sib(rng)) excl.emplace_back(ks[i], ks[j]);
      }
    }
  }
  return HexGraph::from_edges(n, hier, excl);
}

inline ActivationVector random_activations(Rng& rng, std::size_t k, double scale = 2.0) {
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> a(k);
  for (double& v : a) v = d(rng);
  return ActivationVector(a);
}

inline Formula random_formula(Rng& rng, Signature sig, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 4);
  std::uniform_int_distribution<std::size_t> var(1, sig.size());
  switch (pick(rng)) {
    case 0:
    case 1:
      return Formula::var(sig, var(rng));
    case 2:
      return Formula::negate(random_formula(rng, sig, depth - 1));
    case 3:
      return Formula::conj({random_formula(rng, sig, depth - 1), random_formula(rng, sig, depth - 1)});
    default:
      return Formula::disj({random_formula(rng, sig, depth - 1), random_formula(rng, sig, depth - 1)});
  }
}

/// Random satisfiable formula.
inline Formula random_satisfiable(Rng& rng, Signature sig, int depth) {
  for (;;) {
    Formula f = random_formula(rng, sig, depth);
    if (is_satisfiable(f)) return f;
  }
}

namespace oracle {

inline bool hex_accepts(const HexGraph& h, std::uint64_t index) {
  const std::size_t n = h.size();
  auto bit = [&](std::size_t v) { return (index >> (n - 1 - v)) & 1u; };
  for (const auto& [p, c] : h.hierarchy()) {
    if (bit(c) && !bit(p)) return false;
  }
  for (const auto& [a, b] : h.exclusion()) {
    if (bit(a) && bit(b)) return false;
  }
  return true;
}

inline std::vector<std::uint64_t> hex_models(const HexGraph& h) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << h.size()); ++i) {
    if (hex_accepts(h, i)) out.push_back(i);
  }
  return out;
}

inline double score(const ActivationVector& a, std::uint64_t index) {
  const std::size_t n = a.size();
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if ((index >> (n - 1 - j)) & 1u) s += a[j];
  }
  return s;
}

/// log P(models | a) as a product of independent Bernoulli probabilities.
inline double log_pqe(const std::vector<std::uint64_t>& models, const ActivationVector& a) {
  const std::size_t n = a.size();
  long double total = 0.0L;
  for (std::uint64_t m : models) {
    long double p = 1.0L;
    for (std::size_t j = 0; j < n; ++j) {
      const long double s = 1.0L / (1.0L + std::exp(-static_cast<long double>(a[j])));
      p *= ((m >> (n - 1 - j)) & 1u) ? s : 1.0L - s;
    }
    total += p;
  }
  return static_cast<double>(std::log(total));
}

inline std::vector<double> marginals(const std::vector<std::uint64_t>& models, const ActivationVector& a) {
  const std::size_t n = a.size();
  double best = -INFINITY;
  for (std::uint64_t m : models) best = std::max(best, score(a, m));
  std::vector<long double> on(n, 0.0L);
  long double z = 0.0L;
  for (std::uint64_t m : models) {
    const long double w = std::exp(static_cast<long double>(score(a, m) - best));
    z += w;
    for (std::size_t j = 0; j < n; ++j) {
      if ((m >> (n - 1 - j)) & 1u) on[j] += w;
    }
  }
  std::vector<double> mu(n);
  for (std::size_t j = 0; j < n; ++j) mu[j] = static_cast<double>(on[j] / z);
  return mu;
}

/// First model (smallest index) among those of maximal score.
inline std::uint64_t map_index(const std::vector<std::uint64_t>& models, const ActivationVector& a) {
  std::uint64_t best = models.front();
  double best_s = score(a, best);
  for (std::uint64_t m : models) {
    const double s = score(a, m);
    if (s > best_s) {
      best = m;
      best_s = s;
    }
  }
  return best;
}

}  // namespace oracle

}  // namespace semcond::testing
