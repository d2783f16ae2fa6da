#include "semcond/inference.hpp"

#include <algorithm>
#include <cmath>

#include "semcond/errors.hpp"
#include "semcond/numeric.hpp"

namespace semcond {

namespace {

using Table = std::vector<double>;

std::vector<Table> potentials(const CompiledKnowledge& ck, const ActivationVector& a) {
  check_same_size(ck.num_labels(), a.size(), "activation vector");
  const auto& cliques = ck.tree().cliques;
  std::vector<Table> phi(cliques.size());
  for (std::size_t c = 0; c < cliques.size(); ++c) {
    const Clique& q = cliques[c];
    phi[c].resize(q.states.size());
    for (std::size_t s = 0; s < q.states.size(); ++s) {
      double v = 0.0;
      for (std::size_t pos : q.owned) {
        if ((q.states[s] >> pos) & 1u) v += a[q.vars[pos]];
      }
      phi[c][s] = v;
    }
  }
  return phi;
}

// No edges and no forced-false nodes: every assignment is a model.
bool unconstrained(const CompiledKnowledge& ck) {
  return ck.sparse_hierarchy().empty() && ck.sparse_exclusion().empty() && ck.forced_false().empty();
}

double child_term(const Table& msg, std::int32_t sep) { return sep < 0 ? kNegInf : msg[static_cast<std::size_t>(sep)]; }

struct SumProduct {
  std::vector<Table> phi;
  std::vector<Table> up;       // phi plus all child messages
  std::vector<Table> to_parent;
  double log_z = kNegInf;
};

SumProduct upward(const CompiledKnowledge& ck, const ActivationVector& a) {
  const JunctionTree& jt = ck.tree();
  SumProduct sp;
  sp.phi = potentials(ck, a);
  sp.up = sp.phi;
  sp.to_parent.resize(jt.cliques.size());
  for (auto it = jt.schedule.rbegin(); it != jt.schedule.rend(); ++it) {
    const std::size_t c = *it;
    const Clique& q = jt.cliques[c];
    Table& up = sp.up[c];
    for (std::size_t d : q.children) {
      const auto& p2s = jt.separator_maps[d].parent_to_sep;
      for (std::size_t s = 0; s < up.size(); ++s) up[s] += child_term(sp.to_parent[d], p2s[s]);
    }
    if (c == jt.root) continue;
    const SeparatorMap& map = jt.separator_maps[c];
    std::vector<LogSumAccumulator> acc(map.count);
    for (std::size_t s = 0; s < up.size(); ++s) acc[map.child_to_sep[s]].add(up[s]);
    Table& msg = sp.to_parent[c];
    msg.resize(map.count);
    for (std::size_t t = 0; t < map.count; ++t) msg[t] = acc[t].value();
  }
  sp.log_z = log_sum_exp(sp.up[jt.root]);
  if (sp.log_z == kNegInf) throw UnsatisfiableKnowledge("compiled knowledge has no model");
  return sp;
}

std::vector<double> marginals_from(const CompiledKnowledge& ck, const SumProduct& sp) {
  const JunctionTree& jt = ck.tree();
  std::vector<Table> down(jt.cliques.size());
  down[jt.root].assign(jt.cliques[jt.root].states.size(), 0.0);
  std::vector<double> mu(ck.num_labels(), 0.0);

  for (std::size_t c : jt.schedule) {
    const Clique& q = jt.cliques[c];
    const std::size_t ns = q.states.size();
    const std::size_t nc = q.children.size();

    // Belief of every state, then marginals of the variables this clique owns.
    Table belief(ns);
    for (std::size_t s = 0; s < ns; ++s) belief[s] = sp.up[c][s] + down[c][s];
    for (std::size_t pos : q.owned) {
      LogSumAccumulator on;
      for (std::size_t s = 0; s < ns; ++s) {
        if ((q.states[s] >> pos) & 1u) on.add(belief[s]);
      }
      mu[q.vars[pos]] = std::clamp(std::exp(on.value() - sp.log_z), 0.0, 1.0);
    }
    if (nc == 0) continue;

    // Message to child i excludes child i's own message; prefix/suffix sums
    // avoid subtracting log-space values.
    std::vector<Table> cterm(nc, Table(ns));
    for (std::size_t i = 0; i < nc; ++i) {
      const auto& p2s = jt.separator_maps[q.children[i]].parent_to_sep;
      for (std::size_t s = 0; s < ns; ++s) cterm[i][s] = child_term(sp.to_parent[q.children[i]], p2s[s]);
    }
    Table base(ns);
    for (std::size_t s = 0; s < ns; ++s) base[s] = sp.phi[c][s] + down[c][s];
    std::vector<Table> prefix(nc + 1, Table(ns, 0.0));
    for (std::size_t i = 0; i < nc; ++i) {
      for (std::size_t s = 0; s < ns; ++s) prefix[i + 1][s] = prefix[i][s] + cterm[i][s];
    }
    Table suffix(ns, 0.0);
    for (std::size_t i = nc; i-- > 0;) {
      const std::size_t d = q.children[i];
      const SeparatorMap& map = jt.separator_maps[d];
      std::vector<LogSumAccumulator> acc(map.count);
      for (std::size_t s = 0; s < ns; ++s) {
        const std::int32_t t = map.parent_to_sep[s];
        if (t >= 0) acc[static_cast<std::size_t>(t)].add(base[s] + prefix[i][s] + suffix[s]);
      }
      down[d].resize(jt.cliques[d].states.size());
      for (std::size_t s = 0; s < down[d].size(); ++s) down[d][s] = acc[map.child_to_sep[s]].value();
      for (std::size_t s = 0; s < ns; ++s) suffix[s] += cterm[i][s];
    }
  }
  return mu;
}

// Max-product with back-pointers. Exact ties are settled by decoding both
// candidates and comparing the assignments of the affected subtree.
class Viterbi {
 public:
  Viterbi(const CompiledKnowledge& ck, const ActivationVector& a)
      : ck_(ck), jt_(ck.tree()), phi_(potentials(ck, a)), best_(jt_.cliques.size()), arg_(jt_.cliques.size()) {}

  LabelVector run() {
    std::vector<Table> score = phi_;
    for (auto it = jt_.schedule.rbegin(); it != jt_.schedule.rend(); ++it) {
      const std::size_t c = *it;
      const Clique& q = jt_.cliques[c];
      for (std::size_t d : q.children) {
        const auto& p2s = jt_.separator_maps[d].parent_to_sep;
        for (std::size_t s = 0; s < score[c].size(); ++s) score[c][s] += child_term(best_[d], p2s[s]);
      }
      if (c == jt_.root) continue;
      const SeparatorMap& map = jt_.separator_maps[c];
      best_[c].assign(map.count, kNegInf);
      arg_[c].assign(map.count, kNone);
      for (std::size_t s = 0; s < score[c].size(); ++s) {
        const std::uint32_t t = map.child_to_sep[s];
        if (arg_[c][t] == kNone || score[c][s] > best_[c][t] ||
            (score[c][s] == best_[c][t] && score[c][s] != kNegInf && prefer(c, s, arg_[c][t]))) {
          best_[c][t] = score[c][s];
          arg_[c][t] = s;
        }
      }
    }

    const Table& top = score[jt_.root];
    std::size_t pick = kNone;
    for (std::size_t s = 0; s < top.size(); ++s) {
      if (pick == kNone || top[s] > top[pick] || (top[s] == top[pick] && top[s] != kNegInf && prefer(jt_.root, s, pick))) pick = s;
    }
    if (pick == kNone || top[pick] == kNegInf) throw UnsatisfiableKnowledge("compiled knowledge has no model");

    LabelVector y(ck_.num_labels());
    std::vector<std::size_t> touched;
    decode(jt_.root, pick, y, touched);
    return y;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  void decode(std::size_t c, std::size_t s, LabelVector& y, std::vector<std::size_t>& touched) const {
    const Clique& q = jt_.cliques[c];
    for (std::size_t i = 0; i < q.vars.size(); ++i) {
      y.set(q.vars[i], (q.states[s] >> i) & 1u);
      touched.push_back(q.vars[i]);
    }
    for (std::size_t d : q.children) {
      const std::int32_t t = jt_.separator_maps[d].parent_to_sep[s];
      decode(d, arg_[d][static_cast<std::size_t>(t)], y, touched);
    }
  }

  // True when state s of clique c yields a lexicographically smaller subtree
  // assignment than state r.
  bool prefer(std::size_t c, std::size_t s, std::size_t r) const {
    LabelVector ys(ck_.num_labels()), yr(ck_.num_labels());
    std::vector<std::size_t> touched, unused;
    decode(c, s, ys, touched);
    decode(c, r, yr, unused);
    std::sort(touched.begin(), touched.end());
    for (std::size_t v : touched) {
      if (ys[v] != yr[v]) return !ys[v];
    }
    return false;
  }

  const CompiledKnowledge& ck_;
  const JunctionTree& jt_;
  std::vector<Table> phi_;
  std::vector<Table> best_;
  std::vector<std::vector<std::size_t>> arg_;
};

}  // namespace

double log_partition(const CompiledKnowledge& ck, const ActivationVector& a) { return upward(ck, a).log_z; }

double pqe(const CompiledKnowledge& ck, const ActivationVector& a) {
  if (unconstrained(ck)) {
    check_same_size(ck.num_labels(), a.size(), "activation vector");
    return 0.0;
  }
  return std::min(0.0, log_partition(ck, a) - log_partition_function(a));
}

std::vector<double> conditioned_marginals(const CompiledKnowledge& ck, const ActivationVector& a) {
  return marginals_from(ck, upward(ck, a));
}

LabelVector map_state(const CompiledKnowledge& ck, const ActivationVector& a) { return Viterbi(ck, a).run(); }

InferenceResult infer(const CompiledKnowledge& ck, const ActivationVector& a) {
  const SumProduct sp = upward(ck, a);
  InferenceResult r;
  r.log_pqe = unconstrained(ck) ? 0.0 : std::min(0.0, sp.log_z - log_partition_function(a));
  r.marginals = marginals_from(ck, sp);
  r.map_state = Viterbi(ck, a).run();
  return r;
}

LabelVector predict_imc(const ActivationVector& a) {
  LabelVector y(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) y.set(j, a[j] >= 0.0);
  return y;
}

LabelVector predict_sci(const CompiledKnowledge& ck, const ActivationVector& a) { return map_state(ck, a); }

double pqe_bruteforce(const Formula& f, const ActivationVector& a) {
  if (!is_satisfiable(f)) throw UnsatisfiableKnowledge("knowledge has no model");
  return std::min(0.0, log_formula_probability_bruteforce(a, f));
}

std::vector<double> conditioned_marginals_bruteforce(const Formula& f, const ActivationVector& a) {
  return marginals_bruteforce(conditioned_distribution_bruteforce(a, f));
}

LabelVector map_bruteforce(const Formula& f, const ActivationVector& a) {
  return mode_bruteforce(conditioned_distribution_bruteforce(a, f));
}

}  // namespace semcond
