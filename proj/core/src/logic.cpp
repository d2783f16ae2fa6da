#include "semcond/logic.hpp"

#include <cctype>
#include <sstream>

#include "semcond/errors.hpp"

namespace semcond {

Signature::Signature(std::size_t k) : k_(k) {
  if (k == 0) throw InputError("signature needs at least one label variable");
}

LabelVector::LabelVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_) {
    if (b > 1) throw InputError("label entries must be 0 or 1");
  }
}

LabelVector::LabelVector(std::initializer_list<int> bits) {
  bits_.reserve(bits.size());
  for (int b : bits) {
    if (b != 0 && b != 1) throw InputError("label entries must be 0 or 1");
    bits_.push_back(static_cast<std::uint8_t>(b));
  }
}

LabelVector LabelVector::from_index(std::size_t k, std::uint64_t index) {
  LabelVector y(k);
  for (std::size_t j = 0; j < k; ++j) {
    y.bits_[j] = static_cast<std::uint8_t>((index >> (k - 1 - j)) & 1u);
  }
  return y;
}

std::uint64_t LabelVector::index() const {
  if (bits_.size() > 63) throw CapExceeded("label vector too long for a state index");
  std::uint64_t idx = 0;
  for (auto b : bits_) idx = (idx << 1) | b;
  return idx;
}

std::string LabelVector::to_string() const {
  std::string out;
  out.reserve(bits_.size() * 2);
  for (std::size_t j = 0; j < bits_.size(); ++j) {
    if (j) out.push_back(',');
    out.push_back(bits_[j] ? '1' : '0');
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const LabelVector& y) {
  return os << '(' << y.to_string() << ')';
}

LabelVector one_hot(std::size_t k, std::size_t j) {
  if (j < 1 || j > k) {
    throw InputError("one-hot index " + std::to_string(j) + " outside [1, " +
                     std::to_string(k) + "]");
  }
  LabelVector y(k);
  y.set(j - 1, true);
  return y;
}

// ---------------------------------------------------------------------------
// Construction

namespace {

Formula::NodePtr leaf(Formula::Kind kind, std::size_t var = 0) {
  return std::make_shared<const Formula::Node>(Formula::Node{kind, var, {}});
}

bool node_equal(const Formula::Node& a, const Formula::Node& b) {
  if (a.kind != b.kind || a.var != b.var || a.children.size() != b.children.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (a.children[i] != b.children[i] && !node_equal(*a.children[i], *b.children[i])) {
      return false;
    }
  }
  return true;
}

std::size_t node_count(const Formula::Node& n) {
  std::size_t c = 1;
  for (const auto& ch : n.children) c += node_count(*ch);
  return c;
}

}  // namespace

Formula Formula::top(Signature sig) { return {sig, leaf(Kind::kTrue)}; }
Formula Formula::bottom(Signature sig) { return {sig, leaf(Kind::kFalse)}; }

Formula Formula::var(Signature sig, std::size_t index) {
  if (!sig.contains(index)) {
    throw InputError("variable y" + std::to_string(index) + " outside [1, " +
                     std::to_string(sig.size()) + "]");
  }
  return {sig, leaf(Kind::kVar, index)};
}

Formula Formula::negate(const Formula& f) {
  return {f.sig_, std::make_shared<const Node>(Node{Kind::kNot, 0, {f.root_}})};
}

Formula Formula::nary(Kind kind, const std::vector<Formula>& parts) {
  if (parts.empty()) throw InputError("n-ary connective without operands");
  const Signature sig = parts.front().sig_;
  if (parts.size() == 1) return parts.front();
  std::vector<NodePtr> children;
  for (const auto& p : parts) {
    if (!(p.sig_ == sig)) throw InputError("operands over different signatures");
    if (p.root_->kind == kind) {
      children.insert(children.end(), p.root_->children.begin(), p.root_->children.end());
    } else {
      children.push_back(p.root_);
    }
  }
  return {sig, std::make_shared<const Node>(Node{kind, 0, std::move(children)})};
}

Formula Formula::conj(const std::vector<Formula>& parts) {
  if (parts.empty()) throw InputError("use Formula::top for an empty conjunction");
  return nary(Kind::kAnd, parts);
}

Formula Formula::disj(const std::vector<Formula>& parts) {
  if (parts.empty()) throw InputError("use Formula::bottom for an empty disjunction");
  return nary(Kind::kOr, parts);
}

bool operator==(const Formula& a, const Formula& b) {
  return a.sig_ == b.sig_ && node_equal(*a.root_, *b.root_);
}

std::size_t Formula::size() const { return node_count(*root_); }

// ---------------------------------------------------------------------------
// Printing

namespace {

void print_node(const Formula::Node& n, std::string& out) {
  using K = Formula::Kind;
  switch (n.kind) {
    case K::kTrue: out += "true"; return;
    case K::kFalse: out += "false"; return;
    case K::kVar: out += 'y'; out += std::to_string(n.var); return;
    case K::kNot: {
      const auto& ch = *n.children.front();
      out += '~';
      const bool wrap = ch.kind == K::kAnd || ch.kind == K::kOr;
      if (wrap) out += '(';
      print_node(ch, out);
      if (wrap) out += ')';
      return;
    }
    case K::kAnd:
    case K::kOr: {
      const char* sep = n.kind == K::kAnd ? " & " : " | ";
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) out += sep;
        const auto& ch = *n.children[i];
        // Flattening guarantees ch.kind != n.kind.
        const bool wrap = n.kind == K::kAnd && ch.kind == K::kOr;
        if (wrap) out += '(';
        print_node(ch, out);
        if (wrap) out += ')';
      }
      return;
    }
  }
}

}  // namespace

std::string Formula::to_string() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

std::ostream& operator<<(std::ostream& os, const Formula& f) { return os << f.to_string(); }

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  Parser(std::string_view text, Signature sig) : text_(text), sig_(sig) {}

  Formula parse() {
    Formula f = parse_or();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool accept_word(std::string_view w) {
    skip_ws();
    if (text_.substr(pos_, w.size()) != w) return false;
    const std::size_t end = pos_ + w.size();
    if (end < text_.size() && std::isalnum(static_cast<unsigned char>(text_[end]))) return false;
    pos_ = end;
    return true;
  }

  Formula parse_or() {
    std::vector<Formula> parts{parse_and()};
    while (accept('|')) parts.push_back(parse_and());
    return Formula::disj(parts);
  }

  Formula parse_and() {
    std::vector<Formula> parts{parse_unary()};
    while (accept('&')) parts.push_back(parse_unary());
    return Formula::conj(parts);
  }

  Formula parse_unary() {
    if (accept('~')) return Formula::negate(parse_unary());
    return parse_atom();
  }

  Formula parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (accept('(')) {
      Formula f = parse_or();
      if (!accept(')')) fail("expected ')'");
      return f;
    }
    if (accept_word("true")) return Formula::top(sig_);
    if (accept_word("false")) return Formula::bottom(sig_);
    if (text_[pos_] == 'y') {
      const std::size_t start = pos_;
      ++pos_;
      std::size_t digits_begin = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == digits_begin) {
        pos_ = start;
        fail("expected digits after 'y'");
      }
      const auto digits = text_.substr(digits_begin, pos_ - digits_begin);
      if (digits.size() > 9) {
        pos_ = start;
        fail("variable index too large");
      }
      const std::size_t idx = std::stoul(std::string(digits));
      if (!sig_.contains(idx)) {
        pos_ = start;
        fail("variable y" + std::to_string(idx) + " outside [1, " + std::to_string(sig_.size()) + "]");
      }
      return Formula::var(sig_, idx);
    }
    fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
  }

  std::string_view text_;
  Signature sig_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse_formula(std::string_view text, Signature sig) { return Parser(text, sig).parse(); }

// ---------------------------------------------------------------------------
// Semantics

namespace {

template <typename Lookup>
bool eval_node(const Formula::Node& n, const Lookup& value_of) {
  using K = Formula::Kind;
  switch (n.kind) {
    case K::kTrue: return true;
    case K::kFalse: return false;
    case K::kVar: return value_of(n.var);
    case K::kNot: return !eval_node(*n.children.front(), value_of);
    case K::kAnd:
      for (const auto& ch : n.children) {
        if (!eval_node(*ch, value_of)) return false;
      }
      return true;
    case K::kOr:
      for (const auto& ch : n.children) {
        if (eval_node(*ch, value_of)) return true;
      }
      return false;
  }
  return false;
}

}  // namespace

bool evaluate(const Formula& f, const LabelVector& y) {
  if (y.size() != f.signature().size()) {
    throw InputError("label vector of length " + std::to_string(y.size()) +
                     " for a signature of size " + std::to_string(f.signature().size()));
  }
  return eval_node(f.root(), [&](std::size_t var) { return y[var - 1]; });
}

bool evaluate_index(const Formula& f, std::uint64_t index) {
  const std::size_t k = f.signature().size();
  return eval_node(f.root(), [&](std::size_t var) { return ((index >> (k - var)) & 1u) != 0; });
}

void check_enumerable(std::size_t k) {
  if (k > kEnumerationCap) {
    throw CapExceeded("exact enumeration supports at most " + std::to_string(kEnumerationCap) +
                      " labels (got " + std::to_string(k) +
                      "); compile the knowledge to a junction tree instead");
  }
}

std::vector<std::uint64_t> model_indices(const Formula& f) {
  const std::size_t k = f.signature().size();
  check_enumerable(k);
  std::vector<std::uint64_t> models;
  const std::uint64_t states = std::uint64_t{1} << k;
  for (std::uint64_t i = 0; i < states; ++i) {
    if (evaluate_index(f, i)) models.push_back(i);
  }
  return models;
}

std::uint64_t model_count(const Formula& f) { return model_indices(f).size(); }

bool is_satisfiable(const Formula& f) {
  const std::size_t k = f.signature().size();
  check_enumerable(k);
  const std::uint64_t states = std::uint64_t{1} << k;
  for (std::uint64_t i = 0; i < states; ++i) {
    if (evaluate_index(f, i)) return true;
  }
  return false;
}

bool equivalent(const Formula& f, const Formula& g) {
  if (!(f.signature() == g.signature())) throw InputError("equivalence across different signatures");
  const std::size_t k = f.signature().size();
  check_enumerable(k);
  const std::uint64_t states = std::uint64_t{1} << k;
  for (std::uint64_t i = 0; i < states; ++i) {
    if (evaluate_index(f, i) != evaluate_index(g, i)) return false;
  }
  return true;
}

Formula exactly_one(std::size_t k) {
  const Signature sig(k);
  std::vector<Formula> vars;
  for (std::size_t j = 1; j <= k; ++j) vars.push_back(Formula::var(sig, j));
  std::vector<Formula> conjuncts{Formula::disj(vars)};
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t l = j + 1; l < k; ++l) {
      conjuncts.push_back(Formula::disj({Formula::negate(vars[j]), Formula::negate(vars[l])}));
    }
  }
  return Formula::conj(conjuncts);
}

}  // namespace semcond

namespace semcond {

Formula hex_to_formula(const HexGraph& h) {
  const Signature sig(h.size());
  std::vector<Formula> clauses;
  clauses.reserve(h.hierarchy().size() + h.exclusion().size());
  for (const auto& [parent, child] : h.hierarchy()) {
    clauses.push_back(Formula::disj(
        {Formula::var(sig, parent + 1), Formula::negate(Formula::var(sig, child + 1))}));
  }
  for (const auto& [a, b] : h.exclusion()) {
    clauses.push_back(Formula::disj({Formula::negate(Formula::var(sig, a + 1)),
                                     Formula::negate(Formula::var(sig, b + 1))}));
  }
  if (clauses.empty()) return Formula::top(sig);
  return Formula::conj(clauses);
}

}  // namespace semcond
