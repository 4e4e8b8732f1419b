#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "slp/circuit.hpp"
#include "slp/common.hpp"
#include "slp/primes.hpp"

namespace slp {

/// Global variable interning. Monomial arithmetic works on dense ids; names
/// are only consulted when printing (canonical output is ordered by name, so
/// the interning order never leaks into reports).
class VarTable {
 public:
  static VarTable& instance() {
    static VarTable t;
    return t;
  }

  std::uint32_t id(const std::string& name) {
    {
      std::shared_lock lock(mutex_);
      auto it = ids_.find(name);
      if (it != ids_.end()) return it->second;
    }
    std::unique_lock lock(mutex_);
    auto it = ids_.find(name);
    if (it != ids_.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(names_.size());
    names_.push_back(name);
    ids_.emplace(name, id);
    return id;
  }

  std::string name(std::uint32_t id) const {
    std::shared_lock lock(mutex_);
    return names_[id];
  }

 private:
  VarTable() = default;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::string> names_;
};

/// A power product of variables. Exponents are arbitrary-precision (monomial
/// inputs give variable powers in binary, so they may be astronomically
/// large). No zero exponents are stored; the empty monomial is 1.
class Monomial {
 public:
  using Entry = std::pair<std::uint32_t, Integer>;

  Monomial() = default;

  static Monomial of(std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
    Monomial m;
    for (auto& [v, e] : entries) {
      if (e < 0) throw parse_error("negative exponent in monomial");
      if (e == 0) continue;
      if (!m.entries_.empty() && m.entries_.back().first == v)
        throw parse_error("duplicate variable in monomial");
      m.degree_ += e;
      m.entries_.emplace_back(v, std::move(e));
    }
    return m;
  }

  static Monomial var(const std::string& name, Integer exp = 1) {
    return of({{VarTable::instance().id(name), std::move(exp)}});
  }

  /// Parses "X1^2*X2", "Y1*Y2", "1" (empty monomial).
  static Monomial parse(const std::string& text);

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  const Integer& total_degree() const { return degree_; }

  Integer exponent(std::uint32_t var) const {
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), var,
        [](const Entry& e, std::uint32_t v) { return e.first < v; });
    if (it != entries_.end() && it->first == var) return it->second;
    return 0;
  }

  Integer exponent_of(const std::string& name) const {
    return exponent(VarTable::instance().id(name));
  }

  bool multilinear() const {
    for (const auto& [v, e] : entries_)
      if (e > 1) return false;
    return true;
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial m;
    m.degree_ = a.degree_ + b.degree_;
    m.entries_.reserve(a.entries_.size() + b.entries_.size());
    auto ia = a.entries_.begin(), ib = b.entries_.begin();
    while (ia != a.entries_.end() && ib != b.entries_.end()) {
      if (ia->first < ib->first)
        m.entries_.push_back(*ia++);
      else if (ib->first < ia->first)
        m.entries_.push_back(*ib++);
      else {
        m.entries_.emplace_back(ia->first, ia->second + ib->second);
        ++ia;
        ++ib;
      }
    }
    m.entries_.insert(m.entries_.end(), ia, a.entries_.end());
    m.entries_.insert(m.entries_.end(), ib, b.entries_.end());
    return m;
  }

  /// True if this monomial's exponents are componentwise <= cap's (variables
  /// absent from cap are capped at 0).
  bool within(const Monomial& cap) const {
    auto ic = cap.entries_.begin();
    for (const auto& [v, e] : entries_) {
      while (ic != cap.entries_.end() && ic->first < v) ++ic;
      if (ic == cap.entries_.end() || ic->first != v || e > ic->second)
        return false;
    }
    return true;
  }

  bool operator==(const Monomial& o) const { return entries_ == o.entries_; }
  bool operator!=(const Monomial& o) const { return !(*this == o); }

  /// Strict order: graded, then lexicographic by variable id (an arbitrary
  /// but multiplication-compatible monomial order used for term maps).
  bool operator<(const Monomial& o) const {
    if (degree_ != o.degree_) return degree_ < o.degree_;
    auto ia = entries_.begin(), ib = o.entries_.begin();
    while (ia != entries_.end() && ib != o.entries_.end()) {
      if (ia->first != ib->first)
        // The monomial whose earliest variable comes first is the larger one.
        return ia->first > ib->first;
      if (ia->second != ib->second) return ia->second < ib->second;
      ++ia;
      ++ib;
    }
    return false;  // same degree and one a prefix of the other: equal
  }

  std::string str() const;

 private:
  std::vector<Entry> entries_;
  Integer degree_;
};

/// Caps on intermediate expansion size. Expansion of a circuit can be
/// exponential (or worse) in its size; exceeding the budget raises
/// budget_error, a definite "too large" rather than a wrong answer.
struct Budget {
  std::size_t max_terms = std::size_t{1} << 20;
  Integer max_total_degree = Integer(1) << 20;

  /// Pair-product cap per polynomial multiplication, derived from max_terms.
  std::uint64_t work_limit() const {
    std::uint64_t w = static_cast<std::uint64_t>(max_terms) * 16;
    return std::max<std::uint64_t>(w, 1u << 16);
  }
};

/// Sparse multivariate polynomial with integer coefficients, or residues in
/// [0, p) when a modulus is attached. No zero coefficients are stored.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, Integer>;

  Polynomial() = default;
  explicit Polynomial(std::uint64_t modulus) : modulus_(modulus) {}

  static Polynomial constant(Integer v, std::uint64_t modulus = 0) {
    Polynomial p(modulus);
    p.add_term(Monomial(), std::move(v), nullptr);
    return p;
  }

  std::uint64_t modulus() const { return modulus_; }
  const TermMap& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  Integer coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Integer(0) : it->second;
  }

  bool is_multilinear() const {
    for (const auto& [m, c] : terms_)
      if (!m.multilinear()) return false;
    return true;
  }

  /// Total degree of the highest term (0 for the zero polynomial).
  Integer total_degree() const {
    return terms_.empty() ? Integer(0) : terms_.rbegin()->first.total_degree();
  }

  /// Accumulates coeff onto monomial m, keeping the representation canonical
  /// (modular reduction, zero dropping) and enforcing the term budget.
  void add_term(Monomial m, Integer coeff, const Budget* budget) {
    if (modulus_ != 0) {
      coeff %= Integer(modulus_);
      if (coeff < 0) coeff += modulus_;
    }
    if (coeff == 0) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_.emplace(std::move(m), std::move(coeff));
      if (budget && terms_.size() > budget->max_terms)
        throw budget_error("expansion exceeds max_terms (" +
                           std::to_string(budget->max_terms) + ")");
    } else {
      it->second += coeff;
      if (modulus_ != 0) {
        it->second %= modulus_;
        if (it->second < 0) it->second += modulus_;
      }
      if (it->second == 0) terms_.erase(it);
    }
  }

  bool operator==(const Polynomial& o) const {
    return modulus_ == o.modulus_ && terms_ == o.terms_;
  }
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  std::string str() const;
  static Polynomial parse(const std::string& text, std::uint64_t modulus = 0);

 private:
  TermMap terms_;
  std::uint64_t modulus_ = 0;
};

namespace detail {

inline void check_degree(const Integer& d, const Budget& b) {
  if (d > b.max_total_degree)
    throw budget_error("expansion exceeds max_total_degree");
}

}  // namespace detail

inline Polynomial poly_add(const Polynomial& a, const Polynomial& b,
                           const Budget& budget) {
  Polynomial r = a;
  for (const auto& [m, c] : b.terms()) r.add_term(m, c, &budget);
  return r;
}

/// Product with optional truncation: when `cap` is given, any pair product
/// whose monomial exceeds cap in some variable is discarded. This is sound
/// for coefficient queries below the cap because exponents never decrease
/// under + or *.
inline Polynomial poly_mul(const Polynomial& a, const Polynomial& b,
                           const Budget& budget,
                           const Monomial* cap = nullptr) {
  Polynomial r(a.modulus());
  if (a.is_zero() || b.is_zero()) return r;
  if (!cap) {
    // The leading terms' product never cancels, so this is a definite bound.
    detail::check_degree(a.total_degree() + b.total_degree(), budget);
  }
  const std::uint64_t pairs =
      static_cast<std::uint64_t>(a.term_count()) * b.term_count();
  if (pairs > budget.work_limit())
    throw budget_error("product of " + std::to_string(a.term_count()) + " x " +
                       std::to_string(b.term_count()) +
                       " terms exceeds the work budget");
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) {
      Monomial m = ma * mb;
      if (cap && !m.within(*cap)) continue;
      r.add_term(std::move(m), ca * cb, &budget);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Circuit expansion
// ---------------------------------------------------------------------------

/// Bottom-up expansion engine with memoized per-gate polynomials. One
/// instance per call; configure with a modulus for expand_mod and/or a cap
/// monomial for expand_truncated.
class Expander {
 public:
  Expander(Budget budget, std::uint64_t modulus = 0,
           std::optional<Monomial> cap = std::nullopt)
      : budget_(std::move(budget)), modulus_(modulus), cap_(std::move(cap)) {}

  Polynomial run(const Circuit& c) {
    std::vector<Polynomial> memo(c.size());
    const Monomial* cap = cap_ ? &*cap_ : nullptr;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const Gate& g = c.gate(static_cast<int>(i));
      switch (g.kind) {
        case GateKind::var: {
          Polynomial p(modulus_);
          Monomial m = Monomial::var(c.var_name(g.var));
          if (!cap || m.within(*cap)) p.add_term(std::move(m), 1, &budget_);
          memo[i] = std::move(p);
          break;
        }
        case GateKind::constant:
          memo[i] = Polynomial::constant(g.value, modulus_);
          break;
        case GateKind::add: {
          Polynomial p(modulus_);
          for (int ch : g.children)
            p = poly_add(p, memo[static_cast<size_t>(ch)], budget_);
          memo[i] = std::move(p);
          break;
        }
        case GateKind::mul: {
          Polynomial p = Polynomial::constant(1, modulus_);
          for (int ch : g.children)
            p = poly_mul(p, memo[static_cast<size_t>(ch)], budget_, cap);
          memo[i] = std::move(p);
          break;
        }
      }
    }
    return std::move(memo[static_cast<size_t>(c.output())]);
  }

 private:
  Budget budget_;
  std::uint64_t modulus_;
  std::optional<Monomial> cap_;
};

/// Exact polynomial computed by the circuit over the integers.
inline Polynomial expand(const Circuit& c, const Budget& b = {}) {
  return Expander(b).run(c);
}

/// expand(c) with all coefficients reduced mod p; vanishing terms dropped.
inline Polynomial expand_mod(const Circuit& c, std::uint64_t p,
                             const Budget& b = {}) {
  return Expander(b, p).run(c);
}

/// Exact on every monomial componentwise <= cap; larger terms are discarded
/// at every gate. Serves as the desk-scale coefficient oracle.
inline Polynomial expand_truncated(const Circuit& c, const Monomial& cap,
                                   const Budget& b = {}) {
  return Expander(b, 0, cap).run(c);
}

inline Polynomial expand_truncated_mod(const Circuit& c, const Monomial& cap,
                                       std::uint64_t p, const Budget& b = {}) {
  return Expander(b, p, cap).run(c);
}

/// Gate-by-gate evaluation mod p: O(edges) ring operations, no expansion.
/// Every variable of the circuit must be bound.
inline std::uint64_t eval_mod(const Circuit& c,
                              const std::map<std::string, std::uint64_t>& point,
                              std::uint64_t p) {
  if (p == 0) throw circuit_error("eval: modulus must be positive");
  std::vector<std::uint64_t> val(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Gate& g = c.gate(static_cast<int>(i));
    switch (g.kind) {
      case GateKind::var: {
        auto it = point.find(c.var_name(g.var));
        if (it == point.end())
          throw circuit_error("eval: unbound variable '" +
                              c.var_name(g.var) + "'");
        val[i] = it->second % p;
        break;
      }
      case GateKind::constant:
        val[i] = g.value == 1 ? 1 % p : (p - 1) % p;
        break;
      case GateKind::add: {
        std::uint64_t acc = 0;
        for (int ch : g.children) {
          acc += val[static_cast<size_t>(ch)];
          if (acc >= p) acc -= p;
        }
        val[i] = acc;
        break;
      }
      case GateKind::mul: {
        std::uint64_t acc = 1 % p;
        for (int ch : g.children)
          acc = mulmod_u64(acc, val[static_cast<size_t>(ch)], p);
        val[i] = acc;
        break;
      }
    }
  }
  return val[static_cast<size_t>(c.output())];
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

inline std::size_t count_monomials(const Polynomial& p) {
  return p.term_count();
}

inline Integer coefficient(const Polynomial& p, const Monomial& m) {
  return p.coefficient(m);
}

inline bool is_multilinear(const Polynomial& p) { return p.is_multilinear(); }

// ---------------------------------------------------------------------------
// Text and JSON forms
// ---------------------------------------------------------------------------

namespace detail {

/// Name-based graded-lex order used for canonical printing, independent of
/// variable interning order.
inline bool name_graded_less(const Monomial& a, const Monomial& b) {
  if (a.total_degree() != b.total_degree())
    return a.total_degree() < b.total_degree();
  auto named = [](const Monomial& m) {
    std::vector<std::pair<std::string, Integer>> v;
    for (const auto& [id, e] : m.entries())
      v.emplace_back(VarTable::instance().name(id), e);
    std::sort(v.begin(), v.end());
    return v;
  };
  auto va = named(a), vb = named(b);
  auto ia = va.begin(), ib = vb.begin();
  while (ia != va.end() && ib != vb.end()) {
    if (ia->first != ib->first) return ia->first > ib->first;
    if (ia->second != ib->second) return ia->second < ib->second;
    ++ia;
    ++ib;
  }
  return false;
}

inline void skip_ws(const std::string& s, std::size_t& i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

}  // namespace detail

inline std::string Monomial::str() const {
  if (entries_.empty()) return "1";
  std::vector<std::pair<std::string, Integer>> named;
  for (const auto& [id, e] : entries_)
    named.emplace_back(VarTable::instance().name(id), e);
  std::sort(named.begin(), named.end());
  std::ostringstream os;
  bool first = true;
  for (const auto& [name, e] : named) {
    if (!first) os << '*';
    first = false;
    os << name;
    if (e != 1) os << '^' << e;
  }
  return os.str();
}

inline Monomial Monomial::parse(const std::string& raw) {
  std::string text = raw;
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
    text.erase(text.begin());
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t'))
    text.pop_back();
  if (text.empty()) throw parse_error("empty monomial");
  if (text == "1") return Monomial();
  std::vector<Entry> entries;
  std::size_t i = 0;
  while (i < text.size()) {
    detail::skip_ws(text, i);
    std::size_t start = i;
    while (i < text.size() && text[i] != '*' && text[i] != '^' &&
           text[i] != ' ')
      ++i;
    std::string name = text.substr(start, i - start);
    if (name.empty()) throw parse_error("malformed monomial '" + text + "'");
    Integer exp = 1;
    detail::skip_ws(text, i);
    if (i < text.size() && text[i] == '^') {
      ++i;
      std::size_t es = i;
      while (i < text.size() &&
             (std::isdigit(static_cast<unsigned char>(text[i])) ||
              text[i] == '-'))
        ++i;
      if (es == i) throw parse_error("missing exponent in '" + text + "'");
      exp = Integer(text.substr(es, i - es));
    }
    entries.emplace_back(VarTable::instance().id(name), std::move(exp));
    detail::skip_ws(text, i);
    if (i < text.size()) {
      if (text[i] != '*')
        throw parse_error("expected '*' in monomial '" + text + "'");
      ++i;
    }
  }
  return Monomial::of(std::move(entries));
}

/// Canonical text form, e.g. "3*X1^2*X2 + -1*X3 + 4". Terms descend in
/// name-based graded-lex order; the zero polynomial prints as "0".
inline std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::vector<const TermMap::value_type*> ordered;
  ordered.reserve(terms_.size());
  for (const auto& t : terms_) ordered.push_back(&t);
  std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
    return detail::name_graded_less(b->first, a->first);
  });
  std::ostringstream os;
  bool first = true;
  for (const auto* t : ordered) {
    if (!first) os << " + ";
    first = false;
    if (t->first.empty())
      os << t->second;
    else if (t->second == 1)
      os << t->first.str();
    else
      os << t->second << '*' << t->first.str();
  }
  return os.str();
}

/// Parses the text form produced by str(); also accepts '-' between terms.
inline Polynomial Polynomial::parse(const std::string& text,
                                    std::uint64_t modulus) {
  Polynomial p(modulus);
  std::size_t i = 0;
  bool negate = false;
  detail::skip_ws(text, i);
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negate = text[i] == '-';
    ++i;
  }
  while (i < text.size()) {
    detail::skip_ws(text, i);
    // coefficient
    Integer coeff = 1;
    bool saw_coeff = false;
    if (i < text.size() &&
        (std::isdigit(static_cast<unsigned char>(text[i])) ||
         text[i] == '-')) {
      std::size_t cs = i;
      if (text[i] == '-') ++i;
      while (i < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[i])))
        ++i;
      coeff = Integer(text.substr(cs, i - cs));
      saw_coeff = true;
      detail::skip_ws(text, i);
      if (i < text.size() && text[i] == '*') {
        ++i;
        detail::skip_ws(text, i);
      }
    }
    // monomial part up to the next top-level + or -
    std::size_t ms = i;
    while (i < text.size() && text[i] != '+' && text[i] != '-') ++i;
    std::string mono = text.substr(ms, i - ms);
    while (!mono.empty() && (mono.back() == ' ' || mono.back() == '\t'))
      mono.pop_back();
    Monomial m;
    if (!mono.empty() && mono != "1")
      m = Monomial::parse(mono);
    else if (mono.empty() && !saw_coeff)
      throw parse_error("malformed polynomial '" + text + "'");
    p.add_term(std::move(m), negate ? -coeff : coeff, nullptr);
    detail::skip_ws(text, i);
    if (i < text.size()) {
      if (text[i] == '+') {
        negate = false;
        ++i;
      } else if (text[i] == '-') {
        negate = true;
        ++i;
      } else {
        throw parse_error("expected '+' between terms in '" + text + "'");
      }
      detail::skip_ws(text, i);
    }
  }
  return p;
}

}  // namespace slp
