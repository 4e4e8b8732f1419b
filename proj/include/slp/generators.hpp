#pragma once

#include <string>
#include <vector>

#include "slp/circuit.hpp"
#include "slp/common.hpp"
#include "slp/polynomial.hpp"

namespace slp {

/// Knobs for seeded random circuits used by the oracle-equivalence suites.
struct RandomCircuitOptions {
  std::size_t max_gates = 12;   // hard cap (<= 64)
  unsigned n_vars = 3;
  bool monotone = false;        // +1 constants only
  bool mult_disjoint = false;   // keep every mul gate's operands disjoint
  unsigned var_weight = 5;      // leaf kind weights
  unsigned const_weight = 2;
  unsigned add_weight = 5;      // gate kind weights
  unsigned mul_weight = 4;
};

/// Random circuit with <= max_gates gates and a single sink. Gates are drawn
/// bottom-up with random sharing; unreachable gates are pruned, so the result
/// is usually smaller than the cap.
inline Circuit random_circuit(Rng& rng, const RandomCircuitOptions& opt) {
  if (opt.max_gates > 64)
    throw circuit_error("random_circuit: max_gates capped at 64");
  CircuitBuilder b(opt.monotone);
  std::vector<std::uint64_t> desc;  // descendant bitset per gate
  auto track = [&](int id, std::uint64_t bits) {
    desc.resize(static_cast<size_t>(id) + 1, 0);
    desc[static_cast<size_t>(id)] = bits | (1ULL << id);
    return id;
  };
  auto leaf = [&]() {
    if (rng.below(opt.var_weight + opt.const_weight) < opt.var_weight) {
      std::string name = "X" + std::to_string(1 + rng.below(opt.n_vars));
      return track(b.var_leaf(name), 0);
    }
    int v = opt.monotone || rng.chance(1, 2) ? 1 : -1;
    return track(b.constant(v), 0);
  };
  // Seed pool
  const std::size_t n_leaves = 1 + rng.below(std::max<std::size_t>(
      std::size_t{1}, opt.max_gates / 3));
  for (std::size_t i = 0; i < n_leaves; ++i) leaf();

  while (b.size() < opt.max_gates) {
    const std::size_t remaining = opt.max_gates - b.size();
    if (remaining < 1) break;
    bool make_mul =
        rng.below(opt.add_weight + opt.mul_weight) >= opt.add_weight;
    int c0 = static_cast<int>(rng.below(b.size()));
    int c1 = static_cast<int>(rng.below(b.size()));
    if (make_mul && opt.mult_disjoint) {
      bool found = false;
      for (int tries = 0; tries < 8 && !found; ++tries) {
        c1 = static_cast<int>(rng.below(b.size()));
        found = (desc[static_cast<size_t>(c0)] &
                 desc[static_cast<size_t>(c1)]) == 0;
      }
      if (!found) {
        if (b.size() + 2 > opt.max_gates) break;
        c1 = leaf();  // a fresh leaf is always disjoint
      }
    }
    std::uint64_t bits =
        desc[static_cast<size_t>(c0)] | desc[static_cast<size_t>(c1)];
    int id = make_mul ? b.mul({c0, c1}) : b.add({c0, c1});
    track(id, bits);
  }
  return b.finish(static_cast<int>(b.size()) - 1);
}

/// Retries random_circuit until the expansion fits the budget; the expansion
/// is returned alongside so callers do not pay for it twice.
inline std::pair<Circuit, Polynomial> random_circuit_within_budget(
    Rng& rng, const RandomCircuitOptions& opt, const Budget& budget,
    int max_tries = 64) {
  for (int t = 0; t < max_tries; ++t) {
    Circuit c = random_circuit(rng, opt);
    try {
      Polynomial p = expand(c, budget);
      return {std::move(c), std::move(p)};
    } catch (const budget_error&) {
      continue;
    }
  }
  throw budget_error("random_circuit_within_budget: no fitting circuit found");
}

/// A monomial of p chosen uniformly among its terms; p must be nonzero.
inline Monomial random_term_of(Rng& rng, const Polynomial& p) {
  std::size_t k = static_cast<size_t>(rng.below(p.term_count()));
  auto it = p.terms().begin();
  std::advance(it, static_cast<long>(k));
  return it->first;
}

/// An arbitrary small monomial over X1..Xn (not necessarily present in any
/// particular polynomial).
inline Monomial random_monomial(Rng& rng, unsigned n_vars, unsigned max_exp) {
  std::vector<Monomial::Entry> entries;
  for (unsigned v = 1; v <= n_vars; ++v) {
    std::uint64_t e = rng.below(max_exp + 1);
    if (e > 0)
      entries.emplace_back(
          VarTable::instance().id("X" + std::to_string(v)), e);
  }
  return Monomial::of(std::move(entries));
}

}  // namespace slp
