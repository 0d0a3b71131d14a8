#pragma once

// Brute-force reference inference over FD sets, written independently of
// the graph engine: attribute-set closure, the transitivity+union fixpoint,
// and exhaustive subset saturation for tiny universes.

#include <set>
#include <string>
#include <vector>

#include "fdpg/schema.hpp"

namespace fdpg::oracle {

using AttrSet = std::set<std::string>;
using FdSet = std::set<FD>;

/// X+ under sigma.
AttrSet attribute_closure(const AttrSet& x, const FdSet& sigma);

/// Least fixpoint of: sigma ⊆ R; (Y -> a) ∈ R and (X_i -> y_i) ∈ R for every
/// y_i ∈ Y gives (∪X_i -> a) ∈ R unless a ∈ ∪X_i. Throws std::runtime_error
/// if the round bound 2^|attrs|·|attrs| is exceeded.
FdSet tu_fixpoint(const FdSet& sigma);

/// Every non-trivial X -> a with X a non-empty subset of `attrs` and
/// a ∈ X+ \ X. Exponential; meant for |attrs| <= 8.
FdSet implied_fds(const std::vector<std::string>& attrs, const FdSet& sigma);

struct DiffReport {
  FdSet only_in_a;
  FdSet only_in_b;

  bool empty() const { return only_in_a.empty() && only_in_b.empty(); }
  std::string str() const;
};

DiffReport equiv_check(const FdSet& a, const FdSet& b);

FdSet to_set(const std::vector<FD>& fds);

}  // namespace fdpg::oracle
