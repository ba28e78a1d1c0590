#pragma once

#include "gdp/scenario.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gdp {

enum class Family { Rose, Dipole };

std::string family_name(Family family);

// Vertex census of one family member: totals, the deterministic/contextual
// split, and a breakdown by the number of diagonal (collapsed) edge matrices,
// with the deterministic share of each bucket alongside.
struct CountReport {
    Family family = Family::Rose;
    int n = 0;
    int m = 0;
    long long total = 0;
    long long deterministic = 0;
    long long contextual = 0;
    std::vector<long long> by_collapsed;                // index = collapsed edge count
    std::vector<long long> by_collapsed_deterministic;  // deterministic share per bucket
    std::string text;                                   // serialized form
};

std::string format_count_report(const CountReport& report);

// Directory of count files keyed by family, size, outcome count, and code
// version. Writes go through a temporary file and an atomic rename, so
// concurrent counting jobs may share a store.
class CountStore {
  public:
    explicit CountStore(std::string directory);

    const std::string& directory() const { return directory_; }

    std::optional<CountReport> load(Family family, int n, int m) const;
    void save(const CountReport& report) const;

  private:
    std::string key_path(Family family, int n, int m) const;

    std::string directory_;
};

// Counts the vertices of the n-loop rose or n-edge dipole with m outcomes.
// Uses the direct support search, cross-checked against full polytope vertex
// enumeration on instances small enough to afford it; a mismatch throws
// std::logic_error. Results are memoized in the optional store.
CountReport kappa(Family family, int n, int m, const CountStore* store = nullptr,
                  long long budget = 50'000'000);

// Contextual vertices without any collapsed edge. Computed twice: directly
// from the census breakdown and independently by inclusion-exclusion over
// collapsed edge patterns (whose fixed-pattern counts reduce to rose counts
// of smaller size in both families). Throws std::logic_error on disagreement.
long long kappa_tilde(Family family, int n, int m, const CountStore* store = nullptr,
                      long long budget = 50'000'000);

// Contextual-vertex lower bound for the complete bipartite graph K_{n1,n2}
// via rose quotients of spanning trees: kappa_tilde of the cycle rank times
// the spanning tree count. Rejects trees (n1 or n2 equal to one).
long long lower_bound_rose(int n1, int n2, int m, const CountStore* store = nullptr);

// The companion bound via dipole quotients of bipartition splits: a sum of
// binomial-weighted dipole kappa_tilde values over the proper block splits.
long long lower_bound_dipole(int n1, int n2, int m, const CountStore* store = nullptr);

// kappa_tilde of the cycle rank times the spanning tree count, for any
// connected scenario; zero when the scenario is a tree.
long long general_lower_bound(const Scenario& S, int m, const CountStore* store = nullptr);

}  // namespace gdp
