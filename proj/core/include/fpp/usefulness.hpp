#pragma once

#include <map>
#include <string>

#include "fpp/distribution.hpp"

namespace fpp {

struct PcEntry {
  double bond = 0.0;           // p_c, Bernoulli bond percolation
  double oriented_bond = 0.0;  // oriented bond percolation threshold
  std::string provenance;
};

/// Critical probabilities by dimension. The defaults are published numerical
/// estimates (approximate); any entry can be overridden.
class PcTable {
 public:
  static PcTable defaults();

  void set(int dim, PcEntry entry);
  bool has(int dim) const { return entries_.count(dim) != 0; }
  /// Throws UnknownDimension.
  const PcEntry& at(int dim) const;
  const std::map<int, PcEntry>& entries() const noexcept { return entries_; }

 private:
  std::map<int, PcEntry> entries_;
};

enum class UsefulClause { kZeroMinimum, kPositiveMinimum };

struct UsefulnessReport {
  bool useful = false;
  UsefulClause clause = UsefulClause::kZeroMinimum;
  double support_min = 0.0;  // r
  double mass_at_min = 0.0;  // F(r), atom at r included
  double threshold = 0.0;    // p_c or oriented p_c
  double margin = 0.0;       // threshold - F(r); positive iff useful
};

/// Useful iff F(0) < p_c when r = 0, or F(r) < oriented p_c when r > 0.
UsefulnessReport check_useful(const DistributionSpec& spec, int dim,
                              const PcTable& table = PcTable::defaults());

}  // namespace fpp
