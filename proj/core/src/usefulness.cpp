#include "fpp/usefulness.hpp"

#include <fmt/format.h>

#include "fpp/errors.hpp"

namespace fpp {

PcTable PcTable::defaults() {
  PcTable t;
  t.set(2, {0.5, 0.6447, "bond p_c(Z^2)=1/2 exact (Kesten); oriented ~0.6447 (series/MC estimates)"});
  t.set(3, {0.2488, 0.3822, "bond p_c(Z^3)~0.2488, oriented ~0.3822 (MC estimates)"});
  return t;
}

void PcTable::set(int dim, PcEntry entry) {
  if (!(entry.bond > 0 && entry.bond < 1 && entry.oriented_bond > 0 && entry.oriented_bond < 1)) {
    fail(ErrorCode::kInvalidSpec, fmt::format("p_c entries for d={} must lie in (0,1)", dim));
  }
  if (entry.oriented_bond < entry.bond) {
    fail(ErrorCode::kInvalidSpec, fmt::format("oriented p_c below p_c for d={}", dim));
  }
  entries_[dim] = std::move(entry);
}

const PcEntry& PcTable::at(int dim) const {
  const auto it = entries_.find(dim);
  if (it == entries_.end()) {
    fail(ErrorCode::kUnknownDimension, fmt::format("no critical probabilities for d={}", dim));
  }
  return it->second;
}

UsefulnessReport check_useful(const DistributionSpec& spec, int dim, const PcTable& table) {
  const PcEntry& pc = table.at(dim);
  UsefulnessReport rep;
  rep.support_min = spec.support_min();
  rep.mass_at_min = spec.cdf(rep.support_min);
  if (rep.support_min == 0.0) {
    rep.clause = UsefulClause::kZeroMinimum;
    rep.threshold = pc.bond;
  } else {
    rep.clause = UsefulClause::kPositiveMinimum;
    rep.threshold = pc.oriented_bond;
  }
  rep.margin = rep.threshold - rep.mass_at_min;
  rep.useful = rep.mass_at_min < rep.threshold;
  return rep;
}

}  // namespace fpp
