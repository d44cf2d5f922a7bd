#include "factor_tables.hpp"

namespace robust_scale::tables {

namespace {
#include "mad_factors_table.inc"
}  // namespace

std::span<const MadFactorEntry> mad_factor_entries() { return kMadFactorTable; }

}  // namespace robust_scale::tables
