#include "faircover/types.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "faircover/errors.hpp"

namespace faircover {

Catalog::Catalog(std::vector<std::string> stakeholder_names, std::vector<ItemRecord> items)
    : names_(std::move(stakeholder_names)), items_(std::move(items)) {
  if (names_.empty()) throw ValidationError("catalog needs at least one stakeholder");
  if (items_.empty()) throw ValidationError("catalog needs at least one item");
  {
    std::unordered_set<std::string> seen;
    for (const auto& name : names_) {
      if (!seen.insert(name).second)
        throw ValidationError("duplicate stakeholder name '" + name + "'");
    }
  }
  inventory_.assign(names_.size(), 0);
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const auto& rec = items_[i];
    if (rec.item.value != i)
      throw ValidationError("item id " + std::to_string(rec.item.value) + " at position " +
                            std::to_string(i) + "; ids must be 0..n-1 in order");
    if (!(rec.cost >= 0.0) || !std::isfinite(rec.cost))
      throw ValidationError("item " + std::to_string(i) + " has invalid cost");
    for (std::size_t j = 0; j < rec.memberships.size(); ++j) {
      const auto s = rec.memberships[j];
      if (s.value >= names_.size())
        throw ValidationError("item " + std::to_string(i) + " references unknown stakeholder " +
                              std::to_string(s.value));
      if (j > 0 && !(rec.memberships[j - 1] < s))
        throw ValidationError("item " + std::to_string(i) +
                              " memberships must be sorted and unique");
      ++inventory_[s.value];
    }
  }
}

const ItemRecord& Catalog::item(ItemId id) const {
  if (!contains(id)) throw ValidationError("unknown item id " + std::to_string(id.value));
  return items_[id.value];
}

const std::string& Catalog::stakeholder_name(StakeholderId s) const {
  if (s.value >= names_.size())
    throw ValidationError("unknown stakeholder id " + std::to_string(s.value));
  return names_[s.value];
}

std::size_t Catalog::inventory_size(StakeholderId s) const {
  if (s.value >= names_.size())
    throw ValidationError("unknown stakeholder id " + std::to_string(s.value));
  return inventory_[s.value];
}

void validate_query(const Catalog& catalog, const BuyerQuery& query) {
  if (query.candidates.empty())
    throw ValidationError("buyer '" + query.buyer + "' has no candidates");
  std::vector<bool> seen(catalog.item_count(), false);
  for (const auto& c : query.candidates) {
    if (!catalog.contains(c.item))
      throw ValidationError("buyer '" + query.buyer + "' references unknown item id " +
                            std::to_string(c.item.value));
    if (seen[c.item.value])
      throw ValidationError("buyer '" + query.buyer + "' lists item " +
                            std::to_string(c.item.value) + " twice");
    seen[c.item.value] = true;
    if (!std::isfinite(c.utility))
      throw ValidationError("buyer '" + query.buyer + "' item " + std::to_string(c.item.value) +
                            " has non-finite utility");
  }
}

}  // namespace faircover
