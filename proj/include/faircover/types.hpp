#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace faircover {

/// Dense index into a catalog's stakeholder table.
struct StakeholderId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(StakeholderId, StakeholderId) = default;
};

/// Dense index into a catalog's item table.
struct ItemId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(ItemId, ItemId) = default;
};

struct ItemRecord {
  ItemId item;
  std::vector<StakeholderId> memberships;  // sorted, unique; may be empty
  double cost = 0.0;
  friend bool operator==(const ItemRecord&, const ItemRecord&) = default;
};

/// Immutable item universe. Construction validates every invariant, so a
/// Catalog that exists is always consistent.
class Catalog {
 public:
  Catalog(std::vector<std::string> stakeholder_names, std::vector<ItemRecord> items);

  std::size_t item_count() const noexcept { return items_.size(); }
  std::size_t stakeholder_count() const noexcept { return names_.size(); }

  const ItemRecord& item(ItemId id) const;
  const std::vector<ItemRecord>& items() const noexcept { return items_; }
  std::span<const StakeholderId> memberships(ItemId id) const { return item(id).memberships; }
  double cost(ItemId id) const { return item(id).cost; }

  const std::string& stakeholder_name(StakeholderId s) const;
  const std::vector<std::string>& stakeholder_names() const noexcept { return names_; }

  /// |U(s)|, the size of a stakeholder's inventory.
  std::size_t inventory_size(StakeholderId s) const;

  bool contains(ItemId id) const noexcept { return id.value < items_.size(); }

  friend bool operator==(const Catalog& a, const Catalog& b) {
    return a.names_ == b.names_ && a.items_ == b.items_;
  }

 private:
  std::vector<std::string> names_;
  std::vector<ItemRecord> items_;
  std::vector<std::size_t> inventory_;
};

struct Candidate {
  ItemId item;
  double utility = 0.0;
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// One buyer's candidate set U_b with utility scores r_{u,b}.
struct BuyerQuery {
  std::string buyer;
  std::vector<Candidate> candidates;
  friend bool operator==(const BuyerQuery&, const BuyerQuery&) = default;
};

/// Throws ValidationError naming the offending id when the query does not fit
/// the catalog (empty, unknown id, duplicate id, non-finite utility).
void validate_query(const Catalog& catalog, const BuyerQuery& query);

}  // namespace faircover
