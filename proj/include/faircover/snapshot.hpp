#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "faircover/types.hpp"

namespace faircover {

/// A catalog together with its buyer sessions.
struct Snapshot {
  Catalog catalog;
  std::vector<BuyerQuery> queries;
  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

enum class FileFormat { Csv, Json };

/// The three CSV tables of the on-disk format.
///   stakeholders.csv  stakeholder_id,name
///   items.csv         item_id,cost,memberships   (names joined by '|')
///   sessions.csv      buyer_id,item_id,utility
struct CsvTables {
  std::string stakeholders;
  std::string items;
  std::string sessions;
};

CsvTables to_csv_tables(const Snapshot& snapshot);
Snapshot from_csv_tables(const CsvTables& tables);

std::string to_json_text(const Snapshot& snapshot);
Snapshot from_json_text(std::string_view text);

/// A directory is read as the CSV triple; anything else as JSON.
Snapshot load_snapshot(const std::filesystem::path& path);

/// Csv writes the three tables into directory `path` (created if missing);
/// Json writes one file. Output is canonical: load then save reproduces it.
void save_snapshot(const Snapshot& snapshot, const std::filesystem::path& path, FileFormat format);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace faircover
