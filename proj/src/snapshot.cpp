#include "faircover/snapshot.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "faircover/errors.hpp"

namespace faircover {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error("cannot format double");
  return std::string(buf, end);
}

namespace {

void check_token(const std::string& text, std::string_view what) {
  if (text.empty()) throw ValidationError(std::string(what) + " must not be empty");
  if (text.find_first_of(",|\"\r\n") != std::string::npos)
    throw ValidationError(std::string(what) + " '" + text +
                          "' contains one of , | \" or a line break");
}

/// A CSV table without quoting: header line then data lines.
struct CsvReader {
  std::string_view name;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // 1-based source line of each row

  CsvReader(std::string_view table_name, std::string_view text, std::string_view header)
      : name(table_name) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool saw_header = false;
    while (pos < text.size()) {
      auto eol = text.find('\n', pos);
      if (eol == std::string_view::npos) eol = text.size();
      auto line = text.substr(pos, eol - pos);
      pos = eol + 1;
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty()) continue;
      if (!saw_header) {
        if (line != header)
          throw ParseError(std::string(name) + ": expected header '" + std::string(header) + "'",
                           line_no, 1);
        saw_header = true;
        continue;
      }
      std::vector<std::string> fields;
      std::size_t start = 0;
      while (true) {
        auto comma = line.find(',', start);
        fields.emplace_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
      }
      rows.push_back(std::move(fields));
      lines.push_back(line_no);
    }
    if (!saw_header) throw ParseError(std::string(name) + ": missing header", line_no + 1, 1);
  }

  void expect_fields(std::size_t row, std::size_t count) const {
    if (rows[row].size() != count)
      throw ParseError(std::string(name) + ": expected " + std::to_string(count) + " fields, got " +
                           std::to_string(rows[row].size()),
                       lines[row], 1);
  }

  std::size_t column(std::size_t row, std::size_t field) const {
    std::size_t col = 1;
    for (std::size_t f = 0; f < field; ++f) col += rows[row][f].size() + 1;
    return col;
  }

  template <typename T>
  T number(std::size_t row, std::size_t field) const {
    const auto& text = rows[row][field];
    T value{};
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size())
      throw ParseError(std::string(name) + ": invalid number '" + text + "'", lines[row],
                       column(row, field));
    return value;
  }
};

std::unordered_map<std::string, StakeholderId> name_index(const std::vector<std::string>& names) {
  std::unordered_map<std::string, StakeholderId> index;
  for (std::size_t i = 0; i < names.size(); ++i)
    index.emplace(names[i], StakeholderId{static_cast<std::uint32_t>(i)});
  return index;
}

void finish_queries(const Catalog& catalog, std::vector<BuyerQuery>& queries) {
  for (const auto& q : queries) {
    try {
      validate_query(catalog, q);
    } catch (const ValidationError& e) {
      throw IntegrityError(e.what());
    }
  }
}

/// Converts a byte offset into 1-based line/column.
std::pair<std::size_t, std::size_t> locate(std::string_view text, std::size_t offset) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("cannot write " + path.string());
}

void check_writable(const Snapshot& snapshot) {
  for (const auto& name : snapshot.catalog.stakeholder_names()) check_token(name, "stakeholder name");
  for (const auto& q : snapshot.queries) check_token(q.buyer, "buyer id");
}

}  // namespace

CsvTables to_csv_tables(const Snapshot& snapshot) {
  check_writable(snapshot);
  const auto& catalog = snapshot.catalog;
  CsvTables t;
  std::string s = "stakeholder_id,name\n";
  for (std::size_t i = 0; i < catalog.stakeholder_count(); ++i)
    s += std::to_string(i) + "," + catalog.stakeholder_names()[i] + "\n";
  t.stakeholders = std::move(s);

  std::string items = "item_id,cost,memberships\n";
  for (const auto& rec : catalog.items()) {
    items += std::to_string(rec.item.value) + "," + format_double(rec.cost) + ",";
    for (std::size_t j = 0; j < rec.memberships.size(); ++j) {
      if (j) items += '|';
      items += catalog.stakeholder_name(rec.memberships[j]);
    }
    items += '\n';
  }
  t.items = std::move(items);

  std::string sessions = "buyer_id,item_id,utility\n";
  for (const auto& q : snapshot.queries)
    for (const auto& c : q.candidates)
      sessions += q.buyer + "," + std::to_string(c.item.value) + "," + format_double(c.utility) + "\n";
  t.sessions = std::move(sessions);
  return t;
}

Snapshot from_csv_tables(const CsvTables& tables) {
  CsvReader sh("stakeholders.csv", tables.stakeholders, "stakeholder_id,name");
  std::vector<std::string> names;
  for (std::size_t r = 0; r < sh.rows.size(); ++r) {
    sh.expect_fields(r, 2);
    const auto id = sh.number<std::uint32_t>(r, 0);
    if (id != names.size())
      throw ParseError("stakeholders.csv: ids must be 0..t-1 in order", sh.lines[r], 1);
    names.push_back(sh.rows[r][1]);
  }
  const auto index = name_index(names);

  CsvReader it("items.csv", tables.items, "item_id,cost,memberships");
  std::vector<ItemRecord> items;
  for (std::size_t r = 0; r < it.rows.size(); ++r) {
    it.expect_fields(r, 3);
    ItemRecord rec;
    rec.item = ItemId{it.number<std::uint32_t>(r, 0)};
    if (rec.item.value != items.size())
      throw ParseError("items.csv: ids must be 0..n-1 in order", it.lines[r], 1);
    rec.cost = it.number<double>(r, 1);
    const auto& field = it.rows[r][2];
    std::size_t start = 0;
    while (start < field.size()) {
      auto bar = field.find('|', start);
      if (bar == std::string::npos) bar = field.size();
      const auto name = field.substr(start, bar - start);
      auto found = index.find(name);
      if (found == index.end())
        throw IntegrityError("items.csv line " + std::to_string(it.lines[r]) +
                             ": unknown stakeholder '" + name + "'");
      rec.memberships.push_back(found->second);
      start = bar + 1;
    }
    std::sort(rec.memberships.begin(), rec.memberships.end());
    if (std::adjacent_find(rec.memberships.begin(), rec.memberships.end()) != rec.memberships.end())
      throw ValidationError("items.csv line " + std::to_string(it.lines[r]) +
                            ": stakeholder listed twice");
    items.push_back(std::move(rec));
  }
  Catalog catalog(std::move(names), std::move(items));

  CsvReader se("sessions.csv", tables.sessions, "buyer_id,item_id,utility");
  std::vector<BuyerQuery> queries;
  std::unordered_map<std::string, std::size_t> by_buyer;
  for (std::size_t r = 0; r < se.rows.size(); ++r) {
    se.expect_fields(r, 3);
    const auto& buyer = se.rows[r][0];
    const ItemId item{se.number<std::uint32_t>(r, 1)};
    const double utility = se.number<double>(r, 2);
    if (!catalog.contains(item))
      throw IntegrityError("sessions.csv line " + std::to_string(se.lines[r]) + ": buyer '" + buyer +
                           "' references unknown item id " + std::to_string(item.value));
    auto [pos, inserted] = by_buyer.emplace(buyer, queries.size());
    if (inserted) queries.push_back(BuyerQuery{buyer, {}});
    queries[pos->second].candidates.push_back({item, utility});
  }
  finish_queries(catalog, queries);
  return Snapshot{std::move(catalog), std::move(queries)};
}

std::string to_json_text(const Snapshot& snapshot) {
  const auto& catalog = snapshot.catalog;
  json doc = json::object();
  json stakeholders = json::array();
  for (std::size_t i = 0; i < catalog.stakeholder_count(); ++i)
    stakeholders.push_back({{"stakeholder_id", i}, {"name", catalog.stakeholder_names()[i]}});
  json items = json::array();
  for (const auto& rec : catalog.items()) {
    json members = json::array();
    for (auto s : rec.memberships) members.push_back(catalog.stakeholder_name(s));
    items.push_back({{"item_id", rec.item.value}, {"cost", rec.cost}, {"memberships", members}});
  }
  json sessions = json::array();
  for (const auto& q : snapshot.queries)
    for (const auto& c : q.candidates)
      sessions.push_back({{"buyer_id", q.buyer}, {"item_id", c.item.value}, {"utility", c.utility}});
  // nlohmann::json objects keep keys sorted, which fixes the field order.
  doc["stakeholders"] = std::move(stakeholders);
  doc["items"] = std::move(items);
  doc["sessions"] = std::move(sessions);
  return doc.dump(1) + "\n";
}

Snapshot from_json_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = locate(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(std::string("invalid JSON: ") + e.what(), line, col);
  }
  try {
    std::vector<std::string> names;
    for (const auto& s : doc.at("stakeholders")) {
      if (s.at("stakeholder_id").get<std::size_t>() != names.size())
        throw ValidationError("stakeholder ids must be 0..t-1 in order");
      names.push_back(s.at("name").get<std::string>());
    }
    const auto index = name_index(names);
    std::vector<ItemRecord> items;
    for (const auto& j : doc.at("items")) {
      ItemRecord rec;
      rec.item = ItemId{j.at("item_id").get<std::uint32_t>()};
      rec.cost = j.at("cost").get<double>();
      for (const auto& m : j.at("memberships")) {
        auto found = index.find(m.get<std::string>());
        if (found == index.end())
          throw IntegrityError("item " + std::to_string(rec.item.value) +
                               " references unknown stakeholder '" + m.get<std::string>() + "'");
        rec.memberships.push_back(found->second);
      }
      std::sort(rec.memberships.begin(), rec.memberships.end());
      items.push_back(std::move(rec));
    }
    Catalog catalog(std::move(names), std::move(items));
    std::vector<BuyerQuery> queries;
    std::unordered_map<std::string, std::size_t> by_buyer;
    for (const auto& j : doc.at("sessions")) {
      const auto buyer = j.at("buyer_id").get<std::string>();
      const ItemId item{j.at("item_id").get<std::uint32_t>()};
      if (!catalog.contains(item))
        throw IntegrityError("buyer '" + buyer + "' references unknown item id " +
                             std::to_string(item.value));
      auto [pos, inserted] = by_buyer.emplace(buyer, queries.size());
      if (inserted) queries.push_back(BuyerQuery{buyer, {}});
      queries[pos->second].candidates.push_back({item, j.at("utility").get<double>()});
    }
    finish_queries(catalog, queries);
    return Snapshot{std::move(catalog), std::move(queries)};
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed snapshot JSON: ") + e.what());
  }
}

Snapshot load_snapshot(const fs::path& path) {
  if (fs::is_directory(path)) {
    CsvTables t{read_file(path / "stakeholders.csv"), read_file(path / "items.csv"),
                read_file(path / "sessions.csv")};
    return from_csv_tables(t);
  }
  return from_json_text(read_file(path));
}

void save_snapshot(const Snapshot& snapshot, const fs::path& path, FileFormat format) {
  if (format == FileFormat::Json) {
    check_writable(snapshot);
    write_file(path, to_json_text(snapshot));
    return;
  }
  const auto tables = to_csv_tables(snapshot);
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw IoError("cannot create directory " + path.string() + ": " + ec.message());
  write_file(path / "stakeholders.csv", tables.stakeholders);
  write_file(path / "items.csv", tables.items);
  write_file(path / "sessions.csv", tables.sessions);
}

}  // namespace faircover
