#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "fsrec/corpus.hpp"
#include "fsrec/errors.hpp"

namespace fsrec {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Splits on tabs if present, else on commas, else on runs of spaces.
// Empty fields are preserved for the tab and comma forms so they can be
// reported.
std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  char sep = 0;
  if (line.find('\t') != std::string_view::npos) {
    sep = '\t';
  } else if (line.find(',') != std::string_view::npos) {
    sep = ',';
  }
  if (sep != 0) {
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(sep, start);
      fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    return fields;
  }
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    if (i >= line.size()) break;
    const auto j = line.find(' ', i);
    fields.push_back(line.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i));
    if (j == std::string_view::npos) break;
    i = j;
  }
  return fields;
}

// Strips comments and surrounding whitespace; returns false for lines to skip.
bool content_of(const std::string& raw, std::string_view& out) {
  std::string_view line = raw;
  if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  out = trim(line);
  return !out.empty();
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

}  // namespace

Corpus load_interactions(std::istream& in, Corpus seed) {
  Corpus out;
  out.users = std::move(seed.users);
  out.items = std::move(seed.items);
  out.tags = std::move(seed.tags);

  // (user, item) -> tag -> count, in insertion-independent sorted form.
  std::map<std::pair<UserId, ItemId>, std::map<TagId, std::uint32_t>> cells;
  std::string raw;
  std::size_t line_no = 0;
  std::size_t records = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line;
    if (!content_of(raw, line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 3) {
      throw ParseError(line_no, "expected 3 fields (user, item, tag), found " + std::to_string(fields.size()));
    }
    for (const auto& f : fields) {
      if (f.empty()) throw ParseError(line_no, "empty field");
    }
    const UserId u = out.users.intern(fields[0]);
    const ItemId i = out.items.intern(fields[1]);
    const TagId t = out.tags.intern(fields[2]);
    ++cells[{u, i}][t];
    ++records;
  }
  if (records == 0) throw EmptyCorpusError("no interaction records found");

  std::vector<std::vector<Entry>> rows(out.users.size());
  for (const auto& [key, tags] : cells) {
    Entry e{key.second, {}};
    for (const auto& [tag, count] : tags) e.tags.push_back({tag, count});
    rows[key.first].push_back(std::move(e));
  }
  out.tensor = TagTensor(out.users.size(), out.items.size(), out.tags.size(), std::move(rows));
  return out;
}

Corpus load_interactions(const std::string& path, Corpus seed) {
  auto in = open_or_throw(path);
  return load_interactions(in, std::move(seed));
}

FriendshipGraph load_friendships(std::istream& in, const IdMap& users) {
  std::vector<std::pair<UserId, UserId>> edges;
  auto resolve = [&](std::string_view key) {
    const auto* id = users.lookup(key);
    if (id == nullptr) throw UnknownUserError(std::string(key));
    return *id;
  };

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line;
    if (!content_of(raw, line)) continue;
    auto fields = split_fields(line);
    for (const auto& f : fields) {
      if (f.empty()) throw ParseError(line_no, "empty field");
    }

    // "group:<id>" or "<id>:" as the first field marks a group line. A bare
    // "group:" followed by the id as its own field is also accepted.
    const std::string_view head = fields.front();
    bool group = false;
    std::size_t first_member = 1;
    if (head.starts_with("group:")) {
      group = true;
      if (head.size() == 6) first_member = 2;
    } else if (head.size() > 1 && head.back() == ':') {
      group = true;
    }

    if (group) {
      if (fields.size() < first_member + 1) throw ParseError(line_no, "group line has no members");
      std::vector<UserId> members;
      for (std::size_t k = first_member; k < fields.size(); ++k) members.push_back(resolve(fields[k]));
      for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) edges.emplace_back(members[a], members[b]);
      }
      continue;
    }
    if (fields.size() != 2) {
      throw ParseError(line_no, "expected a user pair or a group line, found " + std::to_string(fields.size()) +
                                    " fields");
    }
    edges.emplace_back(resolve(fields[0]), resolve(fields[1]));
  }
  return FriendshipGraph(users.size(), edges);
}

FriendshipGraph load_friendships(const std::string& path, const IdMap& users) {
  auto in = open_or_throw(path);
  return load_friendships(in, users);
}

void write_interactions(std::ostream& out, const Corpus& corpus) {
  const auto& t = corpus.tensor;
  for (UserId u = 0; u < t.num_users(); ++u) {
    for (const auto& e : t.row(u)) {
      for (const auto& tc : e.tags) {
        for (std::uint32_t c = 0; c < tc.count; ++c) {
          out << corpus.users.key(u) << '\t' << corpus.items.key(e.item) << '\t' << corpus.tags.key(tc.tag) << '\n';
        }
      }
    }
  }
}

void write_friendships(std::ostream& out, const FriendshipGraph& graph, const IdMap& users) {
  for (UserId u = 0; u < graph.num_users(); ++u) {
    for (UserId f : graph.friends(u)) {
      if (u < f) out << users.key(u) << '\t' << users.key(f) << '\n';
    }
  }
}

void write_id_map(std::ostream& out, const IdMap& map) {
  for (std::size_t id = 0; id < map.size(); ++id) out << id << '\t' << map.key(static_cast<std::uint32_t>(id)) << '\n';
}

IdMap read_id_map(std::istream& in) {
  IdMap map;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    const auto tab = raw.find('\t');
    if (tab == std::string::npos || tab + 1 >= raw.size()) throw ParseError(line_no, "expected '<id>\\t<key>'");
    std::size_t id = 0;
    try {
      id = std::stoul(raw.substr(0, tab));
    } catch (const std::exception&) {
      throw ParseError(line_no, "id is not an integer");
    }
    if (id != map.size()) throw ParseError(line_no, "ids must be dense and ascending");
    map.intern(std::string_view(raw).substr(tab + 1));
  }
  return map;
}

}  // namespace fsrec
