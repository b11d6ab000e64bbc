#include "deskzone/layout.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

#include "deskzone/csv.hpp"
#include "deskzone/error.hpp"

namespace deskzone {

std::size_t LayoutFrame::zone_of_desk(std::size_t desk) const {
  auto it = std::upper_bound(zone_offsets.begin(), zone_offsets.end(), desk);
  return static_cast<std::size_t>(it - zone_offsets.begin()) - 1;
}

std::size_t LayoutFrame::zone_index(const std::string& zone_id) const {
  for (std::size_t z = 0; z < zone_ids.size(); ++z)
    if (zone_ids[z] == zone_id) return z;
  throw InputError("unknown zone id '" + zone_id + "'");
}

std::shared_ptr<const LayoutFrame> LayoutFrame::uniform(std::size_t zones, std::size_t desks_per_zone,
                                                        std::vector<std::string> occupant_ids) {
  if (occupant_ids.size() != zones * desks_per_zone)
    throw InputError("occupant count does not match zones x desks_per_zone");
  auto f = std::make_shared<LayoutFrame>();
  f->zone_offsets.push_back(0);
  for (std::size_t z = 0; z < zones; ++z) {
    f->zone_ids.push_back("z" + std::to_string(z));
    for (std::size_t k = 0; k < desks_per_zone; ++k) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "d%03zu", z * desks_per_zone + k);
      f->desk_ids.emplace_back(buf);
    }
    f->zone_offsets.push_back(f->desk_ids.size());
  }
  f->occupant_ids = std::move(occupant_ids);
  return f;
}

Layout::Layout(std::shared_ptr<const LayoutFrame> frame) : frame_(std::move(frame)) {
  if (!frame_) throw InputError("layout needs a frame");
  if (frame_->occupant_ids.size() != frame_->desks())
    throw InputError("frame must have exactly one occupant per occupied desk");
  assignment_.resize(frame_->desks());
  std::iota(assignment_.begin(), assignment_.end(), 0u);
}

Layout::Layout(std::shared_ptr<const LayoutFrame> frame, std::vector<std::uint32_t> desk_to_occupant)
    : frame_(std::move(frame)), assignment_(std::move(desk_to_occupant)) {
  if (!frame_) throw InputError("layout needs a frame");
  if (assignment_.size() != frame_->desks() || frame_->occupant_ids.size() != frame_->desks() || !is_permutation())
    throw InputError("layout assignment is not a permutation of the frame's occupants");
}

std::vector<std::size_t> Layout::desk_of_occupant() const {
  std::vector<std::size_t> out(assignment_.size());
  for (std::size_t d = 0; d < assignment_.size(); ++d) out[assignment_[d]] = d;
  return out;
}

std::vector<std::size_t> Layout::zone_of_occupant() const {
  std::vector<std::size_t> out(assignment_.size());
  for (std::size_t z = 0; z < zones(); ++z)
    for (auto o : zone_members(z)) out[o] = z;
  return out;
}

bool Layout::is_permutation() const {
  std::vector<bool> seen(assignment_.size(), false);
  for (auto o : assignment_) {
    if (o >= seen.size() || seen[o]) return false;
    seen[o] = true;
  }
  return true;
}

bool operator==(const Layout& a, const Layout& b) {
  if (a.frame_ != b.frame_ && !(a.frame_ && b.frame_ && *a.frame_ == *b.frame_)) return false;
  return a.assignment_ == b.assignment_;
}

Layout random_layout(const std::shared_ptr<const LayoutFrame>& frame, Rng& rng) {
  std::vector<std::uint32_t> perm(frame->desks());
  std::iota(perm.begin(), perm.end(), 0u);
  rng.shuffle(perm);
  return Layout(frame, std::move(perm));
}

Layout layout_from_zone_map(const ZoneMap& map) {
  auto frame = std::make_shared<LayoutFrame>();
  std::vector<std::uint32_t> assignment;
  frame->zone_offsets.push_back(0);
  for (const auto& zone : map.zone_ids) {
    frame->zone_ids.push_back(zone);
    for (const auto& e : map.entries) {
      if (e.zone_id != zone || e.occupant_id.empty()) continue;
      frame->desk_ids.push_back(e.desk_id);
      assignment.push_back(static_cast<std::uint32_t>(frame->occupant_ids.size()));
      frame->occupant_ids.push_back(e.occupant_id);
    }
    frame->zone_offsets.push_back(frame->desk_ids.size());
  }
  return Layout(std::move(frame), std::move(assignment));
}

void write_layout(std::ostream& out, const Layout& layout) {
  const auto& f = layout.frame();
  out << "desk_id,zone_id,occupant_id\n";
  for (std::size_t z = 0; z < f.zones(); ++z)
    for (std::size_t d = f.zone_offsets[z]; d < f.zone_offsets[z + 1]; ++d)
      out << f.desk_ids[d] << ',' << f.zone_ids[z] << ',' << f.occupant_ids[layout.occupant_at(d)] << '\n';
}

Layout read_layout(const std::string& path, const std::shared_ptr<const LayoutFrame>& frame) {
  auto table = csv::read_file(path);
  csv::require_header(table, {"desk_id", "zone_id", "occupant_id"});
  ZoneMap map;
  std::set<std::string> desks, occupants;
  for (const auto& row : table.rows) {
    ZoneMapEntry e{row.fields[2], row.fields[0], row.fields[1]};
    if (e.occupant_id.empty() || e.desk_id.empty() || e.zone_id.empty())
      throw FileError(path, "layout rows need desk_id, zone_id and occupant_id", row.line);
    if (!desks.insert(e.desk_id).second) throw FileError(path, "duplicate desk '" + e.desk_id + "'", row.line);
    if (!occupants.insert(e.occupant_id).second)
      throw FileError(path, "occupant '" + e.occupant_id + "' appears twice", row.line);
    if (map.zone_sizes.find(e.zone_id) == map.zone_sizes.end()) map.zone_ids.push_back(e.zone_id);
    ++map.zone_sizes[e.zone_id];
    map.entries.push_back(std::move(e));
  }
  Layout parsed = layout_from_zone_map(map);
  if (!frame) return parsed;

  // Re-express on the caller's frame: same zones and desks, occupants by id.
  const auto& pf = parsed.frame();
  if (pf.zone_ids != frame->zone_ids || pf.zone_offsets != frame->zone_offsets)
    throw FileError(path, "layout zones do not match the reference zone structure");
  std::map<std::string, std::size_t> desk_pos, occ_pos;
  for (std::size_t d = 0; d < frame->desks(); ++d) desk_pos[frame->desk_ids[d]] = d;
  for (std::size_t o = 0; o < frame->occupant_ids.size(); ++o) occ_pos[frame->occupant_ids[o]] = o;
  std::vector<std::uint32_t> assignment(frame->desks());
  for (std::size_t d = 0; d < pf.desks(); ++d) {
    auto dit = desk_pos.find(pf.desk_ids[d]);
    auto oit = occ_pos.find(pf.occupant_ids[parsed.occupant_at(d)]);
    if (dit == desk_pos.end() || frame->zone_of_desk(dit->second) != pf.zone_of_desk(d))
      throw FileError(path, "desk '" + pf.desk_ids[d] + "' does not match the reference zone structure");
    if (oit == occ_pos.end())
      throw FileError(path, "unknown occupant '" + pf.occupant_ids[parsed.occupant_at(d)] + "'");
    assignment[dit->second] = static_cast<std::uint32_t>(oit->second);
  }
  return Layout(frame, std::move(assignment));
}

}  // namespace deskzone
