#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "deskzone/ingest.hpp"
#include "deskzone/rng.hpp"

namespace deskzone {

/// Fixed structure of a floor: zones, their occupied desks, and the occupant
/// universe. Shared by every candidate layout of an optimisation run.
struct LayoutFrame {
  std::vector<std::string> zone_ids;
  std::vector<std::size_t> zone_offsets;  // desks of zone z: [offsets[z], offsets[z+1])
  std::vector<std::string> desk_ids;      // zone-major
  std::vector<std::string> occupant_ids;  // occupant index -> id

  std::size_t zones() const noexcept { return zone_ids.size(); }
  std::size_t desks() const noexcept { return desk_ids.size(); }
  std::size_t zone_size(std::size_t z) const { return zone_offsets[z + 1] - zone_offsets[z]; }
  std::size_t zone_of_desk(std::size_t desk) const;
  std::size_t zone_index(const std::string& zone_id) const;

  /// Equal-size zones with generated ids `z0..`, desks `d000..`, occupants
  /// from `occupant_ids` (count must equal the desk total).
  static std::shared_ptr<const LayoutFrame> uniform(std::size_t zones, std::size_t desks_per_zone,
                                                    std::vector<std::string> occupant_ids);

  friend bool operator==(const LayoutFrame&, const LayoutFrame&) = default;
};

/// Assignment of every occupant to exactly one occupied desk. Zone sizes are
/// those of the frame and never change.
class Layout {
 public:
  Layout() = default;
  /// Identity assignment: desk k holds occupant k.
  explicit Layout(std::shared_ptr<const LayoutFrame> frame);
  Layout(std::shared_ptr<const LayoutFrame> frame, std::vector<std::uint32_t> desk_to_occupant);

  const LayoutFrame& frame() const noexcept { return *frame_; }
  const std::shared_ptr<const LayoutFrame>& frame_ptr() const noexcept { return frame_; }

  std::size_t zones() const noexcept { return frame_->zones(); }
  std::size_t desks() const noexcept { return assignment_.size(); }

  std::uint32_t occupant_at(std::size_t desk) const { return assignment_[desk]; }
  std::span<const std::uint32_t> zone_members(std::size_t z) const {
    return std::span<const std::uint32_t>(assignment_).subspan(frame_->zone_offsets[z], frame_->zone_size(z));
  }
  std::span<const std::uint32_t> assignment() const noexcept { return assignment_; }

  void swap_desks(std::size_t a, std::size_t b) { std::swap(assignment_[a], assignment_[b]); }

  /// desk index of every occupant.
  std::vector<std::size_t> desk_of_occupant() const;
  /// zone index of every occupant.
  std::vector<std::size_t> zone_of_occupant() const;

  /// True when every occupant appears exactly once.
  bool is_permutation() const;

  /// Same frame (by content) and same assignment.
  friend bool operator==(const Layout& a, const Layout& b);

 private:
  std::shared_ptr<const LayoutFrame> frame_;
  std::vector<std::uint32_t> assignment_;
};

/// Uniformly random feasible layout on the given frame.
Layout random_layout(const std::shared_ptr<const LayoutFrame>& frame, Rng& rng);

/// Builds the frame and current layout from a zone map. Vacant desks are not
/// part of the frame; they can never receive an occupant.
Layout layout_from_zone_map(const ZoneMap& map);

/// `desk_id,zone_id,occupant_id`, desks in frame order.
void write_layout(std::ostream& out, const Layout& layout);
/// Reads a layout file. Zone order is first appearance. If `frame` is given the
/// file must describe the same desks/zones/occupants and the result shares it.
Layout read_layout(const std::string& path, const std::shared_ptr<const LayoutFrame>& frame = nullptr);

}  // namespace deskzone
