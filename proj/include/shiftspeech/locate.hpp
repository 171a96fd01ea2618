#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>

#include "shiftspeech/common.hpp"
#include "shiftspeech/ingest.hpp"

namespace shiftspeech {

inline constexpr int kDefaultRssiFloor = 150;

/// One location estimate per minute of a shift.
struct LocationTimeline {
    std::string participant_id;
    ShiftDate shift_date;
    std::array<Location, kShiftMinutes> slots{};

    LocationTimeline() { slots.fill(Location::OutsideUnit); }

    friend bool operator==(const LocationTimeline&, const LocationTimeline&) = default;
};

/// Per minute: drop readings below `rssi_floor`, then take the category of the
/// strongest remaining hub. Minutes without a surviving reading are OutsideUnit.
/// Observations outside [0, 720) are ignored. Throws UnknownHub.
LocationTimeline estimate_timeline(std::span<const RssiObservation> rssi_for_shift, const HubTable& hubs,
                                   int rssi_floor = kDefaultRssiFloor);

/// Throws OutOfRange unless minute_index is in [0, 720).
Location location_of(const LocationTimeline& timeline, int minute_index);

/// Debug export: participant_id,shift_date,minute_index,category.
void write_timelines_csv(const std::filesystem::path& path, std::span<const LocationTimeline> timelines);
std::vector<LocationTimeline> read_timelines_csv(const std::filesystem::path& path);

}  // namespace shiftspeech
