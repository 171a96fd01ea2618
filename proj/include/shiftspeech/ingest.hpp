#pragma once

// Canonical cohort files: typed rows, validation, and the cohort filters.

#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shiftspeech/common.hpp"

namespace shiftspeech {

inline constexpr int kRssiMin = 136;
inline constexpr int kRssiMax = 193;

struct ParticipantProfile {
    std::string participant_id;
    ShiftType shift_type = ShiftType::Day;
    UnitType unit_type = UnitType::ICU;
    int pos_affect = 10;            // PANAS positive sum, 10..50
    int neg_affect = 10;            // PANAS negative sum, 10..50
    double life_satisfaction = 1;  // SWLS item mean, 1..7

    friend bool operator==(const ParticipantProfile&, const ParticipantProfile&) = default;
};

/// One short-hop acoustic observation. `log_pitch` is NaN on unvoiced frames.
struct FeatureFrame {
    double log_pitch = std::numeric_limits<double>::quiet_NaN();
    double intensity = 0;
    double hf_lf_ratio = 0;
    double foreground_prob = 0;
    std::optional<bool> foreground;  // precomputed decision, when the source provides one

    bool voiced() const noexcept { return log_pitch == log_pitch; }
    friend bool operator==(const FeatureFrame& a, const FeatureFrame& b);
};

struct RecordingSegment {
    std::string participant_id;
    ShiftDate shift_date;
    int minute_index = 0;  // minutes since shift start
    std::vector<FeatureFrame> frames;

    friend bool operator==(const RecordingSegment&, const RecordingSegment&) = default;
};

struct RssiObservation {
    std::string participant_id;
    ShiftDate shift_date;
    int minute_index = 0;
    std::string hub_id;
    int rssi = kRssiMin;

    friend bool operator==(const RssiObservation&, const RssiObservation&) = default;
};

struct HubRecord {
    std::string hub_id;
    HubCategory category = HubCategory::NursingStation;

    friend bool operator==(const HubRecord&, const HubRecord&) = default;
};

class HubTable {
public:
    HubTable() = default;
    explicit HubTable(std::vector<HubRecord> hubs);  // throws Error on duplicate hub_id

    const HubRecord* find(const std::string& hub_id) const;
    const std::vector<HubRecord>& records() const noexcept { return hubs_; }
    std::size_t size() const noexcept { return hubs_.size(); }

    friend bool operator==(const HubTable& a, const HubTable& b) { return a.hubs_ == b.hubs_; }

private:
    std::vector<HubRecord> hubs_;
    std::map<std::string, std::size_t, std::less<>> index_;
};

struct DailyPhysiology {
    std::string participant_id;
    ShiftDate shift_date;
    double walk_ratio = 0;   // [0,1]
    double sleep_hours = 0;  // [0,24]

    friend bool operator==(const DailyPhysiology&, const DailyPhysiology&) = default;
};

struct IngestReport {
    std::size_t profiles = 0;
    std::size_t hubs = 0;
    std::size_t rssi = 0;
    std::size_t recordings = 0;
    std::size_t physiology = 0;
    std::size_t rssi_clamped = 0;
};

struct Cohort {
    std::vector<ParticipantProfile> profiles;  // sorted by participant_id
    std::vector<RecordingSegment> recordings;
    std::vector<RssiObservation> rssi;
    HubTable hubs;
    std::vector<DailyPhysiology> physiology;
    IngestReport report;

    const ParticipantProfile* find_profile(const std::string& id) const;

    friend bool operator==(const Cohort& a, const Cohort& b) {
        return a.profiles == b.profiles && a.recordings == b.recordings && a.rssi == b.rssi &&
               a.hubs == b.hubs && a.physiology == b.physiology;
    }
};

namespace files {
inline constexpr const char* kParticipants = "participants.csv";
inline constexpr const char* kHubs = "hubs.csv";
inline constexpr const char* kRssi = "rssi.csv";
inline constexpr const char* kRecordings = "recordings.jsonl";
inline constexpr const char* kPhysiology = "physiology.csv";
}  // namespace files

/// Reads and validates the five canonical files of `dir`.
/// Throws MalformedRow, UnknownHub or DuplicateParticipant.
Cohort parse_cohort(const std::filesystem::path& dir);

/// Writes the five canonical files. Output is byte-stable for equal cohorts.
void write_cohort(const std::filesystem::path& dir, const Cohort& cohort);

// Per-file pieces, shared with the simulator's streaming writer.
void write_participants(const std::filesystem::path& path, std::span<const ParticipantProfile> rows);
void write_hubs(const std::filesystem::path& path, const HubTable& hubs);
std::string rssi_header();
std::string format_rssi_row(const RssiObservation& o);
std::string format_recording_json(const RecordingSegment& r);
std::string physiology_header();
std::string format_physiology_row(const DailyPhysiology& p);

/// Parses one recordings.jsonl line. Throws MalformedRow.
RecordingSegment parse_recording_line(std::string_view line, std::size_t lineno);

struct ShiftWindowResult {
    std::vector<RecordingSegment> recordings;
    std::vector<RssiObservation> rssi;
    std::size_t dropped_recordings = 0;
    std::size_t dropped_rssi = 0;
};

/// Keeps events with minute_index in [0, 720).
ShiftWindowResult filter_shift_window(std::span<const RecordingSegment> recordings,
                                      std::span<const RssiObservation> rssi);

using RecordingPredicate = std::function<bool(const RecordingSegment&)>;

/// Keeps participants with at least `min_days` distinct shift dates carrying a
/// recording accepted by `is_valid` (every recording when empty).
Cohort filter_min_days(const Cohort& cohort, int min_days, const RecordingPredicate& is_valid = {});

}  // namespace shiftspeech
