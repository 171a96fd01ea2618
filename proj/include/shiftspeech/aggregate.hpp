#pragma once

// Per-shift speaking-pattern features, 12-block shift dynamics, and the
// per-participant feature table used by the group tests and the classifier.

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shiftspeech/arousal.hpp"
#include "shiftspeech/ingest.hpp"
#include "shiftspeech/locate.hpp"
#include "shiftspeech/sessionize.hpp"

namespace shiftspeech {

// ---------------------------------------------------------------------------
// Time blocks
// ---------------------------------------------------------------------------

struct TimeBlockSeries {
    std::string feature_name;
    std::array<std::optional<double>, kBlocksPerShift> blocks{};  // block b covers [60b, 60b+60)

    friend bool operator==(const TimeBlockSeries&, const TimeBlockSeries&) = default;
};

struct MinuteEvent {
    int minute_index = 0;
    double value = 0;
};

enum class Reducer { Count, Sum, Mean };

/// Buckets events by hour of shift. Blocks without events stay absent.
/// Events outside [0, 720) are ignored.
TimeBlockSeries block_series(std::string feature_name, std::span<const MinuteEvent> events, Reducer reducer);

struct StartMiddleEnd {
    std::optional<double> start;   // mean of present blocks 0-3
    std::optional<double> middle;  // blocks 4-7
    std::optional<double> end;     // blocks 8-11
};

/// Throws AllAbsent when no block is present.
StartMiddleEnd start_middle_end(const TimeBlockSeries& series);

// ---------------------------------------------------------------------------
// Per-shift features
// ---------------------------------------------------------------------------

enum class ShiftFeature : std::size_t {
    InterSessionTime,
    Gt1minRatioAll,
    Gt1minRatioNs,
    Gt1minRatioPat,
    OccurrenceNs,
    OccurrencePat,
    OccurrenceLoungeMed,
    OccurrenceOutside,
    PosArousalAll,
    NegArousalAll,
    PosArousalNs,
    NegArousalNs,
    PosArousalPat,
    NegArousalPat,
    Count_
};

inline constexpr std::size_t kShiftFeatureCount = static_cast<std::size_t>(ShiftFeature::Count_);

std::string_view feature_name(ShiftFeature f);

struct ShiftFeatures {
    std::string participant_id;
    ShiftDate shift_date;
    std::array<std::optional<double>, kShiftFeatureCount> values{};
    std::size_t n_sessions = 0;
    std::size_t n_recordings = 0;

    std::optional<double>& operator[](ShiftFeature f) { return values[static_cast<std::size_t>(f)]; }
    const std::optional<double>& operator[](ShiftFeature f) const { return values[static_cast<std::size_t>(f)]; }
};

/// Computes every session and arousal feature for one participant-shift.
/// Location-conditioned ratios use sessions whose dominant location matches
/// (>1 min ratio) or recordings whose minute falls at that location (arousal).
ShiftFeatures per_shift_features(std::span<const SpeechSession> sessions, std::span<const RatedRecording> rated,
                                 const LocationTimeline& timeline, double arousal_threshold = kDefaultArousalThreshold);

// ---------------------------------------------------------------------------
// Participant roll-up
// ---------------------------------------------------------------------------

/// Documented column order of the feature table (40 columns).
const std::vector<std::string>& feature_schema();

struct ParticipantFeatureVector {
    std::string participant_id;
    std::vector<std::optional<double>> values;  // aligned with feature_schema()
};

struct ParticipantBlocks {
    std::string participant_id;
    std::vector<TimeBlockSeries> series;
};

/// Rolls per-shift features up (mean and population std over shifts), adds
/// start/middle/end arousal ratios from blocks pooled across shifts, the
/// physiology functionals and the shift/unit indicators.
ParticipantFeatureVector aggregate_participant(const ParticipantProfile& profile,
                                               std::span<const ShiftFeatures> shifts,
                                               const ParticipantBlocks& blocks,
                                               std::span<const DailyPhysiology> physiology);

/// Pooled-over-shifts block series: recordings, session_minutes, pos_arousal,
/// neg_arousal, inter_session_time.
ParticipantBlocks participant_blocks(const std::string& participant_id, std::span<const SpeechSession> sessions,
                                     std::span<const RatedRecording> rated,
                                     double arousal_threshold = kDefaultArousalThreshold);

// ---------------------------------------------------------------------------
// Feature table
// ---------------------------------------------------------------------------

inline constexpr std::array<const char*, 3> kLabelNames{"pos_affect", "neg_affect", "life_satisfaction"};

struct FeatureTable {
    std::vector<std::string> participant_ids;
    std::vector<ShiftType> shift_types;
    std::vector<UnitType> unit_types;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;  // rows[i][j]; NaN marks a missing value
    std::vector<std::array<double, 3>> labels;  // pos_affect, neg_affect, life_satisfaction

    std::size_t size() const noexcept { return rows.size(); }
    std::optional<std::size_t> column_index(std::string_view name) const;
    std::vector<double> column(std::size_t j) const;
    std::vector<double> label(std::string_view name) const;  // throws Error for unknown label
};

/// Assembles the feature table; missing cells are replaced by the column
/// median (0 when a column is entirely missing). Columns follow feature_schema().
FeatureTable build_feature_matrix(std::span<const ParticipantFeatureVector> vectors,
                                  std::span<const ParticipantProfile> profiles);

void write_features_csv(const std::filesystem::path& path, const FeatureTable& table);

/// Reads features.csv. Feature columns may be any subset, in any order; cells
/// must be finite and ratio-type features within [0,1]. Throws MalformedRow.
FeatureTable read_features_csv(const std::filesystem::path& path);

void write_blocks_csv(const std::filesystem::path& path, std::span<const ParticipantBlocks> blocks);
std::vector<ParticipantBlocks> read_blocks_csv(const std::filesystem::path& path);

}  // namespace shiftspeech
