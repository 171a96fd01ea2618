#pragma once

// End-to-end extraction: window filter -> foreground -> min-days -> per
// participant {timeline, sessions, arousal, per-shift features, roll-up}.
//
// extract_cohort() runs the per-participant stage in an OpenMP loop;
// extract_cohort_serial() is the single-threaded reference with identical output.

#include <filesystem>
#include <vector>

#include "shiftspeech/aggregate.hpp"
#include "shiftspeech/foreground.hpp"

namespace shiftspeech {

struct ExtractionConfig {
    ForegroundFilter filter = ForegroundFilter::threshold();
    int min_frames = kDefaultMinForegroundFrames;
    int rssi_floor = kDefaultRssiFloor;
    double arousal_threshold = kDefaultArousalThreshold;
    int min_days = 5;
};

/// Everything observed for one participant.
struct ParticipantInput {
    ParticipantProfile profile;
    std::vector<RecordingSegment> recordings;
    std::vector<RssiObservation> rssi;
    std::vector<DailyPhysiology> physiology;
};

struct ParticipantResult {
    std::string participant_id;
    std::vector<LocationTimeline> timelines;  // one per shift with valid recordings
    std::vector<SpeechSession> sessions;      // ordered by (shift_date, start)
    std::vector<RatedRecording> rated;        // ordered by (shift_date, minute_index)
    std::vector<ShiftFeatures> shifts;
    ParticipantBlocks blocks;
    ParticipantFeatureVector features;
    std::size_t valid_recordings = 0;
    std::size_t invalid_recordings = 0;

    std::size_t recorded_days() const noexcept { return timelines.size(); }
};

/// Thrown when no participant survives the filters.
class EmptyCohort : public Error {
public:
    using Error::Error;
};

/// Per-participant stage. Out-of-window events are ignored here as well.
ParticipantResult extract_participant(const ParticipantInput& input, const HubTable& hubs,
                                      const ExtractionConfig& config);

struct ExtractionResult {
    std::vector<ParticipantResult> participants;  // sorted by participant_id
    FeatureTable table;
    std::size_t dropped_recordings = 0;    // outside the shift window
    std::size_t dropped_rssi = 0;
    std::size_t removed_participants = 0;  // by the min-days filter
};

std::vector<ParticipantInput> split_by_participant(const Cohort& cohort);

/// Throws EmptyCohort when no participant passes the min-days filter.
ExtractionResult extract_cohort(const Cohort& cohort, const ExtractionConfig& config);
ExtractionResult extract_cohort_serial(const Cohort& cohort, const ExtractionConfig& config);

/// Builds the feature table from already extracted participants.
FeatureTable assemble_table(std::span<const ParticipantResult> participants,
                            std::span<const ParticipantProfile> profiles);

/// Writes sessions.csv, arousal.csv, features.csv, blocks.csv (and
/// timeline.csv when requested) into `out_dir`.
void write_extraction(const std::filesystem::path& out_dir, const ExtractionResult& result,
                      bool with_timelines = false);

}  // namespace shiftspeech
