#pragma once

// Synthetic cohorts with planted group effects, plus the ground truth needed
// to check that the extraction pipeline recovers them.
//
// Participant k draws from std::mt19937_64(splitmix64(seed ^ splitmix64(k + 1))),
// so the output does not depend on how participants are scheduled across threads.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "shiftspeech/pipeline.hpp"
#include "shiftspeech/predict.hpp"

namespace shiftspeech {

/// Stationary room occupancy: ns, pat, loungemed, outside.
using Occupancy = std::array<double, 4>;

struct CohortSpec {
    std::uint64_t seed = 7;
    int n_per_cell = 5;  // participants per (shift x unit) cell
    int n_shifts = 6;
    double short_participant_fraction = 0.1;  // these get `short_participant_shifts` shifts only
    int short_participant_shifts = 3;

    int frames_per_recording = 250;
    double foreground_fraction = 0.9;             // of frames in a wearer recording
    double background_foreground_fraction = 0.2;  // of frames in ambient-speech recordings
    double background_rate = 0.05;                // ambient recordings per silent minute
    double out_of_window_rate = 0.3;              // shifts that run past minute 719
    double voiced_fraction = 0.7;

    std::array<double, 2> inter_session{6.0, 9.0};  // median minutes, day / night
    double inter_session_cv = 0.3;
    double interaction_rate_sd = 0.1;  // log-scale spread of per-participant medians
    std::array<double, 2> gt1min{0.38, 0.31};  // day / night

    Occupancy occupancy_icu{0.28, 0.52, 0.08, 0.12};
    Occupancy occupancy_non_icu{0.34, 0.40, 0.14, 0.12};
    double room_stay_prob = 0.8;

    double arousal_pos_base = 0.25;
    double arousal_neg_base = 0.25;
    std::array<double, 2> arousal_pos_shift{0.0, 0.0};   // day / night, inside the window
    std::array<double, 2> arousal_neg_shift{0.0, 0.04};
    int arousal_window_start = 0;  // blocks, inclusive
    int arousal_window_end = 11;
    double arousal_trait_scale = 0.08;  // state-probability change per trait sd
    double arousal_offset_sd = 1.5;     // high/low state shift, in frame sd units

    std::array<double, 2> walk_ratio{0.30, 0.26};
    double walk_ratio_sd = 0.05;
    std::array<double, 2> sleep_hours{6.8, 6.1};
    double sleep_hours_sd = 0.6;
    double sleep_trait_scale = 0.5;  // hours per trait sd

    double label_pos_coupling = 6.0;   // PANAS points per trait sd
    double label_neg_coupling = 6.0;
    double label_swls_coupling = 0.8;  // SWLS points per trait sd
    double label_noise = 2.0;          // PANAS points; SWLS uses a quarter of it

    /// Throws InvalidSpec.
    void validate() const;

    friend bool operator==(const CohortSpec&, const CohortSpec&) = default;
};

/// Flat `key = value` file; `#` starts a comment. Unknown keys, malformed
/// values and invalid specs throw InvalidSpec.
CohortSpec parse_cohort_spec(const std::filesystem::path& path);
CohortSpec parse_cohort_spec_text(std::string_view text);

/// Every key with its value, in documented order; parses back to an equal spec.
std::string format_cohort_spec(const CohortSpec& spec);

struct ParticipantTruth {
    std::string participant_id;
    ShiftType shift_type = ShiftType::Day;
    UnitType unit_type = UnitType::ICU;
    int n_shifts = 0;
    bool passes_min_days = true;  // under the default five-day filter
    double inter_session_median = 0;
    double gt1min_ratio = 0;
    double trait_pos = 0;
    double trait_neg = 0;
    double trait_sleep = 0;
    double p_high = 0;  // outside the arousal window
    double p_low = 0;
};

struct GroundTruth {
    CohortSpec spec;
    std::vector<ParticipantTruth> participants;
    std::vector<std::string> shift_features;  // planted day/night differences
    std::vector<std::string> unit_features;   // planted icu/non_icu differences
    std::array<std::vector<std::string>, 3> label_features;  // per label in kLabelNames order
};

/// The fixed hub layout used by every simulated cohort.
HubTable simulated_hubs();

struct SimulatedParticipant {
    ParticipantInput input;
    ParticipantTruth truth;
};

/// Generates participant `index` of the cohort described by `spec`.
SimulatedParticipant generate_participant(const CohortSpec& spec, std::size_t index);

std::size_t cohort_size(const CohortSpec& spec);

/// Writes the five canonical files and ground_truth.json into `out_dir`.
GroundTruth generate(const CohortSpec& spec, const std::filesystem::path& out_dir);

/// Generates the cohort in memory.
Cohort generate_cohort(const CohortSpec& spec, GroundTruth* truth = nullptr);

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth);
GroundTruth read_ground_truth(const std::filesystem::path& path);

/// Generate-and-extract without touching the disk; each participant is
/// produced and reduced inside one OpenMP iteration. Matches
/// extract_cohort(generate_cohort(spec)). Throws EmptyCohort.
ExtractionResult simulate_and_extract(const CohortSpec& spec, const ExtractionConfig& config,
                                      GroundTruth* truth = nullptr);

struct RecoveryCheck {
    std::string quantity;
    std::string group;
    double planted = 0;
    double recovered = 0;
    double relative_error = 0;
};

struct FlagCheck {
    std::string feature;
    bool planted = false;
    bool flagged = false;
    double p_value = 1;
};

struct VerificationReport {
    std::vector<RecoveryCheck> recovery;
    std::vector<FlagCheck> shift_flags;
    std::vector<FlagCheck> unit_flags;
    std::string label;                  // empty when no report.json was given
    std::vector<std::string> top_features;
    std::vector<std::string> planted_in_top;
    std::vector<std::string> planted_missing;
};

/// Compares the extracted feature table (and optionally a classifier report)
/// against the planted quantities.
VerificationReport verify_against_truth(const FeatureTable& table, const GroundTruth& truth,
                                        const ReportSummary* report = nullptr, std::size_t top_k = 10);

void write_verification_json(const std::filesystem::path& path, const VerificationReport& report);

}  // namespace shiftspeech
