#pragma once

// Rule-based vocal arousal: each recording's feature medians are scored
// against the speaker's own pooled frames, then fused with weights derived
// from each score's rank agreement with the mean score.

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shiftspeech/ingest.hpp"

namespace shiftspeech {

inline constexpr double kDefaultArousalThreshold = 0.25;

enum class ProsodicFeature : std::size_t { LogPitch = 0, Intensity = 1, HfLfRatio = 2 };
inline constexpr std::size_t kProsodicFeatures = 3;

std::string_view to_string(ProsodicFeature f);

/// Speaker baseline: sorted pooled frame values per feature (pitch: voiced frames only).
struct NeutralModel {
    std::array<std::vector<double>, kProsodicFeatures> pools;

    const std::vector<double>& pool(ProsodicFeature f) const { return pools[static_cast<std::size_t>(f)]; }
};

using ScoreTriple = std::array<double, kProsodicFeatures>;

struct FusionWeights {
    std::array<double, kProsodicFeatures> w{};
    std::array<double, kProsodicFeatures> r{};
    bool fallback = false;  // uniform weights because no feature carried rank information
};

struct RatedRecording {
    std::string participant_id;
    ShiftDate shift_date;
    int minute_index = 0;
    ScoreTriple p{};
    double fused = 0;

    friend bool operator==(const RatedRecording&, const RatedRecording&) = default;
};

struct ArousalRatios {
    double pos = 0;
    double neg = 0;
};

/// Pools every frame of the given (foreground-filtered) recordings.
/// Throws InsufficientData naming the first empty pool.
NeutralModel build_neutral(std::span<const RecordingSegment> speaker_recordings);

/// 2 * E[x > pool] - 1 with ties counting one half. Throws EmptyPool.
double percentile_score(double x, std::span<const double> sorted_pool);

/// Per-feature medians over the recording's frames; pitch uses voiced frames
/// and is absent when none are voiced.
std::array<std::optional<double>, kProsodicFeatures> recording_medians(const RecordingSegment& recording);

/// Scores one recording against the speaker model. A feature with no median
/// (an unvoiced recording's pitch) scores 0.
ScoreTriple score_recording(const RecordingSegment& recording, const NeutralModel& model);

/// r_i = Spearman(p_i, mean score); w = r / |r|. A constant score vector
/// contributes r_i = 0; if every r_i is 0 the weights fall back to (1,1,1)/sqrt(3).
/// Throws TooFewRecordings for fewer than two recordings.
FusionWeights fusion_weights(std::span<const ScoreTriple> scores);

inline double rate_recording(const ScoreTriple& p, const FusionWeights& weights) {
    return weights.w[0] * p[0] + weights.w[1] * p[1] + weights.w[2] * p[2];
}

/// Fractions strictly above +threshold and strictly below -threshold. Throws EmptyInput.
ArousalRatios arousal_ratios(std::span<const double> fused, double threshold = kDefaultArousalThreshold);

/// Two-phase rating of one speaker's valid recordings: freeze the neutral model,
/// then score and fuse. A speaker with a single recording uses uniform weights.
std::vector<RatedRecording> rate_speaker(std::span<const RecordingSegment> speaker_recordings,
                                         FusionWeights* weights_out = nullptr);

void write_arousal_csv(const std::filesystem::path& path, std::span<const RatedRecording> rows);
std::vector<RatedRecording> read_arousal_csv(const std::filesystem::path& path);

}  // namespace shiftspeech
