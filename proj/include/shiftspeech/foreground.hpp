#pragma once

#include "shiftspeech/ingest.hpp"

namespace shiftspeech {

inline constexpr double kDefaultForegroundThreshold = 0.5;
inline constexpr int kDefaultMinForegroundFrames = 200;

/// Decides whether a frame is the wearer's own speech.
///
/// ThresholdBaseline keeps frames with foreground_prob >= threshold.
/// ExternalScores trusts the frame's precomputed `foreground` flag and falls
/// back to the threshold rule on frames that lack one.
class ForegroundFilter {
public:
    enum class Kind { ThresholdBaseline, ExternalScores };

    static ForegroundFilter threshold(double t = kDefaultForegroundThreshold);
    static ForegroundFilter external(double fallback_threshold = kDefaultForegroundThreshold);

    Kind kind() const noexcept { return kind_; }
    double threshold_value() const noexcept { return threshold_; }

    bool operator()(const FeatureFrame& frame) const noexcept {
        if (kind_ == Kind::ExternalScores && frame.foreground) return *frame.foreground;
        return frame.foreground_prob >= threshold_;
    }

private:
    ForegroundFilter(Kind k, double t);
    Kind kind_;
    double threshold_;
};

/// Drops frames the filter rejects; frame order is kept.
RecordingSegment filter_frames(const RecordingSegment& recording, const ForegroundFilter& filter);

/// True iff the (already filtered) recording holds at least `min_frames` frames.
inline bool is_valid_recording(const RecordingSegment& filtered, int min_frames = kDefaultMinForegroundFrames) {
    return static_cast<long>(filtered.frames.size()) >= static_cast<long>(min_frames);
}

}  // namespace shiftspeech
