#include "shiftspeech/foreground.hpp"

#include <algorithm>

namespace shiftspeech {

ForegroundFilter::ForegroundFilter(Kind k, double t) : kind_(k), threshold_(t) {
    if (!(t >= 0.0 && t <= 1.0)) throw Error("foreground threshold must be in [0,1]");
}

ForegroundFilter ForegroundFilter::threshold(double t) { return {Kind::ThresholdBaseline, t}; }

ForegroundFilter ForegroundFilter::external(double fallback_threshold) {
    return {Kind::ExternalScores, fallback_threshold};
}

RecordingSegment filter_frames(const RecordingSegment& recording, const ForegroundFilter& filter) {
    RecordingSegment out;
    out.participant_id = recording.participant_id;
    out.shift_date = recording.shift_date;
    out.minute_index = recording.minute_index;
    out.frames.reserve(recording.frames.size());
    std::copy_if(recording.frames.begin(), recording.frames.end(), std::back_inserter(out.frames),
                 [&](const FeatureFrame& f) { return filter(f); });
    return out;
}

}  // namespace shiftspeech
