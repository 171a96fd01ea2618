#include "shiftspeech/pipeline.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "shiftspeech/csv.hpp"

namespace shiftspeech {

namespace {

bool in_window(int m) { return m >= 0 && m < kShiftMinutes; }

struct ShiftBucket {
    std::vector<const RssiObservation*> rssi;
    std::vector<std::size_t> valid;  // indices into the filtered recording list
};

}  // namespace

ParticipantResult extract_participant(const ParticipantInput& input, const HubTable& hubs,
                                      const ExtractionConfig& config) {
    ParticipantResult out;
    out.participant_id = input.profile.participant_id;

    std::vector<RecordingSegment> valid;
    for (const auto& rec : input.recordings) {
        if (!in_window(rec.minute_index)) continue;
        RecordingSegment filtered = filter_frames(rec, config.filter);
        if (is_valid_recording(filtered, config.min_frames))
            valid.push_back(std::move(filtered));
        else
            ++out.invalid_recordings;
    }
    std::stable_sort(valid.begin(), valid.end(), [](const RecordingSegment& a, const RecordingSegment& b) {
        return std::tie(a.shift_date, a.minute_index) < std::tie(b.shift_date, b.minute_index);
    });
    out.valid_recordings = valid.size();

    std::map<ShiftDate, ShiftBucket> buckets;
    for (std::size_t i = 0; i < valid.size(); ++i) buckets[valid[i].shift_date].valid.push_back(i);
    for (const auto& o : input.rssi) {
        auto it = buckets.find(o.shift_date);
        if (it != buckets.end() && in_window(o.minute_index)) it->second.rssi.push_back(&o);
    }

    // Phase one: one neutral model per speaker over every valid recording.
    out.rated = rate_speaker(valid);

    std::size_t rated_cursor = 0;
    for (auto& [date, bucket] : buckets) {
        std::vector<RssiObservation> obs;
        obs.reserve(bucket.rssi.size());
        for (const auto* o : bucket.rssi) obs.push_back(*o);
        LocationTimeline tl = estimate_timeline(obs, hubs, config.rssi_floor);
        tl.participant_id = out.participant_id;
        tl.shift_date = date;

        std::vector<int> minutes;
        for (std::size_t i : bucket.valid) minutes.push_back(valid[i].minute_index);
        auto sessions = build_sessions(minutes, tl);

        std::span<const RatedRecording> rated_shift(out.rated.data() + rated_cursor, bucket.valid.size());
        rated_cursor += bucket.valid.size();

        out.shifts.push_back(per_shift_features(sessions, rated_shift, tl, config.arousal_threshold));
        out.sessions.insert(out.sessions.end(), sessions.begin(), sessions.end());
        out.timelines.push_back(std::move(tl));
    }

    out.blocks = participant_blocks(out.participant_id, out.sessions, out.rated, config.arousal_threshold);
    out.features = aggregate_participant(input.profile, out.shifts, out.blocks, input.physiology);
    return out;
}

std::vector<ParticipantInput> split_by_participant(const Cohort& cohort) {
    std::vector<ParticipantInput> inputs;
    std::map<std::string, std::size_t, std::less<>> index;
    for (const auto& p : cohort.profiles) {
        index[p.participant_id] = inputs.size();
        inputs.push_back({p, {}, {}, {}});
    }
    auto slot = [&](const std::string& id) -> ParticipantInput& { return inputs.at(index.at(id)); };
    for (const auto& r : cohort.recordings) slot(r.participant_id).recordings.push_back(r);
    for (const auto& o : cohort.rssi) slot(o.participant_id).rssi.push_back(o);
    for (const auto& p : cohort.physiology) slot(p.participant_id).physiology.push_back(p);
    return inputs;
}

FeatureTable assemble_table(std::span<const ParticipantResult> participants,
                            std::span<const ParticipantProfile> profiles) {
    std::vector<ParticipantFeatureVector> vectors;
    vectors.reserve(participants.size());
    for (const auto& p : participants) vectors.push_back(p.features);
    return build_feature_matrix(vectors, profiles);
}

namespace {

struct Prepared {
    Cohort cohort;
    std::vector<ParticipantInput> inputs;
    std::size_t dropped_recordings = 0;
    std::size_t dropped_rssi = 0;
    std::size_t removed = 0;
};

Prepared prepare(const Cohort& cohort, const ExtractionConfig& config) {
    Prepared prep;
    auto windowed = filter_shift_window(cohort.recordings, cohort.rssi);
    Cohort in_shift;
    in_shift.profiles = cohort.profiles;
    in_shift.hubs = cohort.hubs;
    in_shift.physiology = cohort.physiology;
    in_shift.recordings = std::move(windowed.recordings);
    in_shift.rssi = std::move(windowed.rssi);
    prep.dropped_recordings = windowed.dropped_recordings;
    prep.dropped_rssi = windowed.dropped_rssi;

    const ForegroundFilter filter = config.filter;
    const int min_frames = config.min_frames;
    prep.cohort = filter_min_days(in_shift, config.min_days, [&](const RecordingSegment& r) {
        auto n = std::count_if(r.frames.begin(), r.frames.end(), [&](const FeatureFrame& f) { return filter(f); });
        return n >= min_frames;
    });
    prep.removed = cohort.profiles.size() - prep.cohort.profiles.size();
    if (prep.cohort.profiles.empty()) throw EmptyCohort("no participant passes the filters");
    prep.inputs = split_by_participant(prep.cohort);
    return prep;
}

ExtractionResult finish(Prepared& prep, std::vector<ParticipantResult> results) {
    ExtractionResult res;
    res.participants = std::move(results);
    res.table = assemble_table(res.participants, prep.cohort.profiles);
    res.dropped_recordings = prep.dropped_recordings;
    res.dropped_rssi = prep.dropped_rssi;
    res.removed_participants = prep.removed;
    return res;
}

}  // namespace

ExtractionResult extract_cohort(const Cohort& cohort, const ExtractionConfig& config) {
    Prepared prep = prepare(cohort, config);
    const auto n = static_cast<long>(prep.inputs.size());
    std::vector<ParticipantResult> results(prep.inputs.size());

#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        auto k = static_cast<std::size_t>(i);
        results[k] = extract_participant(prep.inputs[k], prep.cohort.hubs, config);
    }
    return finish(prep, std::move(results));
}

ExtractionResult extract_cohort_serial(const Cohort& cohort, const ExtractionConfig& config) {
    Prepared prep = prepare(cohort, config);
    std::vector<ParticipantResult> results;
    results.reserve(prep.inputs.size());
    for (const auto& in : prep.inputs) results.push_back(extract_participant(in, prep.cohort.hubs, config));
    return finish(prep, std::move(results));
}

void write_extraction(const std::filesystem::path& out_dir, const ExtractionResult& result, bool with_timelines) {
    std::filesystem::create_directories(out_dir);
    std::vector<SpeechSession> sessions;
    std::vector<RatedRecording> rated;
    std::vector<ParticipantBlocks> blocks;
    std::vector<LocationTimeline> timelines;
    for (const auto& p : result.participants) {
        sessions.insert(sessions.end(), p.sessions.begin(), p.sessions.end());
        rated.insert(rated.end(), p.rated.begin(), p.rated.end());
        blocks.push_back(p.blocks);
        if (with_timelines) timelines.insert(timelines.end(), p.timelines.begin(), p.timelines.end());
    }
    write_sessions_csv(out_dir / "sessions.csv", sessions);
    write_arousal_csv(out_dir / "arousal.csv", rated);
    write_features_csv(out_dir / "features.csv", result.table);
    write_blocks_csv(out_dir / "blocks.csv", blocks);
    if (with_timelines) write_timelines_csv(out_dir / "timeline.csv", timelines);
}

}  // namespace shiftspeech
