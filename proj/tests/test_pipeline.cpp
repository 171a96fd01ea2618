#include <doctest.h>

#include "fixtures.hpp"
#include "shiftspeech/pipeline.hpp"
#include "shiftspeech/simgen.hpp"

using namespace shiftspeech;

namespace {

Cohort cohort() {
    CohortSpec s;
    s.n_per_cell = 2;
    s.n_shifts = 6;
    s.short_participant_fraction = 0.25;
    s.frames_per_recording = 40;
    s.seed = 5;
    return generate_cohort(s);
}

ExtractionConfig relaxed() {
    ExtractionConfig c;
    c.min_frames = 20;
    return c;
}

}  // namespace

TEST_CASE("parallel and serial extraction agree") {
    auto c = cohort();
    auto a = extract_cohort(c, relaxed());
    auto b = extract_cohort_serial(c, relaxed());
    REQUIRE(a.participants.size() == b.participants.size());
    for (std::size_t i = 0; i < a.participants.size(); ++i) {
        CHECK(a.participants[i].participant_id == b.participants[i].participant_id);
        CHECK(a.participants[i].sessions == b.participants[i].sessions);
        CHECK(a.participants[i].rated == b.participants[i].rated);
        CHECK(a.participants[i].timelines == b.participants[i].timelines);
    }
    CHECK(a.table.rows == b.table.rows);
    CHECK(a.removed_participants == b.removed_participants);
    CHECK(std::is_sorted(a.table.participant_ids.begin(), a.table.participant_ids.end()));
}

TEST_CASE("min-days filter removes short participants") {
    auto c = cohort();
    auto r = extract_cohort(c, relaxed());
    CHECK(r.removed_participants + r.participants.size() == c.profiles.size());
    for (const auto& p : r.participants) CHECK(p.recorded_days() >= 5);
}

TEST_CASE("no survivor is an empty cohort") {
    auto c = cohort();
    auto cfg = relaxed();
    cfg.min_days = 100;
    CHECK_THROWS_AS(extract_cohort(c, cfg), EmptyCohort);
    cfg = relaxed();
    cfg.min_frames = 1000000;
    CHECK_THROWS_AS(extract_cohort(c, cfg), EmptyCohort);
}

TEST_CASE("out-of-window events are dropped and counted") {
    auto c = cohort();
    const auto base = extract_cohort(c, relaxed()).dropped_recordings;
    auto extra = c.recordings.front();
    extra.minute_index = 800;
    c.recordings.push_back(extra);
    auto r = extract_cohort(c, relaxed());
    CHECK(r.dropped_recordings == base + 1);
}

TEST_CASE("extraction writes every output file") {
    fixture::TempDir dir("pipeline");
    auto r = extract_cohort(cohort(), relaxed());
    write_extraction(dir.path(), r, true);
    for (auto f : {"sessions.csv", "arousal.csv", "features.csv", "blocks.csv", "timeline.csv"})
        CHECK(std::filesystem::exists(dir / f));
    auto t = read_features_csv(dir / "features.csv");
    CHECK(t.rows == r.table.rows);
    CHECK(read_sessions_csv(dir / "sessions.csv").size() > 0);
}

TEST_CASE("each valid recording is rated once") {
    auto r = extract_cohort(cohort(), relaxed());
    for (const auto& p : r.participants) {
        CHECK(p.rated.size() == p.valid_recordings);
        std::size_t minutes = 0;
        for (const auto& s : p.sessions) minutes += s.minute_indices.size();
        CHECK(minutes <= p.valid_recordings);
    }
}
