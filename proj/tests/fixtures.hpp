#pragma once

// Small builders shared by the test programs.

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "shiftspeech/ingest.hpp"
#include "shiftspeech/locate.hpp"

namespace fixture {

namespace fs = std::filesystem;

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() / fmt::format("shiftspeech-{}-{}-{}", tag, ::getpid(), counter++);
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline void write_text(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

inline std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

inline const shiftspeech::ShiftDate& day0() {
    static const auto d = shiftspeech::ShiftDate::parse("2018-03-05");
    return d;
}

inline shiftspeech::FeatureFrame frame(double pitch, double intensity, double hflf, double prob = 0.9) {
    shiftspeech::FeatureFrame f;
    f.log_pitch = pitch;
    f.intensity = intensity;
    f.hf_lf_ratio = hflf;
    f.foreground_prob = prob;
    return f;
}

/// `n` identical frames at the given level.
inline shiftspeech::RecordingSegment recording(const std::string& id, const shiftspeech::ShiftDate& date, int minute,
                                               int n, double level = 0.0, double prob = 0.9) {
    shiftspeech::RecordingSegment r{id, date, minute, {}};
    for (int i = 0; i < n; ++i) r.frames.push_back(frame(5.0 + level, 60.0 + level, 1.0 + level, prob));
    return r;
}

inline shiftspeech::LocationTimeline timeline(shiftspeech::Location fill = shiftspeech::Location::OutsideUnit) {
    shiftspeech::LocationTimeline tl;
    tl.participant_id = "P1";
    tl.shift_date = day0();
    tl.slots.fill(fill);
    return tl;
}

/// A minimal valid cohort directory: two participants, one hub per category.
inline void write_minimal_cohort(const fs::path& dir) {
    write_text(dir / "participants.csv",
               "participant_id,shift_type,unit_type,pos_affect,neg_affect,life_satisfaction\n"
               "A,day,icu,30,20,5.2\n"
               "B,night,non_icu,25,22,4.4\n");
    write_text(dir / "hubs.csv", "hub_id,location_category\nh-ns,ns\nh-pat,pat\nh-lounge,lounge\nh-med,med\n");
    write_text(dir / "rssi.csv",
               "participant_id,shift_date,minute_index,hub_id,rssi\n"
               "A,2018-03-05,0,h-ns,170\n"
               "A,2018-03-05,1,h-pat,165\n"
               "B,2018-03-06,5,h-med,160\n");
    write_text(dir / "recordings.jsonl",
               R"({"participant_id":"A","shift_date":"2018-03-05","minute_index":0,"frames":[{"log_pitch":5.1,"intensity":61,"hf_lf_ratio":1.2,"foreground_prob":0.8},{"log_pitch":null,"intensity":59,"hf_lf_ratio":0.9,"foreground_prob":0.3}]})"
               "\n"
               R"({"participant_id":"B","shift_date":"2018-03-06","minute_index":719,"frames":[{"log_pitch":4.9,"intensity":58.5,"hf_lf_ratio":1,"foreground_prob":1,"foreground":true}]})"
               "\n");
    write_text(dir / "physiology.csv",
               "participant_id,shift_date,walk_ratio,sleep_hours\nA,2018-03-05,0.3,6.5\nB,2018-03-06,0.25,7\n");
}

}  // namespace fixture
