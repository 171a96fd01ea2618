#include "shiftspeech/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "shiftspeech/csv.hpp"

namespace shiftspeech {

using nlohmann::json;

bool operator==(const FeatureFrame& a, const FeatureFrame& b) {
    bool pitch_eq = (a.voiced() == b.voiced()) && (!a.voiced() || a.log_pitch == b.log_pitch);
    return pitch_eq && a.intensity == b.intensity && a.hf_lf_ratio == b.hf_lf_ratio &&
           a.foreground_prob == b.foreground_prob && a.foreground == b.foreground;
}

HubTable::HubTable(std::vector<HubRecord> hubs) : hubs_(std::move(hubs)) {
    for (std::size_t i = 0; i < hubs_.size(); ++i) {
        if (!index_.emplace(hubs_[i].hub_id, i).second)
            throw Error("duplicate hub_id: " + hubs_[i].hub_id);
    }
}

const HubRecord* HubTable::find(const std::string& hub_id) const {
    auto it = index_.find(hub_id);
    return it == index_.end() ? nullptr : &hubs_[it->second];
}

const ParticipantProfile* Cohort::find_profile(const std::string& id) const {
    auto it = std::lower_bound(profiles.begin(), profiles.end(), id,
                               [](const ParticipantProfile& p, const std::string& key) {
                                   return p.participant_id < key;
                               });
    return (it != profiles.end() && it->participant_id == id) ? &*it : nullptr;
}

namespace {

const std::vector<std::string> kParticipantHeader{"participant_id", "shift_type", "unit_type",
                                                  "pos_affect",     "neg_affect", "life_satisfaction"};
const std::vector<std::string> kHubHeader{"hub_id", "location_category"};
const std::vector<std::string> kRssiHeader{"participant_id", "shift_date", "minute_index", "hub_id", "rssi"};
const std::vector<std::string> kPhysiologyHeader{"participant_id", "shift_date", "walk_ratio", "sleep_hours"};

// Runs `body`, rethrowing any parse failure as MalformedRow at the row's line.
template <typename F>
void with_row_context(const char* file, std::size_t line, F&& body) {
    try {
        body();
    } catch (const MalformedRow&) {
        throw;
    } catch (const UnknownHub&) {
        throw;
    } catch (const std::exception& e) {
        throw MalformedRow(file, line, e.what());
    }
}

void require(bool ok, const std::string& reason) {
    if (!ok) throw Error(reason);
}

void check_participant_id(std::string_view id) {
    require(!id.empty(), "empty participant_id");
}

}  // namespace

Cohort parse_cohort(const std::filesystem::path& dir) {
    Cohort cohort;

    csv::read_file(dir / files::kParticipants, kParticipantHeader, [&](const csv::Row& r) {
        with_row_context(files::kParticipants, r.line, [&] {
            ParticipantProfile p;
            p.participant_id = std::string(r.fields[0]);
            check_participant_id(p.participant_id);
            p.shift_type = parse_shift_type(r.fields[1]);
            p.unit_type = parse_unit_type(r.fields[2]);
            p.pos_affect = csv::parse_int(r.fields[3]);
            p.neg_affect = csv::parse_int(r.fields[4]);
            p.life_satisfaction = csv::parse_double(r.fields[5]);
            require(p.pos_affect >= 10 && p.pos_affect <= 50, "pos_affect outside [10,50]");
            require(p.neg_affect >= 10 && p.neg_affect <= 50, "neg_affect outside [10,50]");
            require(p.life_satisfaction >= 1.0 && p.life_satisfaction <= 7.0,
                    "life_satisfaction outside [1,7]");
            cohort.profiles.push_back(std::move(p));
        });
    });
    std::sort(cohort.profiles.begin(), cohort.profiles.end(),
              [](const auto& a, const auto& b) { return a.participant_id < b.participant_id; });
    for (std::size_t i = 1; i < cohort.profiles.size(); ++i)
        if (cohort.profiles[i].participant_id == cohort.profiles[i - 1].participant_id)
            throw DuplicateParticipant(cohort.profiles[i].participant_id);

    std::vector<HubRecord> hubs;
    csv::read_file(dir / files::kHubs, kHubHeader, [&](const csv::Row& r) {
        with_row_context(files::kHubs, r.line, [&] {
            require(!r.fields[0].empty(), "empty hub_id");
            hubs.push_back({std::string(r.fields[0]), parse_hub_category(r.fields[1])});
        });
    });
    try {
        cohort.hubs = HubTable(std::move(hubs));
    } catch (const Error& e) {
        throw MalformedRow(files::kHubs, 0, e.what());
    }

    auto known_participant = [&](const std::string& id) {
        require(cohort.find_profile(id) != nullptr, "unknown participant_id '" + id + "'");
    };

    csv::read_file(dir / files::kRssi, kRssiHeader, [&](const csv::Row& r) {
        with_row_context(files::kRssi, r.line, [&] {
            RssiObservation o;
            o.participant_id = std::string(r.fields[0]);
            known_participant(o.participant_id);
            o.shift_date = ShiftDate::parse(r.fields[1]);
            o.minute_index = csv::parse_int(r.fields[2]);
            o.hub_id = std::string(r.fields[3]);
            if (!cohort.hubs.find(o.hub_id)) throw UnknownHub(o.hub_id);
            int raw = csv::parse_int(r.fields[4]);
            o.rssi = std::clamp(raw, kRssiMin, kRssiMax);
            if (o.rssi != raw) ++cohort.report.rssi_clamped;
            cohort.rssi.push_back(std::move(o));
        });
    });

    {
        auto path = dir / files::kRecordings;
        std::ifstream in(path);
        if (!in) throw Error("cannot open " + path.string());
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            auto rec = parse_recording_line(line, lineno);
            with_row_context(files::kRecordings, lineno, [&] { known_participant(rec.participant_id); });
            cohort.recordings.push_back(std::move(rec));
        }
    }

    csv::read_file(dir / files::kPhysiology, kPhysiologyHeader, [&](const csv::Row& r) {
        with_row_context(files::kPhysiology, r.line, [&] {
            DailyPhysiology p;
            p.participant_id = std::string(r.fields[0]);
            known_participant(p.participant_id);
            p.shift_date = ShiftDate::parse(r.fields[1]);
            p.walk_ratio = csv::parse_double(r.fields[2]);
            p.sleep_hours = csv::parse_double(r.fields[3]);
            require(p.walk_ratio >= 0 && p.walk_ratio <= 1, "walk_ratio outside [0,1]");
            require(p.sleep_hours >= 0 && p.sleep_hours <= 24, "sleep_hours outside [0,24]");
            cohort.physiology.push_back(std::move(p));
        });
    });

    cohort.report.profiles = cohort.profiles.size();
    cohort.report.hubs = cohort.hubs.size();
    cohort.report.rssi = cohort.rssi.size();
    cohort.report.recordings = cohort.recordings.size();
    cohort.report.physiology = cohort.physiology.size();
    return cohort;
}

RecordingSegment parse_recording_line(std::string_view line, std::size_t lineno) {
    RecordingSegment rec;
    with_row_context(files::kRecordings, lineno, [&] {
        json j = json::parse(line);
        require(j.is_object(), "recording is not a JSON object");
        rec.participant_id = j.at("participant_id").get<std::string>();
        check_participant_id(rec.participant_id);
        rec.shift_date = ShiftDate::parse(j.at("shift_date").get<std::string>());
        rec.minute_index = j.at("minute_index").get<int>();
        const json& frames = j.at("frames");
        require(frames.is_array() && !frames.empty(), "frames must be a non-empty array");
        rec.frames.reserve(frames.size());
        for (const json& f : frames) {
            FeatureFrame fr;
            const json& pitch = f.at("log_pitch");
            if (!pitch.is_null()) fr.log_pitch = pitch.get<double>();
            fr.intensity = f.at("intensity").get<double>();
            fr.hf_lf_ratio = f.at("hf_lf_ratio").get<double>();
            fr.foreground_prob = f.at("foreground_prob").get<double>();
            if (auto it = f.find("foreground"); it != f.end()) fr.foreground = it->get<bool>();
            require(!fr.voiced() || std::isfinite(fr.log_pitch), "log_pitch not finite");
            require(std::isfinite(fr.intensity), "intensity not finite");
            require(std::isfinite(fr.hf_lf_ratio) && fr.hf_lf_ratio >= 0, "hf_lf_ratio must be >= 0");
            require(fr.foreground_prob >= 0 && fr.foreground_prob <= 1, "foreground_prob outside [0,1]");
            rec.frames.push_back(fr);
        }
    });
    return rec;
}

// ---------------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------------

void write_participants(const std::filesystem::path& path, std::span<const ParticipantProfile> rows) {
    csv::Writer w(path);
    w.header(kParticipantHeader);
    for (const auto& p : rows)
        w.row({p.participant_id, std::string(to_string(p.shift_type)), std::string(to_string(p.unit_type)),
               std::to_string(p.pos_affect), std::to_string(p.neg_affect),
               csv::format_double(p.life_satisfaction)});
}

void write_hubs(const std::filesystem::path& path, const HubTable& hubs) {
    csv::Writer w(path);
    w.header(kHubHeader);
    for (const auto& h : hubs.records()) w.row({h.hub_id, std::string(to_string(h.category))});
}

std::string rssi_header() { return fmt::format("{}", fmt::join(kRssiHeader, ",")); }

std::string format_rssi_row(const RssiObservation& o) {
    return fmt::format("{},{},{},{},{}", o.participant_id, o.shift_date.to_string(), o.minute_index, o.hub_id,
                       o.rssi);
}

std::string format_recording_json(const RecordingSegment& r) {
    std::string out;
    out.reserve(64 + r.frames.size() * 80);
    fmt::format_to(std::back_inserter(out), R"({{"participant_id":{},"shift_date":"{}","minute_index":{},"frames":[)",
                   json(r.participant_id).dump(), r.shift_date.to_string(), r.minute_index);
    for (std::size_t i = 0; i < r.frames.size(); ++i) {
        const auto& f = r.frames[i];
        if (i) out.push_back(',');
        out += R"({"log_pitch":)";
        if (f.voiced())
            fmt::format_to(std::back_inserter(out), "{}", f.log_pitch);
        else
            out += "null";
        fmt::format_to(std::back_inserter(out), R"(,"intensity":{},"hf_lf_ratio":{},"foreground_prob":{})",
                       f.intensity, f.hf_lf_ratio, f.foreground_prob);
        if (f.foreground) out += *f.foreground ? R"(,"foreground":true)" : R"(,"foreground":false)";
        out.push_back('}');
    }
    out += "]}";
    return out;
}

std::string physiology_header() { return fmt::format("{}", fmt::join(kPhysiologyHeader, ",")); }

std::string format_physiology_row(const DailyPhysiology& p) {
    return fmt::format("{},{},{},{}", p.participant_id, p.shift_date.to_string(), p.walk_ratio, p.sleep_hours);
}

void write_cohort(const std::filesystem::path& dir, const Cohort& cohort) {
    std::filesystem::create_directories(dir);
    write_participants(dir / files::kParticipants, cohort.profiles);
    write_hubs(dir / files::kHubs, cohort.hubs);
    {
        std::ofstream out(dir / files::kRssi);
        out << rssi_header() << '\n';
        for (const auto& o : cohort.rssi) out << format_rssi_row(o) << '\n';
    }
    {
        std::ofstream out(dir / files::kRecordings);
        for (const auto& r : cohort.recordings) out << format_recording_json(r) << '\n';
    }
    {
        std::ofstream out(dir / files::kPhysiology);
        out << physiology_header() << '\n';
        for (const auto& p : cohort.physiology) out << format_physiology_row(p) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Filters
// ---------------------------------------------------------------------------

namespace {
constexpr bool in_window(int minute) { return minute >= 0 && minute < kShiftMinutes; }
}  // namespace

ShiftWindowResult filter_shift_window(std::span<const RecordingSegment> recordings,
                                      std::span<const RssiObservation> rssi) {
    ShiftWindowResult out;
    for (const auto& r : recordings) {
        if (in_window(r.minute_index))
            out.recordings.push_back(r);
        else
            ++out.dropped_recordings;
    }
    for (const auto& o : rssi) {
        if (in_window(o.minute_index))
            out.rssi.push_back(o);
        else
            ++out.dropped_rssi;
    }
    return out;
}

Cohort filter_min_days(const Cohort& cohort, int min_days, const RecordingPredicate& is_valid) {
    if (min_days < 1) throw Error("min_days must be >= 1");
    std::map<std::string, std::set<ShiftDate>, std::less<>> days;
    for (const auto& r : cohort.recordings) {
        if (is_valid && !is_valid(r)) continue;
        days[r.participant_id].insert(r.shift_date);
    }
    std::set<std::string, std::less<>> keep;
    for (const auto& [id, dates] : days)
        if (static_cast<int>(dates.size()) >= min_days) keep.insert(id);

    auto kept = [&](const std::string& id) { return keep.contains(id); };
    Cohort out;
    out.hubs = cohort.hubs;
    out.report = cohort.report;
    for (const auto& p : cohort.profiles)
        if (kept(p.participant_id)) out.profiles.push_back(p);
    for (const auto& r : cohort.recordings)
        if (kept(r.participant_id)) out.recordings.push_back(r);
    for (const auto& o : cohort.rssi)
        if (kept(o.participant_id)) out.rssi.push_back(o);
    for (const auto& p : cohort.physiology)
        if (kept(p.participant_id)) out.physiology.push_back(p);
    return out;
}

}  // namespace shiftspeech
