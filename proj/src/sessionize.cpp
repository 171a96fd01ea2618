#include "shiftspeech/sessionize.hpp"

#include <algorithm>
#include <numeric>

#include "shiftspeech/csv.hpp"

namespace shiftspeech {

std::vector<SpeechSession> build_sessions(std::span<const int> minutes, const LocationTimeline& timeline) {
    std::vector<int> sorted(minutes.begin(), minutes.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    std::vector<SpeechSession> sessions;
    for (int m : sorted) {
        Location loc = location_of(timeline, m);
        if (sessions.empty() || m - sessions.back().last() > 1) {
            SpeechSession s;
            s.participant_id = timeline.participant_id;
            s.shift_date = timeline.shift_date;
            sessions.push_back(std::move(s));
        }
        auto& cur = sessions.back();
        cur.minute_indices.push_back(m);
        ++cur.location_minutes[static_cast<std::size_t>(loc)];
    }
    return sessions;
}

std::vector<double> inter_session_times(std::span<const SpeechSession> sessions) {
    std::vector<double> gaps;
    for (std::size_t i = 1; i < sessions.size(); ++i)
        gaps.push_back(static_cast<double>(sessions[i].start() - (sessions[i - 1].last() + 1)));
    return gaps;
}

double gt1min_session_ratio(std::span<const SpeechSession> sessions) {
    if (sessions.empty()) throw EmptyInput("gt1min_session_ratio: no sessions");
    auto longer = std::count_if(sessions.begin(), sessions.end(),
                                [](const SpeechSession& s) { return s.duration_min() >= 2; });
    return static_cast<double>(longer) / static_cast<double>(sessions.size());
}

double session_occurrence_rate(std::span<const SpeechSession> sessions, Location category) {
    long total = 0, at = 0;
    for (const auto& s : sessions) {
        total += s.duration_min();
        at += s.minutes_at(category);
    }
    if (total == 0) throw EmptyInput("session_occurrence_rate: no session time");
    return static_cast<double>(at) / static_cast<double>(total);
}

Location dominant_location(const SpeechSession& session) {
    Location best = Location::OutsideUnit;
    int best_minutes = -1;
    for (Location l : kAllLocations) {
        int m = session.minutes_at(l);
        if (m > best_minutes || (m == best_minutes && tie_priority(l) < tie_priority(best))) {
            best = l;
            best_minutes = m;
        }
    }
    return best;
}

namespace {
const std::vector<std::string> kSessionHeader{"participant_id", "shift_date", "start",         "duration_min",
                                              "ns_min",         "pat_min",    "loungemed_min", "outside_min"};
}

void write_sessions_csv(const std::filesystem::path& path, std::span<const SpeechSession> sessions) {
    csv::Writer w(path);
    w.header(kSessionHeader);
    for (const auto& s : sessions) {
        w.row({s.participant_id, s.shift_date.to_string(), std::to_string(s.start()),
               std::to_string(s.duration_min()), std::to_string(s.minutes_at(Location::NursingStation)),
               std::to_string(s.minutes_at(Location::PatientRoom)), std::to_string(s.minutes_at(Location::LoungeMed)),
               std::to_string(s.minutes_at(Location::OutsideUnit))});
    }
}

std::vector<SpeechSession> read_sessions_csv(const std::filesystem::path& path) {
    std::vector<SpeechSession> out;
    csv::read_file(path, kSessionHeader, [&](const csv::Row& r) {
        try {
            SpeechSession s;
            s.participant_id = std::string(r.fields[0]);
            s.shift_date = ShiftDate::parse(r.fields[1]);
            int start = csv::parse_int(r.fields[2]);
            int duration = csv::parse_int(r.fields[3]);
            if (start < 0 || duration < 1 || start + duration > kShiftMinutes)
                throw Error("session outside the shift window");
            for (std::size_t k = 0; k < 4; ++k) {
                s.location_minutes[k] = csv::parse_int(r.fields[4 + k]);
                if (s.location_minutes[k] < 0) throw Error("negative location minutes");
            }
            if (std::accumulate(s.location_minutes.begin(), s.location_minutes.end(), 0) != duration)
                throw Error("location minutes do not sum to duration");
            s.minute_indices.resize(static_cast<std::size_t>(duration));
            std::iota(s.minute_indices.begin(), s.minute_indices.end(), start);
            out.push_back(std::move(s));
        } catch (const MalformedRow&) {
            throw;
        } catch (const std::exception& e) {
            throw MalformedRow(path.filename().string(), r.line, e.what());
        }
    });
    return out;
}

}  // namespace shiftspeech
