#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "shiftspeech/locate.hpp"

namespace shiftspeech {

/// Maximal run of valid recordings whose consecutive minutes differ by at most one.
struct SpeechSession {
    std::string participant_id;
    ShiftDate shift_date;
    std::vector<int> minute_indices;          // sorted, gap-free
    std::array<int, 4> location_minutes{};    // indexed by Location

    int start() const { return minute_indices.front(); }
    int last() const { return minute_indices.back(); }
    int duration_min() const { return last() - start() + 1; }
    int minutes_at(Location l) const { return location_minutes[static_cast<std::size_t>(l)]; }

    friend bool operator==(const SpeechSession&, const SpeechSession&) = default;
};

/// Groups the minutes of one participant-shift's valid recordings into sessions.
/// Duplicated minutes collapse; minutes outside [0, 720) throw OutOfRange.
std::vector<SpeechSession> build_sessions(std::span<const int> minutes, const LocationTimeline& timeline);

/// Gap between each session end and the next start: next.start - (prev.last + 1).
std::vector<double> inter_session_times(std::span<const SpeechSession> sessions);

/// Share of sessions lasting at least two minutes. Throws EmptyInput.
double gt1min_session_ratio(std::span<const SpeechSession> sessions);

/// Share of total session minutes spent at `category`. Throws EmptyInput.
double session_occurrence_rate(std::span<const SpeechSession> sessions, Location category);

/// Location holding most of the session's minutes; ties go to tie_priority order.
Location dominant_location(const SpeechSession& session);

void write_sessions_csv(const std::filesystem::path& path, std::span<const SpeechSession> sessions);

/// Reads sessions.csv back. Sessions come back with contiguous minute_indices.
std::vector<SpeechSession> read_sessions_csv(const std::filesystem::path& path);

}  // namespace shiftspeech
