#include "shiftspeech/locate.hpp"

#include <map>
#include <tuple>

#include "shiftspeech/csv.hpp"

namespace shiftspeech {

LocationTimeline estimate_timeline(std::span<const RssiObservation> rssi_for_shift, const HubTable& hubs,
                                   int rssi_floor) {
    LocationTimeline tl;
    if (!rssi_for_shift.empty()) {
        tl.participant_id = rssi_for_shift.front().participant_id;
        tl.shift_date = rssi_for_shift.front().shift_date;
    }

    // Strongest surviving reading per minute; -1 marks none.
    std::array<int, kShiftMinutes> best_rssi;
    best_rssi.fill(-1);
    for (const auto& o : rssi_for_shift) {
        const HubRecord* hub = hubs.find(o.hub_id);
        if (!hub) throw UnknownHub(o.hub_id);
        if (o.minute_index < 0 || o.minute_index >= kShiftMinutes || o.rssi < rssi_floor) continue;
        auto m = static_cast<std::size_t>(o.minute_index);
        Location loc = location_of_hub(hub->category);
        if (o.rssi > best_rssi[m] ||
            (o.rssi == best_rssi[m] && tie_priority(loc) < tie_priority(tl.slots[m]))) {
            best_rssi[m] = o.rssi;
            tl.slots[m] = loc;
        }
    }
    return tl;
}

Location location_of(const LocationTimeline& timeline, int minute_index) {
    if (minute_index < 0 || minute_index >= kShiftMinutes)
        throw OutOfRange("minute_index " + std::to_string(minute_index) + " outside [0, 720)");
    return timeline.slots[static_cast<std::size_t>(minute_index)];
}

void write_timelines_csv(const std::filesystem::path& path, std::span<const LocationTimeline> timelines) {
    csv::Writer w(path);
    w.header({"participant_id", "shift_date", "minute_index", "category"});
    for (const auto& tl : timelines) {
        std::string date = tl.shift_date.to_string();
        for (int m = 0; m < kShiftMinutes; ++m)
            w.row({tl.participant_id, date, std::to_string(m),
                   std::string(to_string(tl.slots[static_cast<std::size_t>(m)]))});
    }
}

std::vector<LocationTimeline> read_timelines_csv(const std::filesystem::path& path) {
    std::map<std::tuple<std::string, ShiftDate>, std::pair<LocationTimeline, int>> acc;
    csv::read_file(path, {"participant_id", "shift_date", "minute_index", "category"}, [&](const csv::Row& r) {
        try {
            std::string id(r.fields[0]);
            ShiftDate date = ShiftDate::parse(r.fields[1]);
            int minute = csv::parse_int(r.fields[2]);
            if (minute < 0 || minute >= kShiftMinutes) throw Error("minute_index outside [0,720)");
            auto& [tl, count] = acc[{id, date}];
            tl.participant_id = id;
            tl.shift_date = date;
            tl.slots[static_cast<std::size_t>(minute)] = parse_location(r.fields[3]);
            ++count;
        } catch (const std::exception& e) {
            throw MalformedRow(path.filename().string(), r.line, e.what());
        }
    });
    std::vector<LocationTimeline> out;
    for (auto& [key, entry] : acc) {
        if (entry.second != kShiftMinutes)
            throw MalformedRow(path.filename().string(), 0,
                               "timeline for " + std::get<0>(key) + " does not have 720 slots");
        out.push_back(std::move(entry.first));
    }
    return out;
}

}  // namespace shiftspeech
