#pragma once

#include <array>
#include <chrono>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace shiftspeech {

/// 12-hour shift, one slot per minute.
inline constexpr int kShiftMinutes = 720;
inline constexpr int kBlocksPerShift = 12;
inline constexpr int kBlockMinutes = kShiftMinutes / kBlocksPerShift;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MalformedRow : public Error {
public:
    MalformedRow(std::string file, std::size_t line, std::string reason)
        : Error(file + ":" + std::to_string(line) + ": " + reason),
          file_(std::move(file)), line_(line), reason_(std::move(reason)) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string file_;
    std::size_t line_;
    std::string reason_;
};

class UnknownHub : public Error {
public:
    explicit UnknownHub(const std::string& hub_id)
        : Error("unknown hub: " + hub_id), hub_id_(hub_id) {}
    const std::string& hub_id() const noexcept { return hub_id_; }

private:
    std::string hub_id_;
};

class DuplicateParticipant : public Error {
public:
    explicit DuplicateParticipant(const std::string& id)
        : Error("duplicate participant: " + id) {}
};

class OutOfRange : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class EmptyPool : public Error {
public:
    using Error::Error;
};

class TooFewRecordings : public Error {
public:
    using Error::Error;
};

class AllAbsent : public Error {
public:
    using Error::Error;
};

class ConstantInput : public Error {
public:
    using Error::Error;
};

class EmptyGroup : public Error {
public:
    using Error::Error;
};

class DegenerateLabel : public Error {
public:
    using Error::Error;
};

class SingleClassInput : public Error {
public:
    using Error::Error;
};

class TooFewSamples : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class InvalidSpec : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Enumerations
// ---------------------------------------------------------------------------

enum class ShiftType : std::uint8_t { Day, Night };
enum class UnitType : std::uint8_t { ICU, NonICU };

/// Room category a hub is installed in.
enum class HubCategory : std::uint8_t { NursingStation, PatientRoom, Lounge, MedicineRoom };

/// Per-minute location slot. Lounge and medicine room are merged.
enum class Location : std::uint8_t { NursingStation, PatientRoom, LoungeMed, OutsideUnit };

inline constexpr std::array<Location, 4> kAllLocations{
    Location::NursingStation, Location::PatientRoom, Location::LoungeMed, Location::OutsideUnit};

std::string_view to_string(ShiftType s);
std::string_view to_string(UnitType u);
std::string_view to_string(HubCategory c);
std::string_view to_string(Location l);

ShiftType parse_shift_type(std::string_view s);   // throws Error
UnitType parse_unit_type(std::string_view s);     // throws Error
HubCategory parse_hub_category(std::string_view s);
Location parse_location(std::string_view s);

Location location_of_hub(HubCategory c) noexcept;

/// Preference among equally strong hubs: lower wins.
int tie_priority(Location l) noexcept;

// ---------------------------------------------------------------------------
// Calendar date of a shift (the date on which the shift started).
// ---------------------------------------------------------------------------

class ShiftDate {
public:
    ShiftDate() = default;
    explicit ShiftDate(std::chrono::sys_days d) : days_(d) {}

    /// Parses YYYY-MM-DD; throws Error on anything else.
    static ShiftDate parse(std::string_view text);

    std::string to_string() const;
    std::chrono::sys_days days() const noexcept { return days_; }
    ShiftDate plus_days(int n) const { return ShiftDate(days_ + std::chrono::days{n}); }

    friend auto operator<=>(const ShiftDate&, const ShiftDate&) = default;

private:
    std::chrono::sys_days days_{};
};

}  // namespace shiftspeech
