#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace floodscout {

using Timestamp = std::chrono::sys_seconds;

/// Accepts `YYYY-MM-DDTHH:MM:SS` with optional fractional seconds and a `Z`
/// or `+HH:MM` suffix (no suffix means UTC). Throws ErrorCode::parse.
Timestamp parse_timestamp(std::string_view text);

/// Canonical UTC form `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_timestamp(Timestamp t);

double hours_between(Timestamp earlier, Timestamp later);

}  // namespace floodscout
