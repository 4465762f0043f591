#pragma once

namespace geofwd {

enum class Action { Continue, Stop };

inline const char* to_string(Action a) noexcept { return a == Action::Stop ? "stop" : "continue"; }

} // namespace geofwd
