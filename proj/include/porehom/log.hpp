#pragma once

#include <atomic>
#include <iostream>
#include <mutex>
#include <string>

namespace porehom::log {

enum class Level { quiet, warning, info };

inline std::atomic<Level>& level()
{
    static std::atomic<Level> lvl{Level::warning};
    return lvl;
}

inline std::mutex& sink_mutex()
{
    static std::mutex m;
    return m;
}

inline void warn(const std::string& msg)
{
    if (level().load() < Level::warning) return;
    std::lock_guard<std::mutex> lock(sink_mutex());
    std::clog << "[porehom] warning: " << msg << '\n';
}

inline void info(const std::string& msg)
{
    if (level().load() < Level::info) return;
    std::lock_guard<std::mutex> lock(sink_mutex());
    std::clog << "[porehom] " << msg << '\n';
}

}  // namespace porehom::log
