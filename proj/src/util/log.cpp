#include "tcat/util/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace tcat::log {

namespace {

Level parse_env() {
    const char* e = std::getenv("TCAT_LOG");
    if (!e) return Level::warn;
    if (!std::strcmp(e, "debug")) return Level::debug;
    if (!std::strcmp(e, "info")) return Level::info;
    if (!std::strcmp(e, "warn")) return Level::warn;
    if (!std::strcmp(e, "error")) return Level::error;
    if (!std::strcmp(e, "silent")) return Level::silent;
    return Level::warn;
}

Level& state() {
    static Level level = parse_env();
    return level;
}

const char* tag(Level level) {
    switch (level) {
        case Level::debug: return "debug";
        case Level::info: return "info";
        case Level::warn: return "warn";
        case Level::error: return "error";
        default: return "?";
    }
}

} // namespace

Level threshold() { return state(); }

void set_threshold(Level level) { state() = level; }

void write(Level level, const std::string& msg) {
    if (level < state() || level == Level::silent) return;
    std::fprintf(stderr, "[tcat %s] %s\n", tag(level), msg.c_str());
}

} // namespace tcat::log
