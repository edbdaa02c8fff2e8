#pragma once

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace dsvp {

enum class LogLevel { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

namespace detail {

inline LogLevel parse_log_level(const char *s) {
    if (!s) return LogLevel::warn;
    if (!std::strcmp(s, "debug")) return LogLevel::debug;
    if (!std::strcmp(s, "info")) return LogLevel::info;
    if (!std::strcmp(s, "warn")) return LogLevel::warn;
    if (!std::strcmp(s, "error")) return LogLevel::error;
    if (!std::strcmp(s, "off")) return LogLevel::off;
    return LogLevel::warn;
}

inline LogLevel &log_level_ref() {
    static LogLevel level = parse_log_level(std::getenv("DSVP_LOG"));
    return level;
}

inline std::mutex &log_mutex() {
    static std::mutex m;
    return m;
}

inline void vlog(LogLevel lvl, const char *tag, const char *fmt, va_list ap) {
    if (lvl < log_level_ref()) return;
    std::lock_guard<std::mutex> lk(log_mutex());
    std::fprintf(stderr, "dsvp %s: ", tag);
    std::vfprintf(stderr, fmt, ap);
    std::fputc('\n', stderr);
}

} // namespace detail

inline void set_log_level(LogLevel lvl) { detail::log_level_ref() = lvl; }

#if defined(__GNUC__) || defined(__clang__)
#define DSVP_PRINTF_LIKE __attribute__((format(printf, 1, 2)))
#else
#define DSVP_PRINTF_LIKE
#endif

DSVP_PRINTF_LIKE inline void log_debug(const char *fmt, ...) {
    va_list ap;
    va_start(ap, fmt);
    detail::vlog(LogLevel::debug, "debug", fmt, ap);
    va_end(ap);
}

DSVP_PRINTF_LIKE inline void log_info(const char *fmt, ...) {
    va_list ap;
    va_start(ap, fmt);
    detail::vlog(LogLevel::info, "info", fmt, ap);
    va_end(ap);
}

DSVP_PRINTF_LIKE inline void log_warn(const char *fmt, ...) {
    va_list ap;
    va_start(ap, fmt);
    detail::vlog(LogLevel::warn, "warn", fmt, ap);
    va_end(ap);
}

DSVP_PRINTF_LIKE inline void log_error(const char *fmt, ...) {
    va_list ap;
    va_start(ap, fmt);
    detail::vlog(LogLevel::error, "error", fmt, ap);
    va_end(ap);
}

#undef DSVP_PRINTF_LIKE

} // namespace dsvp
