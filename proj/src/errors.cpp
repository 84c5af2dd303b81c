#include "heatctl/errors.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace heatctl {

namespace {

std::mutex& warning_mutex() {
    static std::mutex m;
    return m;
}

WarningHandler& handler_slot() {
    static WarningHandler handler = [](const std::string& msg) {
        std::cerr << "warning: " << msg << '\n';
    };
    return handler;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
    std::lock_guard<std::mutex> lock(warning_mutex());
    return std::exchange(handler_slot(), std::move(handler));
}

void warn(const std::string& message) {
    std::lock_guard<std::mutex> lock(warning_mutex());
    if (handler_slot()) handler_slot()(message);
}

}  // namespace heatctl
