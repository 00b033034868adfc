#include "frame/util.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

namespace frame {

LogLevel log_level() {
    const char* env = std::getenv("FRAME_LOG");
    if (!env) return LogLevel::error;
    const std::string v(env);
    if (v == "debug") return LogLevel::debug;
    if (v == "info") return LogLevel::info;
    return LogLevel::error;
}

namespace {
std::mutex log_mutex;
}

void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::info) {
        std::lock_guard lock(log_mutex);
        std::cerr << "[frame] " << msg << "\n";
    }
}

void log_debug(const std::string& msg) {
    if (log_level() >= LogLevel::debug) {
        std::lock_guard lock(log_mutex);
        std::cerr << "[frame:debug] " << msg << "\n";
    }
}

void parallel_for(int n_tasks, int jobs, const std::function<void(int)>& fn) {
    if (jobs == 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
    if (jobs == 1 || n_tasks <= 1) {
        for (int i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    const int workers = std::min(jobs, n_tasks);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= n_tasks) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace frame
