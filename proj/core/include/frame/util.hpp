#pragma once

#include <functional>
#include <string>

namespace frame {

enum class LogLevel { error = 0, info = 1, debug = 2 };

/// Level from the FRAME_LOG environment variable (error|info|debug).
LogLevel log_level();

void log_info(const std::string& msg);
void log_debug(const std::string& msg);

/// Runs fn(0..n_tasks-1) on up to `jobs` worker threads (jobs <= 1 runs
/// inline). jobs == 0 means hardware concurrency. Exceptions are rethrown on
/// the calling thread.
void parallel_for(int n_tasks, int jobs, const std::function<void(int)>& fn);

}  // namespace frame
