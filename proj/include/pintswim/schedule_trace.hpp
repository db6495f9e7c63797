#pragma once

#include <string>
#include <vector>

namespace pintswim {

enum class TaskKind { coarse, fine, correct, idle };

const char* task_kind_name(TaskKind k);

struct TraceEvent {
    int worker = 0;
    TaskKind kind = TaskKind::idle;
    double t_start = 0.0;
    double t_end = 0.0;
};

/// Timestamped worker activity from a live run or the event simulator.
/// Idle is accounted from t = 0 up to each worker's last task completion;
/// finalize_idle() materializes those gaps as explicit events so that
/// total_idle() is exactly the sum of idle durations. Gaps on the serial
/// coarse lane (worker 0) are not idle: that lane orchestrates and is
/// "always active" in the wait-time accounting, which is also what makes
/// W = 0 exact for a single worker.
struct ScheduleTrace {
    int worker_count = 0;
    int serial_lane = 0;
    std::vector<TraceEvent> events;

    void finalize_idle();
    double total_idle() const;  // W
    double makespan() const;
    double busy_time(TaskKind kind) const;
};

}  // namespace pintswim
