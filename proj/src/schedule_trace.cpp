#include "pintswim/schedule_trace.hpp"

#include <algorithm>

namespace pintswim {

const char* task_kind_name(TaskKind k) {
    switch (k) {
        case TaskKind::coarse: return "coarse";
        case TaskKind::fine: return "fine";
        case TaskKind::correct: return "correct";
        case TaskKind::idle: return "idle";
    }
    return "?";
}

void ScheduleTrace::finalize_idle() {
    events.erase(std::remove_if(events.begin(), events.end(),
                                [](const TraceEvent& e) { return e.kind == TaskKind::idle; }),
                 events.end());
    std::stable_sort(events.begin(), events.end(), [](const TraceEvent& a, const TraceEvent& b) {
        return a.worker != b.worker ? a.worker < b.worker : a.t_start < b.t_start;
    });
    std::vector<TraceEvent> gaps;
    double cursor = 0.0;
    int cur_worker = -1;
    for (const auto& e : events) {
        if (e.worker != cur_worker) {
            cur_worker = e.worker;
            cursor = 0.0;
        }
        if (e.worker != serial_lane && e.t_start > cursor) {
            gaps.push_back({e.worker, TaskKind::idle, cursor, e.t_start});
        }
        cursor = std::max(cursor, e.t_end);
    }
    events.insert(events.end(), gaps.begin(), gaps.end());
    std::stable_sort(events.begin(), events.end(), [](const TraceEvent& a, const TraceEvent& b) {
        return a.worker != b.worker ? a.worker < b.worker : a.t_start < b.t_start;
    });
}

double ScheduleTrace::total_idle() const {
    double w = 0.0;
    for (const auto& e : events) {
        if (e.kind == TaskKind::idle) w += e.t_end - e.t_start;
    }
    return w;
}

double ScheduleTrace::makespan() const {
    double end = 0.0;
    for (const auto& e : events) end = std::max(end, e.t_end);
    return end;
}

double ScheduleTrace::busy_time(TaskKind kind) const {
    double w = 0.0;
    for (const auto& e : events) {
        if (e.kind == kind) w += e.t_end - e.t_start;
    }
    return w;
}

}  // namespace pintswim
