#include "pintswim/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace pintswim::cost_model {

namespace {
void validate(const CostInputs& ci) {
    if (ci.intervals < 1 || ci.workers < 1 || ci.iterations < 1) {
        throw std::invalid_argument("cost_model: n, m, l must all be >= 1");
    }
    if (!(ci.ratio > 1.0)) throw std::invalid_argument("cost_model: ratio r must exceed 1");
    if (!(ci.total_fine > 0.0)) throw std::invalid_argument("cost_model: total fine time must be positive");
}
}  // namespace

double w_regular(const CostInputs& ci) {
    validate(ci);
    const double l = ci.iterations;
    const double n = ci.intervals;
    return (ci.workers - 1) * ci.coarse_cost() * (l * n - 0.5 * l * (l - 1));
}

double w_pipelined(const CostInputs& ci) {
    validate(ci);
    const double m = ci.workers;
    return 0.5 * m * (m - 1) * ci.coarse_cost();
}

double delta_w(const CostInputs& ci) {
    validate(ci);
    const double l = ci.iterations;
    const double n = ci.intervals;
    const double m = ci.workers;
    return (m - 1) * (ci.total_fine / (ci.ratio * n)) * (l * n - 0.5 * l * (l - 1) - 0.5 * m);
}

double predicted_gap(const CostInputs& ci) { return delta_w(ci); }

// ---------------------------------------------------------------------------
// Discrete-event schedule simulator. Mirrors the live driver: one task graph
// per (kind, iteration, interval), worker 0 carries the serial coarse and
// corrector lane, fine task n goes to worker (n-1) mod m. The regular mode
// barriers each phase; the pipelined mode dispatches on input availability.
// ---------------------------------------------------------------------------

namespace {

struct SimTask {
    TaskKind kind;
    int k, n;
};

class Simulator {
  public:
    Simulator(const CostInputs& ci, Mode mode)
        : ci_(ci), mode_(mode), n_(ci.intervals), l_(std::min(ci.iterations, ci.intervals)) {
        x_avail_.assign(l_ + 1, std::vector<char>(n_ + 1, 0));
        g_avail_.assign(l_ + 1, std::vector<char>(n_ + 1, 0));
        fine_done_.assign(l_ + 1, std::vector<char>(n_ + 1, 0));
        fine_dispatched_.assign(l_ + 1, std::vector<char>(n_ + 1, 0));
        correct_dispatched_.assign(l_ + 1, std::vector<char>(n_ + 1, 0));
        fine_remaining_.assign(l_ + 1, 0);
        for (int k = 1; k <= l_; ++k) fine_remaining_[k] = n_ - k + 1;
        serial_q_.resize(ci.workers);
        fine_q_.resize(ci.workers);
        busy_.assign(ci.workers, false);
        set_state(0, 0, 0.0);
    }

    ScheduleTrace run() {
        dispatch({TaskKind::coarse, 0, 1}, 0.0);
        started_ = true;
        for (int w = 0; w < ci_.workers; ++w) start_next(w, 0.0);
        while (!events_.empty()) {
            const Event ev = events_.top();
            events_.pop();
            busy_[ev.worker] = false;
            // Starts are deferred until the whole completion is handled, so a
            // worker picks between the serial and fine tiers only after every
            // task this event unlocks has been queued.
            handling_ = true;
            on_complete(ev.task, ev.t);
            handling_ = false;
            dirty_.push_back(ev.worker);
            for (const int w : dirty_) start_next(w, ev.t);
            dirty_.clear();
        }
        trace_.worker_count = ci_.workers;
        trace_.finalize_idle();
        return trace_;
    }

  private:
    struct Event {
        double t;  // completion time
        long seq;  // tie-break, keeps processing order deterministic
        int worker;
        SimTask task;
    };
    struct EventAfter {
        bool operator()(const Event& a, const Event& b) const {
            return a.t != b.t ? a.t > b.t : a.seq > b.seq;
        }
    };

    double cost(TaskKind kind) const { return kind == TaskKind::fine ? ci_.fine_cost() : ci_.coarse_cost(); }

    void dispatch(const SimTask& t, double now) {
        const int m = ci_.workers;
        const int w = t.kind == TaskKind::fine ? (m >= 2 ? 1 + (t.n - 1) % (m - 1) : 0) : 0;
        (t.kind == TaskKind::fine ? fine_q_ : serial_q_)[w].push_back(t);
        if (handling_) {
            dirty_.push_back(w);
        } else {
            start_next(w, now);
        }
    }

    void start_next(int w, double now) {
        if (!started_ || busy_[w]) return;
        auto& tier = serial_q_[w].empty() ? fine_q_[w] : serial_q_[w];
        if (tier.empty()) return;
        const SimTask t = tier.front();
        tier.pop_front();
        busy_[w] = true;
        const double end = now + cost(t.kind);
        trace_.events.push_back({w, t.kind, now, end});
        events_.push({end, seq_++, w, t});
    }

    void on_complete(const SimTask& t, double now) {
        switch (t.kind) {
            case TaskKind::coarse:
                g_avail_[0][t.n] = 1;
                set_state(0, t.n, now);
                maybe_correct(1, t.n, now);
                if (t.n < n_) dispatch({TaskKind::coarse, 0, t.n + 1}, now);
                break;
            case TaskKind::fine:
                fine_done_[t.k][t.n] = 1;
                --fine_remaining_[t.k];
                if (t.n == t.k) {
                    set_state(t.k, t.k, now);
                } else {
                    maybe_correct(t.k, t.n, now);
                }
                if (mode_ == Mode::regular && fine_remaining_[t.k] == 0) {
                    maybe_correct(t.k, t.k + 1, now);
                }
                break;
            case TaskKind::correct:
                g_avail_[t.k][t.n] = 1;
                set_state(t.k, t.n, now);
                maybe_correct(t.k + 1, t.n, now);
                break;
            case TaskKind::idle:
                break;
        }
    }

    void set_state(int k, int n, double now) {
        if (x_avail_[k][n]) return;
        x_avail_[k][n] = 1;
        if (k >= 1 && n == n_ && mode_ == Mode::regular && k + 1 <= l_) {
            // Iteration k's corrector chain ends at interval n_: barrier release.
            for (int j = k + 1; j <= n_; ++j) maybe_fine(k + 1, j, now);
        }
        if (k == 0 && n == n_ && mode_ == Mode::regular) {
            for (int j = 1; j <= n_ && 1 <= l_; ++j) maybe_fine(1, j, now);
        }
        maybe_correct(k, n + 1, now);
        if (k + 1 <= l_) {
            if (n <= k) set_state(k + 1, n, now);
            // Interval n's next fine solve launches when the serial lane
            // finishes its pass over interval n.
            if (mode_ == Mode::pipelined && n >= k + 1) {
                maybe_fine(k + 1, n, now);
            }
        }
    }

    void maybe_fine(int k, int n, double now) {
        if (k > l_ || n < k || n > n_ || fine_dispatched_[k][n] || !x_avail_[k - 1][n - 1]) return;
        fine_dispatched_[k][n] = 1;
        dispatch({TaskKind::fine, k, n}, now);
    }

    void maybe_correct(int k, int n, double now) {
        if (k < 1 || k > l_ || n < k + 1 || n > n_ || correct_dispatched_[k][n]) return;
        if (!fine_done_[k][n] || !x_avail_[k][n - 1] || !g_avail_[k - 1][n]) return;
        if (mode_ == Mode::regular && fine_remaining_[k] > 0) return;
        correct_dispatched_[k][n] = 1;
        dispatch({TaskKind::correct, k, n}, now);
    }

    CostInputs ci_;
    Mode mode_;
    int n_, l_;
    std::vector<std::vector<char>> x_avail_, g_avail_, fine_done_, fine_dispatched_, correct_dispatched_;
    std::vector<int> fine_remaining_;
    std::vector<std::deque<SimTask>> serial_q_, fine_q_;
    std::vector<char> busy_;
    bool started_ = false;
    bool handling_ = false;
    std::vector<int> dirty_;
    std::priority_queue<Event, std::vector<Event>, EventAfter> events_;
    long seq_ = 0;
    ScheduleTrace trace_;
};

}  // namespace

ScheduleTrace simulate_schedule(const CostInputs& ci, Mode mode) {
    validate(ci);
    return Simulator(ci, mode).run();
}

LineFit fit_gap_vs_inv_r(const std::vector<std::pair<double, double>>& ratio_gap) {
    if (ratio_gap.size() < 3) {
        throw std::invalid_argument("fit_gap_vs_inv_r: need at least 3 (r, gap) measurements");
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(ratio_gap.size());
    for (const auto& [r, gap] : ratio_gap) {
        if (!(r > 0.0)) throw std::invalid_argument("fit_gap_vs_inv_r: ratios must be positive");
        const double x = 1.0 / r;
        sx += x;
        sy += gap;
        sxx += x * x;
        sxy += x * gap;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("fit_gap_vs_inv_r: degenerate abscissae");
    LineFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;

    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / n;
    for (const auto& [r, gap] : ratio_gap) {
        const double pred = fit.slope / r + fit.intercept;
        ss_res += (gap - pred) * (gap - pred);
        ss_tot += (gap - mean_y) * (gap - mean_y);
    }
    fit.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
    return fit;
}

}  // namespace pintswim::cost_model
