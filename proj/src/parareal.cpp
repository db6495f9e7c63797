#include "pintswim/parareal.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace pintswim::parareal {

MetricFn pointwise_metric(std::size_t point_dim) {
    return [point_dim](const Vec& x, const Vec& y) {
        if (point_dim == 0 || x.size() != y.size() || x.size() % point_dim != 0) {
            throw std::invalid_argument("pointwise_metric: inconsistent state sizes");
        }
        double worst = 0.0;
        for (std::size_t i = 0; i < x.size(); i += point_dim) {
            double num = 0.0, den = 0.0;
            for (std::size_t c = 0; c < point_dim; ++c) {
                const double d = x[i + c] - y[i + c];
                num += d * d;
                den += x[i + c] * x[i + c];
            }
            num = std::sqrt(num);
            den = std::sqrt(den);
            worst = std::max(worst, den < 1e-14 ? num : num / den);
        }
        return worst;
    };
}

namespace {

void validate(const ParallelPlan& plan) {
    if (plan.intervals < 1 || plan.workers < 1) {
        throw std::invalid_argument("parareal: need at least one interval and one worker");
    }
    if (plan.max_iterations < 1) throw std::invalid_argument("parareal: max_iterations must be >= 1");
    if (!(plan.tolerance > 0.0)) throw std::invalid_argument("parareal: tolerance must be positive");
    if (plan.horizon <= 0.0) throw std::invalid_argument("parareal: horizon must be positive");
}

Vec corrected(const Vec& x_prime, const Vec& g_new, const Vec& g_old) {
    if (x_prime.size() != g_new.size() || g_new.size() != g_old.size()) {
        throw std::invalid_argument("parareal: propagator changed the state size");
    }
    Vec out(x_prime.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x_prime[i] + g_new[i] - g_old[i];
    return out;
}

}  // namespace

std::vector<Vec> coarse_sweep_initial(const ParallelPlan& plan, const PropagatorFn& coarse, const Vec& x0) {
    validate(plan);
    std::vector<Vec> x(plan.intervals + 1);
    x[0] = x0;
    for (int n = 1; n <= plan.intervals; ++n) {
        x[n] = coarse(plan.boundary_time(n - 1), plan.boundary_time(n), x[n - 1]);
    }
    return x;
}

std::vector<Vec> fine_parallel(const ParallelPlan& plan, const PropagatorFn& fine,
                               const std::vector<Vec>& x_prev, int k) {
    validate(plan);
    std::vector<Vec> xp = x_prev;
    for (int n = k; n <= plan.intervals; ++n) {
        xp[n] = fine(plan.boundary_time(n - 1), plan.boundary_time(n), x_prev[n - 1]);
    }
    return xp;
}

std::vector<Vec> correct(const ParallelPlan& plan, const PropagatorFn& coarse, const std::vector<Vec>& x_prime,
                         const std::vector<Vec>& x_prev, std::vector<Vec>& g_cache, int k) {
    validate(plan);
    std::vector<Vec> x = x_prev;
    x[k] = x_prime[k];
    for (int n = k + 1; n <= plan.intervals; ++n) {
        Vec g_new = coarse(plan.boundary_time(n - 1), plan.boundary_time(n), x[n - 1]);
        x[n] = corrected(x_prime[n], g_new, g_cache[n]);
        g_cache[n] = std::move(g_new);
    }
    return x;
}

// ---------------------------------------------------------------------------
// Threaded engine. The driver owns all iteration state; workers are stateless
// executors of (propagator, t0, t1, input) messages. Values never depend on
// completion order: every task's input is pinned by its (iteration, interval)
// slot before dispatch.
// ---------------------------------------------------------------------------

namespace {

using StatePtr = std::shared_ptr<const Vec>;
using Clock = std::chrono::steady_clock;

struct Task {
    TaskKind kind = TaskKind::fine;
    int k = 0;  // iteration
    int n = 0;  // interval
    double t0 = 0.0, t1 = 0.0;
    StatePtr input;
    const PropagatorFn* fn = nullptr;
};

struct Completion {
    Task task;
    StatePtr result;  // null when skipped after stop or on failure
    std::exception_ptr error;
};

class Engine {
  public:
    Engine(const ParallelPlan& plan, const PropagatorFn& coarse, const PropagatorFn& fine,
           const Vec& x0, const MetricFn& metric, const std::vector<Vec>* reference)
        : plan_(plan),
          coarse_(coarse),
          fine_(fine),
          metric_(metric),
          reference_(reference),
          n_(plan.intervals),
          // Beyond n iterations every interval is frozen and the iterates can
          // no longer change; capping here keeps the task graph finite.
          l_(std::min(plan.max_iterations, plan.intervals)),
          queues_(plan.workers),
          lanes_(plan.workers) {
        xs_.assign(l_ + 1, std::vector<StatePtr>(n_ + 1));
        gval_.assign(l_ + 1, std::vector<StatePtr>(n_ + 1));
        fine_res_.assign(l_ + 1, std::vector<StatePtr>(n_ + 1));
        fine_dispatched_.assign(l_ + 1, std::vector<char>(n_ + 1, 0));
        correct_dispatched_.assign(l_ + 1, std::vector<char>(n_ + 1, 0));
        fine_remaining_.assign(l_ + 1, 0);
        iter_remaining_.assign(l_ + 1, n_);  // frozen prefix + seed + correctors
        iter_done_.assign(l_ + 1, 0);
        for (int k = 1; k <= l_; ++k) fine_remaining_[k] = n_ - k + 1;
        set_state(0, 0, std::make_shared<const Vec>(x0));
    }

    RunResult execute() {
        origin_ = Clock::now();
        // Queue the sweep head before any worker can run, so worker 0's
        // serial tier outranks the fine task pipelined mode seeds at t=0.
        dispatch(Task{TaskKind::coarse, 0, 1, plan_.boundary_time(0), plan_.boundary_time(1), xs_[0][0],
                      &coarse_});
        flush_notifications();
        for (int w = 0; w < plan_.workers; ++w) {
            threads_.emplace_back([this, w] { worker_main(w); });
        }

        while (in_flight_ > 0) {
            Completion c = pop_completion();
            --in_flight_;
            if (c.error && !first_error_) {
                first_error_ = c.error;
                stopping_ = true;  // drain; a propagator failure aborts the run
            }
            if (!stopping_ && c.result) handle(c);
            flush_notifications();
        }
        shutdown_workers();
        if (first_error_) std::rethrow_exception(first_error_);

        RunResult out;
        out.report = report_;
        out.states.resize(n_ + 1);
        const int kf = final_k_;
        for (int n = 0; n <= n_; ++n) {
            if (!xs_[kf][n]) throw std::logic_error("parareal: missing boundary state at termination");
            out.states[n] = *xs_[kf][n];
        }
        out.trace.worker_count = plan_.workers;
        for (auto& lane : lanes_) {
            out.trace.events.insert(out.trace.events.end(), lane.begin(), lane.end());
        }
        out.trace.finalize_idle();
        return out;
    }

  private:
    // --- worker side -------------------------------------------------------
    // Coarse and corrector solves are the serial wavefront; on worker 0 they
    // take priority over queued fine tasks so the lane never stalls the sweep.
    struct WorkerQueue {
        std::mutex mu;
        std::condition_variable cv;
        std::deque<Task> serial;  // coarse + correct, FIFO
        std::deque<Task> fine;    // fine, FIFO
        bool shutdown = false;
    };

    void worker_main(int wid) {
        auto& q = queues_[wid];
        while (true) {
            Task task;
            {
                std::unique_lock lk(q.mu);
                q.cv.wait(lk, [&] { return q.shutdown || !q.serial.empty() || !q.fine.empty(); });
                if (q.serial.empty() && q.fine.empty()) return;
                auto& tier = q.serial.empty() ? q.fine : q.serial;
                task = std::move(tier.front());
                tier.pop_front();
            }
            Completion c;
            if (!stopping_) {
                try {
                    const auto t_start = Clock::now();
                    Vec result = (*task.fn)(task.t0, task.t1, *task.input);
                    const auto t_end = Clock::now();
                    lanes_[wid].push_back({wid, task.kind, seconds(t_start), seconds(t_end)});
                    c.result = std::make_shared<const Vec>(std::move(result));
                } catch (...) {
                    c.error = std::current_exception();
                }
            }
            c.task = std::move(task);
            push_completion(std::move(c));
        }
    }

    double seconds(Clock::time_point t) const {
        return std::chrono::duration_cast<std::chrono::duration<double>>(t - origin_).count();
    }

    void push_completion(Completion&& c) {
        {
            std::lock_guard lk(done_mu_);
            done_.push_back(std::move(c));
        }
        done_cv_.notify_one();
    }

    Completion pop_completion() {
        std::unique_lock lk(done_mu_);
        done_cv_.wait(lk, [&] { return !done_.empty(); });
        Completion c = std::move(done_.front());
        done_.pop_front();
        return c;
    }

    void shutdown_workers() {
        for (auto& q : queues_) {
            std::lock_guard lk(q.mu);
            q.shutdown = true;
            q.cv.notify_one();
        }
        for (auto& t : threads_) t.join();
    }

    // --- driver side -------------------------------------------------------
    // Worker 0 is the dedicated serial lane (initial sweep + correctors);
    // fine tasks round-robin over the remaining workers, or share lane 0 when
    // it is the only one. Tasks created while handling one completion are
    // enqueued together and the workers notified afterwards, so a waking
    // worker sees the serial task of this round before any fine task
    // enqueued alongside it.
    void dispatch(Task&& task) {
        const bool is_fine = task.kind == TaskKind::fine;
        const int m = plan_.workers;
        const int wid = is_fine ? (m >= 2 ? 1 + (task.n - 1) % (m - 1) : 0) : 0;
        ++in_flight_;
        auto& q = queues_[wid];
        {
            std::lock_guard lk(q.mu);
            (is_fine ? q.fine : q.serial).push_back(std::move(task));
        }
        pending_notify_.push_back(wid);
    }

    void flush_notifications() {
        for (const int wid : pending_notify_) queues_[wid].cv.notify_one();
        pending_notify_.clear();
    }

    void handle(const Completion& c) {
        const Task& t = c.task;
        switch (t.kind) {
            case TaskKind::coarse:
                gval_[0][t.n] = c.result;
                set_state(0, t.n, c.result);
                maybe_dispatch_correct(1, t.n);  // the cache may be the last missing input
                if (t.n < n_ && !stopping_) {
                    dispatch(Task{TaskKind::coarse, 0, t.n + 1, plan_.boundary_time(t.n),
                                  plan_.boundary_time(t.n + 1), xs_[0][t.n], &coarse_});
                }
                break;
            case TaskKind::fine:
                fine_res_[t.k][t.n] = c.result;
                --fine_remaining_[t.k];
                if (t.n == t.k) {
                    set_state(t.k, t.k, c.result);  // X_k^k = X_k^k'
                } else {
                    maybe_dispatch_correct(t.k, t.n);
                }
                if (plan_.mode == Mode::regular && fine_remaining_[t.k] == 0) {
                    maybe_dispatch_correct(t.k, t.k + 1);
                }
                break;
            case TaskKind::correct: {
                gval_[t.k][t.n] = c.result;
                const Vec x = corrected(*fine_res_[t.k][t.n], *c.result, *gval_[t.k - 1][t.n]);
                set_state(t.k, t.n, std::make_shared<const Vec>(std::move(x)));
                maybe_dispatch_correct(t.k + 1, t.n);  // same-interval cache for the next iteration
                break;
            }
            case TaskKind::idle:
                break;
        }
    }

    void set_state(int k, int n, const StatePtr& value) {
        if (xs_[k][n]) return;
        xs_[k][n] = value;

        if (n >= 1 && --iter_remaining_[k] == 0) {
            // Speculative pipelined work can finish a later iteration's seed
            // before an earlier corrector chain ends; reports must still come
            // out in iteration order, so completion only marks readiness.
            iter_done_[k] = 1;
            fire_completions();
            if (stopping_) return;
        }
        // Serial-lane work first so worker 0 never stalls the wavefront
        // behind a queued fine task.
        if (n + 1 <= n_) maybe_dispatch_correct(k, n + 1);
        if (k + 1 <= l_) {
            if (n <= k) set_state(k + 1, n, value);  // converged prefix frozen
            // Streaming hand-off: interval n's next fine solve launches when
            // the serial lane finishes its pass over interval n (the fine
            // input X[k][n-1] is then already in hand).
            if (plan_.mode == Mode::pipelined && n >= k + 1) {
                maybe_dispatch_fine(k + 1, n);
            }
        }
    }

    void fire_completions() {
        while (next_complete_ <= l_ && iter_done_[next_complete_] && !stopping_) {
            on_iteration_complete(next_complete_);
            ++next_complete_;
        }
    }

    void maybe_dispatch_fine(int k, int n) {
        if (stopping_ || k > l_ || n < k || n > n_ || fine_dispatched_[k][n]) return;
        if (!xs_[k - 1][n - 1]) return;
        fine_dispatched_[k][n] = 1;
        dispatch(Task{TaskKind::fine, k, n, plan_.boundary_time(n - 1), plan_.boundary_time(n),
                      xs_[k - 1][n - 1], &fine_});
    }

    void maybe_dispatch_correct(int k, int n) {
        if (stopping_ || k < 1 || k > l_ || n < k + 1 || n > n_ || correct_dispatched_[k][n]) return;
        if (!fine_res_[k][n] || !xs_[k][n - 1] || !gval_[k - 1][n]) return;
        if (plan_.mode == Mode::regular && fine_remaining_[k] > 0) return;
        correct_dispatched_[k][n] = 1;
        dispatch(Task{TaskKind::correct, k, n, plan_.boundary_time(n - 1), plan_.boundary_time(n),
                      xs_[k][n - 1], &coarse_});
    }

    void on_iteration_complete(int k) {
        if (k == 0) {
            if (plan_.mode == Mode::regular) {
                for (int n = 1; n <= n_ && 1 <= l_; ++n) maybe_dispatch_fine(1, n);
            }
            return;
        }
        double eta_tilde = 0.0;
        double eta = 0.0;
        for (int n = 1; n <= n_; ++n) {
            eta_tilde = std::max(eta_tilde, metric_(*xs_[k][n], *xs_[k - 1][n]));
            if (reference_) eta = std::max(eta, metric_((*reference_)[n], *xs_[k][n]));
        }
        report_.eta_tilde.push_back(eta_tilde);
        if (reference_) report_.eta.push_back(eta);
        report_.iterations_used = k;

        if (eta_tilde < plan_.tolerance || k == n_) {
            // At k = n every interval is frozen onto the serial fine solution
            // (exactness), so the run has converged whatever eta_tilde says.
            report_.converged = true;
            stop(k);
        } else if (k == l_) {
            stop(k);
        } else if (plan_.mode == Mode::regular) {
            for (int n = k + 1; n <= n_; ++n) maybe_dispatch_fine(k + 1, n);
        }
    }

    void stop(int k) {
        final_k_ = k;
        stopping_ = true;
    }

    const ParallelPlan& plan_;
    const PropagatorFn& coarse_;
    const PropagatorFn& fine_;
    const MetricFn& metric_;
    const std::vector<Vec>* reference_;
    const int n_, l_;

    std::vector<std::vector<StatePtr>> xs_, gval_, fine_res_;
    std::vector<std::vector<char>> fine_dispatched_, correct_dispatched_;
    std::vector<int> fine_remaining_, iter_remaining_;
    std::vector<char> iter_done_;
    int next_complete_ = 0;

    std::vector<WorkerQueue> queues_;      // sized in the init list; never resized
    std::vector<std::vector<TraceEvent>> lanes_;
    std::vector<std::thread> threads_;
    std::mutex done_mu_;
    std::condition_variable done_cv_;
    std::deque<Completion> done_;
    std::vector<int> pending_notify_;
    std::atomic<bool> stopping_{false};
    std::exception_ptr first_error_;
    int in_flight_ = 0;
    int final_k_ = 0;
    Clock::time_point origin_;
    ConvergenceReport report_;
};

}  // namespace

RunResult run(const ParallelPlan& plan, const PropagatorFn& coarse, const PropagatorFn& fine, const Vec& x0,
              const MetricFn& metric, const std::vector<Vec>* reference) {
    validate(plan);
    if (reference && static_cast<int>(reference->size()) != plan.intervals + 1) {
        throw std::invalid_argument("parareal: reference must hold one state per interval boundary");
    }
    Engine engine(plan, coarse, fine, x0, metric, reference);
    return engine.execute();
}

}  // namespace pintswim::parareal
