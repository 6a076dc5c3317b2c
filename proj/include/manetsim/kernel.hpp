// Discrete-event kernel: global clock, one ordered event queue, deterministic
// dispatch. Events with equal fire times dispatch in ascending sequence
// number, so a run is a total order.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <queue>
#include <variant>
#include <vector>

#include "manetsim/sim_time.hpp"

namespace manet {

struct Packet;

struct PacketArrival {
    int node = -1;
    int from = -1;
    std::shared_ptr<const Packet> packet;
};
struct TimerFire {
    int node = -1;
    int key = 0;
};
struct TrafficTick {
    int flow = -1;
};
struct MetricsSample {
    int id = 0;
};
struct SimEnd {};

using EventPayload = std::variant<PacketArrival, TimerFire, TrafficTick, MetricsSample, SimEnd>;

struct Event {
    SimTime fire_at;
    uint64_t seq = 0;
    EventPayload payload;
};

const char* event_kind_name(const EventPayload& p);

// Cancellation token. Default-constructed handles refer to nothing.
class EventHandle {
public:
    EventHandle() = default;
    bool valid() const { return state_ != nullptr; }

private:
    friend class Kernel;
    struct State {
        bool cancelled = false;
        bool fired = false;
    };
    std::shared_ptr<State> state_;
};

class Kernel {
public:
    using Dispatcher = std::function<void(const Event&)>;

    void set_dispatcher(Dispatcher d) { dispatch_ = std::move(d); }

    SimTime now() const { return clock_; }

    EventHandle schedule(SimTime fire_at, EventPayload payload);

    // True if the event was still pending and is now removed.
    bool cancel(EventHandle& h);

    // Dispatches every event with fire_at <= until, leaves clock at `until`.
    // Returns the number of events dispatched by this call.
    uint64_t run(SimTime until);

    uint64_t scheduled_count() const { return scheduled_; }
    uint64_t dispatched_count() const { return dispatched_; }
    uint64_t cancelled_count() const { return cancelled_; }
    uint64_t pending_count() const { return pending_; }

private:
    struct Entry {
        int64_t t_us;
        uint64_t seq;
        std::shared_ptr<EventHandle::State> state;
        EventPayload payload;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.t_us != b.t_us) return a.t_us > b.t_us;
            return a.seq > b.seq;
        }
    };

    std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
    Dispatcher dispatch_;
    SimTime clock_;
    uint64_t next_seq_ = 0;
    uint64_t scheduled_ = 0;
    uint64_t dispatched_ = 0;
    uint64_t cancelled_ = 0;
    uint64_t pending_ = 0;
};

} // namespace manet
