#include "manetsim/kernel.hpp"

namespace manet {

const char* event_kind_name(const EventPayload& p) {
    switch (p.index()) {
        case 0: return "PacketArrival";
        case 1: return "TimerFire";
        case 2: return "TrafficTick";
        case 3: return "MetricsSample";
        default: return "SimEnd";
    }
}

EventHandle Kernel::schedule(SimTime fire_at, EventPayload payload) {
    if (fire_at < clock_)
        throw SchedulingInPast("schedule at t=" + std::to_string(fire_at.to_seconds()) +
                               " before clock t=" + std::to_string(clock_.to_seconds()));
    EventHandle h;
    h.state_ = std::make_shared<EventHandle::State>();
    queue_.push(Entry{fire_at.us(), next_seq_++, h.state_, std::move(payload)});
    ++scheduled_;
    ++pending_;
    return h;
}

bool Kernel::cancel(EventHandle& h) {
    if (!h.state_ || h.state_->fired || h.state_->cancelled) return false;
    h.state_->cancelled = true;
    ++cancelled_;
    --pending_;
    return true;
}

uint64_t Kernel::run(SimTime until) {
    uint64_t n = 0;
    while (!queue_.empty() && queue_.top().t_us <= until.us()) {
        Entry e = queue_.top();
        queue_.pop();
        if (e.state->cancelled) continue; // lazily drained
        e.state->fired = true;
        clock_ = SimTime::from_us(e.t_us);
        ++dispatched_;
        --pending_;
        ++n;
        if (dispatch_) dispatch_(Event{clock_, e.seq, std::move(e.payload)});
    }
    if (until > clock_) clock_ = until;
    return n;
}

} // namespace manet
