// Unit-disk wireless medium: neighbor computation, broadcast/unicast delivery
// with per-hop latency and optional loss, and connectivity snapshots for
// oracles. Receivership is decided at send time; nodes moving out of range
// mid-flight still receive.
#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "manetsim/kernel.hpp"
#include "manetsim/metrics.hpp"
#include "manetsim/mobility.hpp"
#include "manetsim/packet.hpp"
#include "manetsim/rng.hpp"

namespace manet {

struct RadioParams {
    double range = 150.0;
    double hop_delay_base = 0.002;
    double hop_delay_jitter = 0.001;
    double loss_prob = 0.0;

    void validate() const {
        if (!(range > 0.0)) throw ValidationError("radio.range", "must be > 0");
        if (hop_delay_base < 0.0 || hop_delay_jitter < 0.0)
            throw ValidationError("radio.hop_delay", "must be >= 0");
        if (loss_prob < 0.0 || loss_prob > 1.0)
            throw ValidationError("radio.loss_prob", "must be in [0,1]");
    }
};

class Medium {
public:
    // Called when a unicast next hop is out of range at send time.
    using LinkBreakFn = std::function<void(NodeId sender, NodeId next_hop,
                                           std::shared_ptr<const Packet>)>;

    Medium(const std::vector<MobilityPath>* paths, RadioParams params, Kernel* kernel,
           MetricsLedger* ledger, RngStream rng)
        : paths_(paths), params_(params), kernel_(kernel), ledger_(ledger), rng_(std::move(rng)) {}

    void set_link_break_handler(LinkBreakFn fn) { on_link_break_ = std::move(fn); }

    const RadioParams& params() const { return params_; }

    Vec2 position_of(NodeId n, double t) const;

    // All nodes within `range` of `node` at time t, boundary inclusive,
    // ascending id.
    std::vector<NodeId> neighbors(NodeId node, double t) const;

    void broadcast(NodeId sender, std::shared_ptr<const Packet> p);
    void unicast(NodeId sender, NodeId next_hop, std::shared_ptr<const Packet> p);

    // Connected-component label per node (label = smallest node id in the
    // component). Oracle/metrics use only; protocols never see this.
    std::vector<int> component_labels(double t) const;

private:
    void deliver(NodeId to, NodeId from, const std::shared_ptr<const Packet>& p);

    const std::vector<MobilityPath>* paths_;
    RadioParams params_;
    Kernel* kernel_;
    MetricsLedger* ledger_;
    RngStream rng_;
    LinkBreakFn on_link_break_;
};

} // namespace manet
