// Run accounting: per-hop transmission counters, unique-delivery tracking,
// packet delivery ratio and normalized routing overhead, and CSV emission.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "manetsim/packet.hpp"
#include "manetsim/traffic.hpp"

namespace manet {

struct NroResult {
    double value = 0.0;
    bool defined = true; // false when nothing was delivered
};

class MetricsLedger {
public:
    explicit MetricsLedger(const GroupPlan& plan) : plan_(&plan) {}

    void count_transmission(const Packet& p);
    void count_origination(int flow, NodeId origin, uint32_t seq, GroupId group, double t);
    void count_delivery(const Packet& p, NodeId receiver);

    uint64_t control_tx() const { return control_tx_; }
    uint64_t data_tx() const { return data_tx_; }
    uint64_t transmissions() const { return control_tx_ + data_tx_; }
    uint64_t unique_deliveries() const { return deliveries_.size(); }
    long originated_total() const { return static_cast<long>(packets_.size()); }
    long originated(int flow) const;
    uint64_t control_tx_of(const char* type_name) const;

    // delivered / (originated x receivers), over packets originated at or
    // after min_origin_time. Throws SimError when nothing qualifies.
    double pdr(double min_origin_time = 0.0) const;

    NroResult nro() const;

    // deliveries of a single packet so far
    int delivered_count(NodeId origin, uint32_t seq) const;

private:
    struct PacketRec {
        int flow;
        GroupId group;
        NodeId origin;
        uint32_t seq;
        double t_origin;
        int delivered = 0;
        int expected = 0;
    };

    static uint64_t packet_key(NodeId origin, uint32_t seq) {
        return (static_cast<uint64_t>(static_cast<uint32_t>(origin)) << 32) | seq;
    }
    static uint64_t delivery_key(NodeId origin, uint32_t seq, NodeId receiver);

    const GroupPlan* plan_;
    uint64_t control_tx_ = 0;
    uint64_t data_tx_ = 0;
    std::map<std::string, uint64_t> control_by_type_;
    std::map<int, long> per_flow_originated_;
    std::vector<PacketRec> packets_;
    std::unordered_map<uint64_t, int> packet_index_;
    std::unordered_set<uint64_t> deliveries_;
};

struct RunResult {
    std::string protocol;
    std::string mobility;
    double max_speed = 0.0;
    uint64_t seed = 0;
    double pdr = 0.0;
    double pdr_post_stab = 0.0;
    NroResult nro;
    long link_changes = 0;
    uint64_t control_tx = 0;
    uint64_t data_tx = 0;
    uint64_t delivered = 0;
    long originated = 0;
};

struct AggregateCell {
    std::string protocol;
    std::string mobility;
    double max_speed = 0.0;
    double mean_pdr = 0.0, std_pdr = 0.0;
    double mean_nro = 0.0, std_nro = 0.0;
    int n = 0;
};

std::string format_metric(double v);

std::string run_csv_header();
std::string run_csv_row(const RunResult& r);

// Per-(protocol, mobility, speed) mean and sample stddev.
// Throws SimError on an empty input.
std::vector<AggregateCell> aggregate(const std::vector<RunResult>& results);
std::string aggregate_csv_header();
std::string aggregate_csv_row(const AggregateCell& c);

} // namespace manet
