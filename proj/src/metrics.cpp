#include "manetsim/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "manetsim/errors.hpp"

namespace manet {

uint64_t MetricsLedger::delivery_key(NodeId origin, uint32_t seq, NodeId receiver) {
    // origin and receiver fit in 16 bits at the scales simulated here
    return (static_cast<uint64_t>(static_cast<uint16_t>(origin)) << 48) |
           (static_cast<uint64_t>(static_cast<uint16_t>(receiver)) << 32) | seq;
}

void MetricsLedger::count_transmission(const Packet& p) {
    if (p.kind == PacketKind::Data) {
        ++data_tx_;
    } else {
        ++control_tx_;
        ++control_by_type_[p.type_name()];
    }
}

void MetricsLedger::count_origination(int flow, NodeId origin, uint32_t seq, GroupId group,
                                      double t) {
    PacketRec rec;
    rec.flow = flow;
    rec.group = group;
    rec.origin = origin;
    rec.seq = seq;
    rec.t_origin = t;
    rec.expected = plan_->receiver_count(group, origin);
    packet_index_[packet_key(origin, seq)] = static_cast<int>(packets_.size());
    packets_.push_back(rec);
    ++per_flow_originated_[flow];
}

void MetricsLedger::count_delivery(const Packet& p, NodeId receiver) {
    if (p.kind != PacketKind::Data) return;
    if (receiver == p.origin) return;
    if (!plan_->is_member(p.group, receiver)) return;
    auto it = packet_index_.find(packet_key(p.origin, p.seq));
    if (it == packet_index_.end()) return; // not an app-originated packet
    if (!deliveries_.insert(delivery_key(p.origin, p.seq, receiver)).second) return;
    ++packets_[it->second].delivered;
}

long MetricsLedger::originated(int flow) const {
    auto it = per_flow_originated_.find(flow);
    return it == per_flow_originated_.end() ? 0 : it->second;
}

uint64_t MetricsLedger::control_tx_of(const char* type_name) const {
    auto it = control_by_type_.find(type_name);
    return it == control_by_type_.end() ? 0 : it->second;
}

double MetricsLedger::pdr(double min_origin_time) const {
    long delivered = 0;
    long expected = 0;
    for (const auto& rec : packets_) {
        if (rec.t_origin < min_origin_time) continue;
        delivered += rec.delivered;
        expected += rec.expected;
    }
    if (expected == 0) throw SimError("pdr: no originated packets in window");
    return static_cast<double>(delivered) / static_cast<double>(expected);
}

NroResult MetricsLedger::nro() const {
    if (deliveries_.empty())
        return {std::numeric_limits<double>::infinity(), false};
    return {static_cast<double>(control_tx_) / static_cast<double>(deliveries_.size()), true};
}

int MetricsLedger::delivered_count(NodeId origin, uint32_t seq) const {
    auto it = packet_index_.find(packet_key(origin, seq));
    return it == packet_index_.end() ? 0 : packets_[it->second].delivered;
}

/* ====================================================================
   CSV emission
   ==================================================================== */

std::string format_metric(double v) {
    if (std::isinf(v)) return "inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
    std::string s(buf, res.ptr);
    if (s.find('.') == std::string::npos) s += ".0";
    return s;
}

std::string run_csv_header() {
    return "protocol,mobility,max_speed,seed,pdr,nro,link_changes,control_tx,delivered,"
           "originated";
}

std::string run_csv_row(const RunResult& r) {
    std::ostringstream os;
    os << r.protocol << ',' << r.mobility << ',' << format_metric(r.max_speed) << ',' << r.seed
       << ',' << format_metric(r.pdr) << ',' << format_metric(r.nro.value) << ','
       << r.link_changes << ',' << r.control_tx << ',' << r.delivered << ',' << r.originated;
    return os.str();
}

std::vector<AggregateCell> aggregate(const std::vector<RunResult>& results) {
    if (results.empty()) throw SimError("aggregate: empty result set");
    std::map<std::tuple<std::string, std::string, double>, std::vector<const RunResult*>> cells;
    for (const auto& r : results)
        cells[{r.protocol, r.mobility, r.max_speed}].push_back(&r);

    std::vector<AggregateCell> out;
    for (const auto& [key, rs] : cells) {
        AggregateCell c;
        c.protocol = std::get<0>(key);
        c.mobility = std::get<1>(key);
        c.max_speed = std::get<2>(key);
        c.n = static_cast<int>(rs.size());
        double sp = 0.0, sn = 0.0;
        for (const RunResult* r : rs) {
            sp += r->pdr;
            sn += r->nro.value;
        }
        c.mean_pdr = sp / c.n;
        c.mean_nro = sn / c.n;
        if (c.n > 1) {
            double vp = 0.0, vn = 0.0;
            for (const RunResult* r : rs) {
                vp += (r->pdr - c.mean_pdr) * (r->pdr - c.mean_pdr);
                vn += (r->nro.value - c.mean_nro) * (r->nro.value - c.mean_nro);
            }
            c.std_pdr = std::sqrt(vp / (c.n - 1));
            c.std_nro = std::sqrt(vn / (c.n - 1));
        }
        out.push_back(std::move(c));
    }
    return out;
}

std::string aggregate_csv_header() {
    return "protocol,mobility,max_speed,mean_pdr,std_pdr,mean_nro,std_nro,n";
}

std::string aggregate_csv_row(const AggregateCell& c) {
    std::ostringstream os;
    os << c.protocol << ',' << c.mobility << ',' << format_metric(c.max_speed) << ','
       << format_metric(c.mean_pdr) << ',' << format_metric(c.std_pdr) << ','
       << format_metric(c.mean_nro) << ',' << format_metric(c.std_nro) << ',' << c.n;
    return os.str();
}

} // namespace manet
