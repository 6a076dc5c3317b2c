// Packet taxonomy shared by all protocols: one Data kind plus the control
// message variants of MAODV, ODMRP and ADMR. Forwarded copies keep the uid of
// the original so duplicate caches suppress flood loops.
#pragma once

#include <cstdint>
#include <variant>

namespace manet {

using NodeId = int32_t;
using GroupId = int32_t;

inline constexpr NodeId kNoNode = -1;

enum class PacketKind : uint8_t { Data, Control };

enum class MactType : uint8_t { Activate, Prune };

struct DataHdr {
    bool flood = false; // true when the source has switched the flow to flooding
};

// MAODV
struct RreqHdr {
    uint32_t rreq_id = 0;
    uint32_t group_seq = 0; // freshness floor the responder must meet
    uint8_t hop_count = 0;
    bool join = false;
    bool repair = false;
    bool merge = false;
    NodeId target_leader = kNoNode; // merge: only that partition's tree answers
    uint16_t repairer_depth = 0;    // repair: responders must sit closer to the leader
};
struct RrepHdr {
    NodeId requester = kNoNode;
    uint32_t rreq_id = 0;
    uint32_t group_seq = 0;
    uint8_t hop_count = 0;    // distance travelled back from the responder
    uint16_t leader_hops = 0; // responder's distance to the group leader
    NodeId leader = kNoNode;
};
struct MactHdr {
    MactType type = MactType::Activate;
    NodeId requester = kNoNode;
    uint32_t rreq_id = 0;
};
struct GroupHelloHdr {
    NodeId leader = kNoNode;
    uint32_t group_seq = 0;
    uint8_t hop_count = 0;
};

// ODMRP
struct JoinQueryHdr {
    uint32_t query_seq = 0; // per (source, group)
};
struct JoinReplyHdr {
    NodeId source = kNoNode;
    uint32_t query_seq = 0;
};

// ADMR
struct SolicitationHdr {
    uint32_t solicit_seq = 0;
    bool flood_request = false; // piggybacked flood-mode request
};
struct KeepAliveHdr {
    NodeId receiver = kNoNode;
    uint32_t solicit_seq = 0;
};
struct ReceiverJoinHdr {
    NodeId source = kNoNode;
    NodeId receiver = kNoNode;
    uint32_t via_seq = 0;
    bool via_discovery = false; // reverse path: discovery flood vs keep-alive path
};
struct ReceiverDiscoveryHdr {
    uint32_t discovery_seq = 0;
};
struct RepairNotificationHdr {
    NodeId source = kNoNode;
};
struct ReconnectHdr {
    NodeId source = kNoNode;
    NodeId repairer = kNoNode;
    uint32_t repair_seq = 0;
};
struct ReconnectReplyHdr {
    NodeId source = kNoNode;
    NodeId repairer = kNoNode;
    uint32_t repair_seq = 0;
};
struct ExplicitAckHdr {
    NodeId source = kNoNode;
    uint32_t data_seq = 0;
};
struct FloodRequestHdr {
    NodeId source = kNoNode;
    NodeId receiver = kNoNode;
    bool enable = true; // false cancels the request
};

using PacketHeader =
    std::variant<DataHdr, RreqHdr, RrepHdr, MactHdr, GroupHelloHdr, JoinQueryHdr, JoinReplyHdr,
                 SolicitationHdr, KeepAliveHdr, ReceiverJoinHdr, ReceiverDiscoveryHdr,
                 RepairNotificationHdr, ReconnectHdr, ReconnectReplyHdr, ExplicitAckHdr,
                 FloodRequestHdr>;

struct Packet {
    uint64_t uid = 0;
    PacketKind kind = PacketKind::Control;
    NodeId origin = kNoNode; // node that created the packet
    GroupId group = -1;
    uint32_t seq = 0; // per-origin data counter; unused for control
    int ttl = 32;
    int payload_size = 0;
    PacketHeader hdr;

    const char* type_name() const;

    template <typename H>
    const H* as() const {
        return std::get_if<H>(&hdr);
    }
};

const char* packet_type_name(const PacketHeader& hdr);

} // namespace manet
