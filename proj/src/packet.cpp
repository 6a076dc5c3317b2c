#include "manetsim/packet.hpp"

namespace manet {

const char* packet_type_name(const PacketHeader& hdr) {
    static const char* names[] = {
        "DATA",           "RREQ",          "RREP",      "MACT",
        "GROUP_HELLO",    "JOIN_QUERY",    "JOIN_REPLY", "SOLICITATION",
        "KEEP_ALIVE",     "RECEIVER_JOIN", "RECEIVER_DISCOVERY", "REPAIR_NOTIFICATION",
        "RECONNECT",      "RECONNECT_REPLY", "EXPLICIT_ACK", "FLOOD_REQUEST"};
    return names[hdr.index()];
}

const char* Packet::type_name() const { return packet_type_name(hdr); }

} // namespace manet
