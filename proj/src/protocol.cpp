#include "manetsim/protocol.hpp"

#include <algorithm>
#include <cctype>

#include "manetsim/admr.hpp"
#include "manetsim/errors.hpp"
#include "manetsim/flooding.hpp"
#include "manetsim/maodv.hpp"
#include "manetsim/odmrp.hpp"

namespace manet {

std::string canonical_protocol_name(const std::string& name) {
    std::string lower;
    lower.reserve(name.size());
    for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "flooding" || lower == "maodv" || lower == "odmrp" || lower == "admr")
        return lower;
    throw UnknownProtocol(name);
}

ProtocolFactory find_protocol(const std::string& name) {
    std::string canon = canonical_protocol_name(name);
    if (canon == "flooding")
        return [](NodeContext& ctx, const ProtocolConfig& cfg) {
            return std::make_unique<FloodingNode>(ctx, cfg);
        };
    if (canon == "maodv")
        return [](NodeContext& ctx, const ProtocolConfig& cfg) {
            return std::make_unique<MaodvNode>(ctx, cfg);
        };
    if (canon == "odmrp")
        return [](NodeContext& ctx, const ProtocolConfig& cfg) {
            return std::make_unique<OdmrpNode>(ctx, cfg);
        };
    return [](NodeContext& ctx, const ProtocolConfig& cfg) {
        return std::make_unique<AdmrNode>(ctx, cfg);
    };
}

} // namespace manet
