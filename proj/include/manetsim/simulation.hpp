// One simulation run: wires kernel, medium, protocol nodes, traffic, and the
// metrics ledger together, dispatches events, and produces a RunResult.
// Scripted construction (explicit paths/plan/flows) exists for tests.
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "manetsim/kernel.hpp"
#include "manetsim/metrics.hpp"
#include "manetsim/mobility.hpp"
#include "manetsim/protocol.hpp"
#include "manetsim/radio.hpp"
#include "manetsim/scenario.hpp"
#include "manetsim/traffic.hpp"

namespace manet {

std::vector<MobilityPath> generate_mobility(const Scenario& s, std::vector<int>* group_of);

class Simulation {
public:
    // Generates mobility, group plan and flows from the scenario.
    explicit Simulation(const Scenario& s);

    // Scripted run: caller supplies topology and traffic. Paths must cover
    // [0, duration].
    Simulation(const Scenario& s, std::vector<MobilityPath> paths, GroupPlan plan,
               std::vector<CbrFlow> flows);

    ~Simulation();
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    void run_until(double t);
    RunResult run(); // run to duration and summarize

    Kernel& kernel() { return kernel_; }
    Medium& medium() { return *medium_; }
    MetricsLedger& ledger() { return *ledger_; }
    const GroupPlan& plan() const { return plan_; }
    const std::vector<CbrFlow>& flows() const { return flows_; }
    const std::vector<MobilityPath>& paths() const { return paths_; }
    const Scenario& scenario() const { return scenario_; }

    ProtocolNode& node(int i) { return *nodes_[static_cast<size_t>(i)]; }
    template <typename T>
    T& node_as(int i) {
        return dynamic_cast<T&>(node(i));
    }

    void set_event_log(std::ostream* os) { event_log_ = os; }

    // One-shot callback at simulation time t (must not be in the past).
    void schedule_call(double t, std::function<void()> fn);
    void inject_app_data(double t, NodeId source, GroupId group, int size = 512,
                         int flow_id = -1);

private:
    class Ctx;
    friend class Ctx;

    void setup(std::vector<MobilityPath> paths, GroupPlan plan, std::vector<CbrFlow> flows);
    void dispatch(const Event& e);
    void traffic_tick(int flow_index);
    void log_event(const Event& e);

    Scenario scenario_;
    Kernel kernel_;
    std::vector<MobilityPath> paths_;
    GroupPlan plan_;
    std::vector<CbrFlow> flows_;
    std::vector<long> flow_ticks_done_;
    std::vector<long> flow_ticks_expected_;
    std::unique_ptr<MetricsLedger> ledger_;
    std::unique_ptr<Medium> medium_;
    std::vector<std::unique_ptr<Ctx>> ctxs_;
    std::vector<std::unique_ptr<ProtocolNode>> nodes_;
    std::map<int, std::function<void()>> calls_;
    int next_call_id_ = 0;
    uint64_t next_uid_ = 1;
    std::ostream* event_log_ = nullptr;
    std::vector<int> mobility_group_of_;
};

} // namespace manet
