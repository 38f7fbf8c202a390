#pragma once

#include <memory>
#include <string>
#include <vector>

#include "manet/config.hpp"
#include "manet/engine.hpp"
#include "manet/metrics.hpp"

namespace manet {

// Fills auto defaults: ttl_max = grid diameter when 0, flow end_s = sim end
// when negative, and expands random_pairs into explicit seeded flows.
ScenarioConfig resolve_config(ScenarioConfig cfg);

// One configured simulation: an engine wired with placed nodes, protocol
// instances and traffic, run to the configured duration.
class Scenario
{
  public:
    explicit Scenario(ScenarioConfig cfg);

    void run();

    Engine& engine() { return *engine_; }
    const Engine& engine() const { return *engine_; }
    const ScenarioConfig& resolved() const { return cfg_; }
    MetricReport report() const;

  private:
    ScenarioConfig cfg_;
    std::unique_ptr<Engine> engine_;
};

// Writes trace.csv, report.csv and config.echo under out_dir.
MetricReport run_to_dir(const ScenarioConfig& cfg, const std::string& out_dir);

std::vector<ReportRow> sweep(const ScenarioConfig& base,
                             const std::vector<int>& node_counts,
                             const std::vector<std::string>& protocols,
                             int trials);

std::vector<ReportRow> compare(const ScenarioConfig& base,
                               const std::vector<std::string>& protocols);

}  // namespace manet
