#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "uavmec/env.hpp"

namespace uavmec::validate {

struct Report {
    std::size_t checks = 0;
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& what, std::ostream* log);
};

/// Number of violated decision constraints for one slot: one association per
/// MU, offloading share and relay flag consistent with it, bandwidth and
/// frequency only where the association allows, the sum budgets and the
/// acceleration bound.
std::size_t constraint_violations(const EnvConfig& cfg, const std::vector<MuAction>& mu,
                                  const std::vector<UavAction>& uav);

/// Fast self-checks of the closed-form models, remapping, kinematics,
/// estimators, gradients and determinism. Seconds, not minutes.
Report run_invariant_suite(std::ostream* log = nullptr);

}  // namespace uavmec::validate
