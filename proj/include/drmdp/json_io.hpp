// This file is part of drmdp, a solver library for distributionally robust
// Markov decision processes with discounted and average-reward objectives.
//
// SPDX-License-Identifier: MIT

#pragma once

#include <string>

#include <json.hpp>

#include "drmdp/average.hpp"
#include "drmdp/divergence.hpp"
#include "drmdp/ergodicity.hpp"
#include "drmdp/experiment.hpp"
#include "drmdp/types.hpp"

namespace drmdp {

using nlohmann::json;

// MdpModel <-> {"n_states", "n_actions", "reward": [[..]], "kernel": [[[..]]]}
json to_json(const MdpModel& m);
MdpModel model_from_json(const json& j);

// EmpiricalKernel <-> {"n_states", "n_actions", "n", "counts": [[[..]]]}
json to_json(const EmpiricalKernel& e);
EmpiricalKernel empirical_from_json(const json& j);

json to_json(const AvgRewardSolution& s);
json to_json(const DualSolution& s);
json to_json(const DoeblinCertificate& c);
json to_json(const ErgodicityReport& r);
json to_json(const AdversarialPowerReport& r);
json to_json(const RegressionFit& f);
json to_json(const ExperimentConfig& c);

/// Reads a whole file; throws std::runtime_error with the path on failure.
std::string read_file(const std::string& path);

/// Writes a whole file; throws std::runtime_error with the path on failure.
void write_file(const std::string& path, const std::string& contents);

MdpModel load_model(const std::string& path);
void save_model(const MdpModel& m, const std::string& path);

}  // namespace drmdp
