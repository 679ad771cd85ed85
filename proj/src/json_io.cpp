// This file is part of drmdp, a solver library for distributionally robust
// Markov decision processes with discounted and average-reward objectives.
//
// SPDX-License-Identifier: MIT

#include "drmdp/json_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace drmdp {

json to_json(const MdpModel& m) {
  json reward = json::array();
  json kernel = json::array();
  for (int s = 0; s < m.n_states; ++s) {
    json rrow = json::array();
    json krow = json::array();
    for (int a = 0; a < m.n_actions; ++a) {
      rrow.push_back(m.r(s, a));
      json dist = json::array();
      const double* row = m.row(s, a);
      for (int j = 0; j < m.n_states; ++j) dist.push_back(row[j]);
      krow.push_back(std::move(dist));
    }
    reward.push_back(std::move(rrow));
    kernel.push_back(std::move(krow));
  }
  return json{{"n_states", m.n_states},
              {"n_actions", m.n_actions},
              {"reward", std::move(reward)},
              {"kernel", std::move(kernel)}};
}

MdpModel model_from_json(const json& j) {
  MdpModel m;
  m.n_states = j.at("n_states").get<int>();
  m.n_actions = j.at("n_actions").get<int>();
  m.reward.reserve(static_cast<size_t>(m.n_states) * m.n_actions);
  m.kernel.reserve(static_cast<size_t>(m.n_states) * m.n_actions * m.n_states);
  const json& reward = j.at("reward");
  const json& kernel = j.at("kernel");
  if (static_cast<int>(reward.size()) != m.n_states ||
      static_cast<int>(kernel.size()) != m.n_states) {
    throw std::invalid_argument("model JSON: outer dimension mismatch");
  }
  for (int s = 0; s < m.n_states; ++s) {
    if (static_cast<int>(reward[s].size()) != m.n_actions ||
        static_cast<int>(kernel[s].size()) != m.n_actions) {
      throw std::invalid_argument("model JSON: action dimension mismatch");
    }
    for (int a = 0; a < m.n_actions; ++a) {
      m.reward.push_back(reward[s][a].get<double>());
      const json& dist = kernel[s][a];
      if (static_cast<int>(dist.size()) != m.n_states) {
        throw std::invalid_argument("model JSON: row dimension mismatch");
      }
      for (int jj = 0; jj < m.n_states; ++jj) {
        m.kernel.push_back(dist[jj].get<double>());
      }
    }
  }
  m.validate_and_sanitize();
  return m;
}

json to_json(const EmpiricalKernel& e) {
  json counts = json::array();
  for (int s = 0; s < e.n_states; ++s) {
    json srow = json::array();
    for (int a = 0; a < e.n_actions; ++a) {
      json dist = json::array();
      const long long* c =
          e.counts.data() +
          (static_cast<size_t>(s) * e.n_actions + a) * e.n_states;
      for (int j = 0; j < e.n_states; ++j) dist.push_back(c[j]);
      srow.push_back(std::move(dist));
    }
    counts.push_back(std::move(srow));
  }
  return json{{"n_states", e.n_states},
              {"n_actions", e.n_actions},
              {"n", e.n},
              {"counts", std::move(counts)}};
}

EmpiricalKernel empirical_from_json(const json& j) {
  EmpiricalKernel e;
  e.n_states = j.at("n_states").get<int>();
  e.n_actions = j.at("n_actions").get<int>();
  e.n = j.at("n").get<long long>();
  const json& counts = j.at("counts");
  if (static_cast<int>(counts.size()) != e.n_states) {
    throw std::invalid_argument("empirical JSON: outer dimension mismatch");
  }
  for (int s = 0; s < e.n_states; ++s) {
    if (static_cast<int>(counts[s].size()) != e.n_actions) {
      throw std::invalid_argument("empirical JSON: action dimension mismatch");
    }
    for (int a = 0; a < e.n_actions; ++a) {
      const json& dist = counts[s][a];
      if (static_cast<int>(dist.size()) != e.n_states) {
        throw std::invalid_argument("empirical JSON: row dimension mismatch");
      }
      for (int jj = 0; jj < e.n_states; ++jj) {
        e.counts.push_back(dist[jj].get<long long>());
      }
    }
  }
  e.finalize();
  return e;
}

json to_json(const AvgRewardSolution& s) {
  return json{{"gain", s.gain},
              {"bias", s.bias},
              {"policy", s.policy.action_of},
              {"method", to_string(s.method)},
              {"n", s.n},
              {"iterations", s.iterations}};
}

json to_json(const DualSolution& s) {
  return json{{"value", s.value},
              {"multiplier", s.multiplier},
              {"any_ball_member", s.any_ball_member},
              {"worst_case", s.worst_case},
              {"achieved_divergence", s.achieved_divergence}};
}

json to_json(const DoeblinCertificate& c) {
  return json{{"m", c.m}, {"p", c.p}, {"psi", c.psi}, {"ratio", c.ratio}};
}

json to_json(const ErgodicityReport& r) {
  return json{{"t_minorize", r.t_minorize},
              {"best_cert", to_json(r.best_cert)},
              {"t_mix", r.t_mix},
              {"m_star", r.m_star}};
}

json to_json(const AdversarialPowerReport& r) {
  return json{{"m_vee", r.m_vee},
              {"p_min", r.p_min},
              {"delta_max", r.delta_max},
              {"satisfied", r.satisfied}};
}

json to_json(const RegressionFit& f) {
  return json{{"slope", f.slope},
              {"intercept", f.intercept},
              {"r_squared", f.r_squared},
              {"point_count", f.point_count}};
}

json to_json(const ExperimentConfig& c) {
  json j{{"family", c.family},
         {"divergence", to_string(c.spec.divergence)},
         {"delta", c.spec.radius},
         {"algorithm", to_string(c.algorithm)},
         {"n_grid", c.effective_n_grid()},
         {"seeds_per_n", c.seeds_per_n},
         {"base_seed", c.base_seed},
         {"ground_truth_precision", c.ground_truth_precision},
         {"solver_tol", c.solver_tol},
         {"anchor_state", c.anchor_state},
         {"out_dir", c.out_dir},
         {"plot", c.plot}};
  if (c.spec.divergence == Divergence::Fk) j["k"] = c.spec.k;
  if (c.family == "hard") {
    j["p"] = c.hard.p;
  } else {
    j["states"] = c.random.n_states;
    j["actions"] = c.random.n_actions;
    j["instance_seed"] = c.random.seed.seed;
    j["sigma_max"] = c.random.sigma_max;
  }
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw std::runtime_error("read failed: " + path);
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << contents;
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

MdpModel load_model(const std::string& path) {
  return model_from_json(json::parse(read_file(path)));
}

void save_model(const MdpModel& m, const std::string& path) {
  write_file(path, to_json(m).dump(2) + "\n");
}

}  // namespace drmdp
