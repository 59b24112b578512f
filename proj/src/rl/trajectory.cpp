#include "rl/trajectory.hpp"

#include <cstdio>
#include <fstream>

namespace regpomdp::rl {

void write_episode_csv(const std::string& path, const std::vector<Trajectory>& episodes) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "episode,t,obs,action,reward,done\n";
  char buf[64];
  for (size_t e = 0; e < episodes.size(); ++e) {
    const Trajectory& traj = episodes[e];
    for (int t = 0; t < traj.length(); ++t) {
      out << e << "," << t << ",\"";
      const auto& o = traj.obs[static_cast<size_t>(t)];
      for (size_t i = 0; i < o.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.10g", o[i]);
        out << (i ? ";" : "") << buf;
      }
      std::snprintf(buf, sizeof(buf), "%.10g", traj.rewards[static_cast<size_t>(t)]);
      out << "\"," << traj.actions[static_cast<size_t>(t)] << "," << buf << ","
          << (traj.dones[static_cast<size_t>(t)] ? 1 : 0) << "\n";
    }
  }
}

}  // namespace regpomdp::rl
