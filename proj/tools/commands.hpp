#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace alioth::cli {

struct CommonOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    bool seed_set = false;
    std::uint64_t seed = 0;
    bool allow_divergence = false;
    int jobs = 0;  // 0 means one worker per logical CPU
};

int cmd_stta(const CommonOptions& opt);
int cmd_simulate(const CommonOptions& opt);
int cmd_sweep(const CommonOptions& opt);
int cmd_ablation(const CommonOptions& opt);
int cmd_validate(const CommonOptions& opt);

}  // namespace alioth::cli
