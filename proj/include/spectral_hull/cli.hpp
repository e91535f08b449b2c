#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spectral_hull/sampling.hpp"

namespace spectral_hull {

struct SweepConfig {
    std::string example = "shift";  // shift | diff | pvm-demo
    std::vector<int> n_list;
    std::vector<double> epsilons{0.2};
    int j0 = 16;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int j = 6;      // diff: number of shifted scale vectors
    int dim = 4;    // pvm-demo
    int mesh = 4;   // pvm-demo
    int vectors = 100;

    static SweepConfig from_json(const json& j);
    json to_json() const;
    void validate() const;
};

struct ConvergenceRecord {
    int n = 0;
    std::string metric;
    double value = 0;
};

const std::vector<std::string>& metric_registry();

// Dense projector checks are skipped above this sampling dimension.
constexpr int kPvmDimLimit = 1200;

std::vector<ConvergenceRecord> sweep_point(const SweepConfig& c, int n, double epsilon);
std::string convergence_csv(std::vector<ConvergenceRecord> rows);
// Writes one CSV per epsilon under out_dir and returns their paths.
std::vector<std::string> cmd_converge(const SweepConfig& c);

json cmd_shift(int n, double epsilon, const std::string& out_dir, int j0 = 16, std::uint64_t seed = 1);
json cmd_diff(int n, int j, double epsilon, const std::string& out_dir, int j0 = 16, std::uint64_t seed = 1);
json cmd_pvm_demo(int dim, int mesh, const std::string& out_dir, int n_max = 64);

// Exit status: 0 success, 2 validation, 3 numerical failure.
int run_cli(int argc, char** argv);

}  // namespace spectral_hull
