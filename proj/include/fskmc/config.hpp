#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fskmc/lattice.hpp"
#include "fskmc/models.hpp"
#include "fskmc/observables.hpp"
#include "fskmc/scheduler.hpp"

namespace fskmc {

enum class Engine { ssa, fs_kmc };

struct InitialCondition {
    enum class Kind { empty, full, random, group1, group2 };
    Kind kind = Kind::empty;
    double density = 0.5;  ///< random only

    static InitialCondition parse(std::string_view text);
    std::string name() const;
};

struct ModelConfig {
    std::string type = "spin_flip";  ///< spin_flip | kawasaki
    double beta = 1.0;
    double coupling = 0.0;
    double field = 0.0;
    double c_a = 1.0;
    double c_d = 1.0;
    double c_h = 1.0;
};

/// Everything one ensemble run needs. Loaded from a flat key-value file;
/// see README.md for the grammar and key list.
struct RunConfig {
    ModelConfig model;
    int dimension = 1;
    std::vector<int> lengths{100};
    int q = 10;
    Engine engine = Engine::fs_kmc;
    Schedule schedule;
    double horizon = 1.0;
    int grid = 101;
    std::size_t samples = 1000;
    std::size_t reference_samples = 10000;
    std::uint64_t seed = 1;
    int workers = 1;
    InitialCondition initial;
    std::vector<Observable> observables{Observable::coverage()};
    std::vector<double> sweep_dt;
    std::vector<int> sweep_q;

    /// Throws ConfigError listing every offending key.
    void validate() const;
    std::string scheme_label() const;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Applies a --scheme override: lie | strang | random | random-raw | ssa.
void apply_scheme_override(RunConfig& cfg, std::string_view scheme);

ModelPtr make_model(const ModelConfig& cfg);
Lattice make_lattice(const RunConfig& cfg);

/// Initial configuration for one replica; `random` draws from a
/// replica-keyed stream.
Configuration make_initial(const RunConfig& cfg, const Lattice& lat, std::uint64_t replica);

}  // namespace fskmc
