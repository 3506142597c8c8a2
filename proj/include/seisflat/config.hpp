#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "seisflat/kernel.hpp"
#include "seisflat/stability.hpp"
#include "seisflat/volume.hpp"

namespace seisflat {

struct SynthConfig {
    SynthSpec spec;
};

struct KernelConfig {
    NeighborhoodSpec spec;
    bool dump_kernel = false;
};

struct SpectralConfig {
    int eigencount = 5;
    double tol = 1e-8;
    std::uint64_t seed = 0;
};

struct FlattenConfig {
    SliceRef slice;
    bool dump_w = false;
};

struct VerifyConfig {
    RectangleSpec rect;
    std::vector<std::string> families;
    std::vector<double> amplitudes;
    std::vector<int> ks;
    int jacobian_samples = 64;
    double tol = 1e-9;
};

// Parsed INI-style run configuration. Unknown sections or keys are rejected
// outright; each subcommand checks that its required sections are present.
struct RunConfig {
    std::optional<SynthConfig> synth;
    KernelConfig kernel;
    SpectralConfig spectral;
    std::optional<FlattenConfig> flatten;
    std::optional<VerifyConfig> verify;
};

[[nodiscard]] RunConfig parse_config_text(const std::string& text);
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

}  // namespace seisflat
