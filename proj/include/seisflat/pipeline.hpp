#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "seisflat/config.hpp"

namespace seisflat {

// Synthesize a volume from [synth] and write it as SVOL.
void cmd_synth(const RunConfig& cfg, const std::filesystem::path& out_path);

// Full pipeline on one slice: adaptive filtering -> kernel construction ->
// layer organization. Writes <prefix>_eigen.csv, <prefix>_depth.csv,
// <prefix>_flat.csv, <prefix>_slice.pgm, <prefix>_flat.pgm (plus optional
// dumps) and prints a run summary. Stage failures are rethrown with the
// stage named.
struct FlattenResult {
    std::vector<double> lambda;
    std::vector<std::string> artifacts;
};

FlattenResult cmd_flatten(const RunConfig& cfg, const std::filesystem::path& volume_path,
                          const std::string& out_prefix);

// Run the deformation catalog and write the report CSV. Returns true when
// every in-hypothesis row passes.
bool cmd_verify(const RunConfig& cfg, const std::filesystem::path& out_csv);

}  // namespace seisflat
