#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "oracles.hpp"
#include "seisflat/pipeline.hpp"

using namespace seisflat;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "seisflat_pipeline";
    fs::create_directories(dir);
    return dir;
}

fs::path write_text(const std::string& name, const std::string& text) {
    const fs::path p = temp_dir() / name;
    std::ofstream out(p, std::ios::trunc);
    out << text;
    return p;
}

const char* kPipelineConfig = R"(# small end-to-end run
[synth]
dims = 24x24x8
layers = 0.09:1.0
warp_amplitude = 2
warp_frequency = 1
noise_sigma = 0
seed = 42

[kernel]
r = 2
R = 5
delta_floor = 1e-7

[spectral]
eigencount = 3
tol = 1e-8
seed = 7

[flatten]
slice_axis = 3
slice_index = 4
)";

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("config parsing: full round trip of the known keys") {
    const RunConfig cfg = parse_config_text(kPipelineConfig);
    REQUIRE(cfg.synth.has_value());
    CHECK(cfg.synth->spec.m == 24);
    CHECK(cfg.synth->spec.layers.size() == 1);
    CHECK(cfg.synth->spec.layers[0].frequency == 0.09);
    CHECK(cfg.synth->spec.seed == 42);
    CHECK(cfg.kernel.spec.r == 2.0);
    CHECK(cfg.kernel.spec.delta_floor == 1e-7);
    CHECK(cfg.spectral.eigencount == 3);
    REQUIRE(cfg.flatten.has_value());
    CHECK(cfg.flatten->slice.axis == SliceAxis::i3);
    CHECK(cfg.flatten->slice.index == 4);
}

TEST_CASE("config strictness: unknown sections, unknown keys, missing keys") {
    CHECK_THROWS_AS((void)parse_config_text("[bogus]\na = 1\n"), config_error);
    CHECK_THROWS_AS((void)parse_config_text("[synth]\nwidgets = 1\n"), config_error);
    try {
        (void)parse_config_text("[synth]\nseed = 1\n");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("dims") != std::string::npos);
    }
    CHECK_THROWS_AS((void)parse_config_text("[synth]\ndims = 4x4\nseed = 1\n"), config_error);
    CHECK_THROWS_AS(
        (void)parse_config_text("[verify]\nrect = 1x1\ngrid = 8x8\nfamilies = identity\nk = 2,x\n"),
        config_error);
    CHECK_THROWS_AS((void)parse_config_text("[synth]\ndims = 4x4x4\nseed = 1\ndims = 4x4x4\n"),
                    config_error);
    CHECK_THROWS_AS((void)parse_config_text("key_without_section = 1\n"), config_error);
}

TEST_CASE("verify config requires amplitudes only for non-identity families") {
    const char* base = "[verify]\nrect = 0.5x4\ngrid = 8x16\nfamilies = identity\nk = 2\n";
    CHECK_NOTHROW((void)parse_config_text(base));
    CHECK_THROWS_AS(
        (void)parse_config_text("[verify]\nrect = 0.5x4\ngrid = 8x16\nfamilies = bulge\nk = 2\n"),
        config_error);
    CHECK_THROWS_AS(
        (void)parse_config_text(
            "[verify]\nrect = 0.5x4\ngrid = 8x16\nfamilies = whirl\namplitudes = 0.1\nk = 2\n"),
        config_error);
}

TEST_CASE("synth command writes the volume; zero layers give a zero volume") {
    const RunConfig cfg = parse_config_text(kPipelineConfig);
    const fs::path out = temp_dir() / "vol.svol";
    cmd_synth(cfg, out);
    const SeismicVolume v = load_volume(out);
    CHECK(v.m == 24);

    const RunConfig zero = parse_config_text("[synth]\ndims = 4x4x4\nseed = 9\n");
    const fs::path zout = temp_dir() / "zero.svol";
    cmd_synth(zero, zout);
    for (float x : load_volume(zout).values) CHECK(x == 0.0f);
}

TEST_CASE("flatten command: artifacts, summary, idempotence") {
    const RunConfig cfg = parse_config_text(kPipelineConfig);
    const fs::path vol = temp_dir() / "pipe.svol";
    cmd_synth(cfg, vol);

    const std::string prefix1 = (temp_dir() / "run1").string();
    const FlattenResult r1 = cmd_flatten(cfg, vol, prefix1);
    REQUIRE(r1.lambda.size() == 4);  // lambda_0..lambda_3
    CHECK(std::abs(r1.lambda[0] - 1.0) <= 1e-10);
    for (const std::string& artifact : r1.artifacts) CHECK(fs::exists(artifact));

    // Rerunning with identical config and inputs is byte-identical.
    const std::string prefix2 = (temp_dir() / "run2").string();
    const FlattenResult r2 = cmd_flatten(cfg, vol, prefix2);
    REQUIRE(r1.artifacts.size() == r2.artifacts.size());
    for (std::size_t i = 0; i < r1.artifacts.size(); ++i)
        CHECK(oracle::read_file_bytes(r1.artifacts[i]) ==
              oracle::read_file_bytes(r2.artifacts[i]));
}

TEST_CASE("flatten command on a warp-free volume tracks depth") {
    RunConfig cfg = parse_config_text(kPipelineConfig);
    cfg.synth->spec.warp_amplitude = 0.0;
    const fs::path vol = temp_dir() / "flatvol.svol";
    cmd_synth(cfg, vol);
    const std::string prefix = (temp_dir() / "flatrun").string();
    const FlattenResult res = cmd_flatten(cfg, vol, prefix);

    // Spearman between h and the depth row over the depth CSV.
    std::ifstream in(prefix + "_depth.csv");
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    CHECK(line == "row,col,h");
    std::vector<double> rows, hs;
    while (std::getline(in, line)) {
        const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
        rows.push_back(std::stod(line.substr(0, c1)));
        hs.push_back(std::stod(line.substr(c2 + 1)));
    }
    REQUIRE(rows.size() == 24 * 24);
    CHECK(oracle::spearman(hs, rows) >= 0.999);
}

TEST_CASE("flatten command rejects a constant volume with a degenerate-spectrum error") {
    const RunConfig cfg = parse_config_text(kPipelineConfig);
    SeismicVolume v;
    v.m = v.n = v.l = 12;
    v.values.assign(v.pixel_count(), 1.0f);
    const fs::path vol = temp_dir() / "const.svol";
    save_volume(v, vol);
    try {
        (void)cmd_flatten(cfg, vol, (temp_dir() / "construn").string());
        FAIL("expected degenerate_error");
    } catch (const numeric_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("flatten stage") != std::string::npos);
        CHECK(msg.find("degenerate") != std::string::npos);
    }
}

TEST_CASE("flatten command golden checksum for the seeded pipeline") {
    const RunConfig cfg = parse_config_text(kPipelineConfig);
    const fs::path vol = temp_dir() / "golden.svol";
    cmd_synth(cfg, vol);
    const std::string prefix = (temp_dir() / "goldenrun").string();
    (void)cmd_flatten(cfg, vol, prefix);
    // Frozen from the first build.
    CHECK(oracle::fnv1a64(oracle::read_file_bytes(prefix + "_flat.csv")) ==
          0x3c43b1846d2dcd10ull);
}

TEST_CASE("verify command: identity catalog passes with tiny residuals") {
    const RunConfig cfg = parse_config_text(
        "[verify]\nrect = 0.5x4\ngrid = 8x16\nfamilies = identity\nk = 2,3\nsamples = 32\n");
    const fs::path out = temp_dir() / "report_identity.csv";
    CHECK(cmd_verify(cfg, out));

    std::ifstream in(out);
    std::string line;
    std::getline(in, line);
    CHECK(line ==
          "family,amplitude,eps_meas,delta_meas,d,k,eta1,eta_k1,mu1,residual,bound,pass,"
          "lemma1_pass,lemma2_pass,lemma3_pass");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(line.find("identity") == 0);
        CHECK(line.find(",pass") != std::string::npos);
        // residual column stays tiny
        const auto residual_pos = [&] {
            std::size_t pos = 0;
            for (int c = 0; c < 9; ++c) pos = line.find(',', pos) + 1;
            return pos;
        }();
        CHECK(std::stod(line.substr(residual_pos)) <= 1e-10);
    }
    CHECK(rows == 2);
}

TEST_CASE("verify command: default catalog passes and skips are not failures") {
    const RunConfig cfg = parse_config_text(
        "[verify]\nrect = 0.5x4\ngrid = 16x64\nfamilies = identity,vertical-wave,bulge\n"
        "amplitudes = 0.002,0.004\nk = 2,4\nsamples = 32\ntol = 1e-9\n");
    const fs::path out = temp_dir() / "report_catalog.csv";
    CHECK(cmd_verify(cfg, out));

    // Huge amplitude rows are skipped, and the command still succeeds.
    const RunConfig skip_cfg = parse_config_text(
        "[verify]\nrect = 0.5x4\ngrid = 8x16\nfamilies = identity,vertical-wave\n"
        "amplitudes = 0.05\nk = 2\nsamples = 32\n");
    const fs::path skip_out = temp_dir() / "report_skip.csv";
    CHECK(cmd_verify(skip_cfg, skip_out));
    const std::string text = oracle::read_file_bytes(skip_out);
    CHECK(text.find("skip") != std::string::npos);
}

}  // TEST_SUITE
