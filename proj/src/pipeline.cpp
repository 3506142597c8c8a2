#include "seisflat/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "seisflat/filter.hpp"
#include "seisflat/flatten.hpp"
#include "seisflat/spectral.hpp"

namespace seisflat {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Rethrow the active exception with the stage named, preserving the
// validation/numeric split the exit codes rely on.
[[noreturn]] void rethrow_with_stage(const char* stage) {
    try {
        throw;
    } catch (const numeric_error& e) {
        throw numeric_error(std::string(stage) + " stage: " + e.what());
    } catch (const validation_error& e) {
        throw validation_error(std::string(stage) + " stage: " + e.what());
    } catch (const error& e) {
        throw error(std::string(stage) + " stage: " + e.what());
    }
}

template <typename F>
auto run_stage(const char* stage, std::vector<std::pair<std::string, double>>& timings, F&& f) {
    const auto t0 = Clock::now();
    try {
        if constexpr (std::is_void_v<decltype(f())>) {
            f();
            timings.emplace_back(stage, ms_since(t0));
        } else {
            auto out = f();
            timings.emplace_back(stage, ms_since(t0));
            return out;
        }
    } catch (...) {
        rethrow_with_stage(stage);
    }
}

bool feature_field_constant(const FeatureField& ff) {
    if (ff.pixel_count() == 0) return true;
    const double* first = ff.feature(std::size_t{0});
    for (std::size_t p = 1; p < ff.pixel_count(); ++p) {
        const double* f = ff.feature(p);
        for (int k = 0; k < kPatchSize; ++k)
            if (f[k] != first[k]) return false;
    }
    return true;
}

}  // namespace

void cmd_synth(const RunConfig& cfg, const std::filesystem::path& out_path) {
    if (!cfg.synth) throw config_error("[synth] section required for the synth command");
    const SeismicVolume v = synthesize_volume(cfg.synth->spec);
    save_volume(v, out_path);
    std::cout << "wrote " << out_path.string() << " (" << v.m << "x" << v.n << "x" << v.l
              << ")\n";
}

FlattenResult cmd_flatten(const RunConfig& cfg, const std::filesystem::path& volume_path,
                          const std::string& out_prefix) {
    if (!cfg.flatten) throw config_error("[flatten] section required for the flatten command");
    const SliceRef slice_ref = cfg.flatten->slice;

    std::vector<std::pair<std::string, double>> timings;
    FlattenResult result;
    auto artifact = [&](const std::string& suffix) {
        std::string path = out_prefix + suffix;
        result.artifacts.push_back(path);
        return path;
    };

    SeismicVolume volume;
    Image slice;
    run_stage("io", timings, [&] {
        volume = load_volume(volume_path);
        slice = extract_slice(volume, slice_ref);
    });

    const FeatureField features = run_stage("filter", timings, [&] {
        const PatchMatrix patches = extract_patches(volume);
        const Cov27 cov = feature_covariance(patches);
        const Vec27 u1 = principal_component(cov);
        const ScalarField w = filtered_values(patches, u1);
        if (cfg.flatten->dump_w) write_w_csv(w, volume, slice_ref, artifact("_w.csv"));
        return filtered_features(w, volume, slice_ref);
    });

    const SparseAffinity affinity = run_stage("kernel", timings, [&] {
        const CsrMatrix w = affinity_weights(features, cfg.kernel.spec);
        SparseAffinity k = symmetrize(w, features.rows, features.cols);
        if (cfg.kernel.dump_kernel) write_affinity_triplets(k, artifact("_kernel.txt"));
        return k;
    });

    DiffusionOperator op;
    const Spectrum spectrum = run_stage("spectral", timings, [&] {
        op = row_normalize(affinity);
        Spectrum s = diffusion_spectrum(op, cfg.spectral.eigencount, cfg.spectral.tol,
                                        cfg.spectral.seed);
        write_eigenvector_csv(s, features.rows, features.cols, artifact("_eigen.csv"));
        return s;
    });
    result.lambda = spectrum.lambda;

    run_stage("flatten", timings, [&] {
        // A structureless feature field gives a first eigenvector with no
        // layer content; refuse rather than emit a meaningless height map.
        if (feature_field_constant(features))
            throw degenerate_error(
                "degenerate spectrum: constant input, first eigenvector carries no layers");

        const std::vector<double> psi1 =
            orient_first_eigenvector(spectrum.psi.at(1), features.rows, features.cols);
        const DepthMap depth = depth_from_eigenvector(psi1, features.rows, features.cols);
        {
            std::ofstream out(artifact("_depth.csv"), std::ios::trunc);
            if (!out) throw format_error("cannot open for writing: " + result.artifacts.back());
            out << "row,col,h\n";
            char buf[64];
            std::size_t p = 0;
            for (std::uint32_t r = 0; r < depth.rows; ++r)
                for (std::uint32_t c = 0; c < depth.cols; ++c, ++p) {
                    std::snprintf(buf, sizeof buf, "%u,%u,%.9g\n", r, c, depth.h[p]);
                    out << buf;
                }
            if (!out) throw format_error("write failure: " + result.artifacts.back());
        }
        const FlattenedCloud cloud = reparameterize(slice, depth);
        export_cloud(cloud, artifact("_flat.csv"), CloudFormat::csv);
        export_cloud(cloud, artifact("_flat.pgm"), CloudFormat::pgm);
        render_pgm(slice, artifact("_slice.pgm"));
    });

    char buf[96];
    for (std::size_t j = 1; j < result.lambda.size(); ++j) {
        std::snprintf(buf, sizeof buf, "lambda_%zu = %.9g\n", j, result.lambda[j]);
        std::cout << buf;
    }
    double total = 0.0;
    for (const auto& [stage, ms] : timings) {
        std::snprintf(buf, sizeof buf, "stage %-8s %9.1f ms\n", stage.c_str(), ms);
        std::cout << buf;
        total += ms;
    }
    std::snprintf(buf, sizeof buf, "total %14.1f ms\n", total);
    std::cout << buf;
    return result;
}

bool cmd_verify(const RunConfig& cfg, const std::filesystem::path& out_csv) {
    if (!cfg.verify) throw config_error("[verify] section required for the verify command");
    const VerifyConfig& vc = *cfg.verify;

    std::vector<Deformation> catalog;
    for (const std::string& family : vc.families) {
        if (family == "identity") {
            catalog.push_back(Deformation::parse(family, 0.0));
        } else {
            for (double a : vc.amplitudes) catalog.push_back(Deformation::parse(family, a));
        }
    }

    VerifyOptions options;
    options.ks = vc.ks;
    options.jacobian_samples = vc.jacobian_samples;
    options.eig_tol = vc.tol;

    const std::vector<StabilityReport> reports = verify_stability_bound(vc.rect, catalog, options);
    write_report_csv(reports, out_csv);

    bool all_pass = true;
    int skipped = 0;
    for (const auto& r : reports) {
        if (r.skipped) {
            ++skipped;
            continue;
        }
        if (!(r.pass && r.lemma1_pass && r.lemma2_pass && r.lemma3_pass)) all_pass = false;
    }
    std::cout << "verify: " << reports.size() << " rows, " << skipped << " skipped, "
              << (all_pass ? "all in-hypothesis rows pass" : "FAILURES present") << "\n";
    std::cout << "report: " << out_csv.string() << "\n";
    return all_pass;
}

}  // namespace seisflat
