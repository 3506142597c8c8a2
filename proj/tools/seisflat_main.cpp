#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "seisflat/pipeline.hpp"

// Exit codes: 0 success, 1 validation/config failure, 2 numerical failure.
int main(int argc, char** argv) {
    CLI::App app{"diffusion-based seismic flattening and Neumann stability checks"};
    app.require_subcommand(1);

    std::string config_path, out_path, volume_path;

    CLI::App* synth = app.add_subcommand("synth", "synthesize a volume and write it as SVOL");
    synth->add_option("--config", config_path, "run configuration")->required();
    synth->add_option("--out", out_path, "output volume path")->required();

    CLI::App* flatten = app.add_subcommand("flatten", "flatten one slice of a volume");
    flatten->add_option("volume", volume_path, "input SVOL volume")->required();
    flatten->add_option("--config", config_path, "run configuration")->required();
    flatten->add_option("--out", out_path, "output path prefix")->required();

    CLI::App* verify = app.add_subcommand("verify", "run the deformation catalog checks");
    verify->add_option("--config", config_path, "run configuration")->required();
    verify->add_option("--out", out_path, "report CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 1;
    }

    try {
        const seisflat::RunConfig cfg = seisflat::load_config(config_path);
        if (synth->parsed()) {
            seisflat::cmd_synth(cfg, out_path);
        } else if (flatten->parsed()) {
            seisflat::cmd_flatten(cfg, volume_path, out_path);
        } else if (verify->parsed()) {
            if (!seisflat::cmd_verify(cfg, out_path)) {
                std::cerr << "error: verification failed\n";
                return 2;
            }
        }
        return 0;
    } catch (const seisflat::numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const seisflat::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
