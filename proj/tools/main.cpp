// hypxray: attenuated X-ray normal-operator inversion on the Poincare disk
// and on genus-2 hyperbolic surfaces.

#include <CLI11.hpp>

#include "hypxray/cli.hpp"

namespace {

void add_common_flags(CLI::App* sub, hypxray::RunConfig& cfg) {
    sub->add_option("--z-re", cfg.z_re, "attenuation, real part")->capture_default_str();
    sub->add_option("--z-im", cfg.z_im, "attenuation, imaginary part")->capture_default_str();
    sub->add_option("--K", cfg.K, "Gaussian curvature (negative)")->capture_default_str();
    sub->add_option("--n-theta", cfg.n_theta, "fiber quadrature count")->capture_default_str();
    sub->add_option("--n-r", cfg.n_r, "radial quadrature count")->capture_default_str();
    sub->add_option("--radius", cfg.radius, "ray truncation radius (0: automatic)")
        ->capture_default_str();
    sub->add_option("--fd-step", cfg.fd_step, "finite-difference step for the Laplacian")
        ->capture_default_str();
    sub->add_option("--grid-n", cfg.grid_n, "output grid points per axis (0: command default)")
        ->capture_default_str();
    sub->add_option("--grid-extent", cfg.grid_extent,
                    "output grid half-width in disk coordinates (0: command default)")
        ->capture_default_str();
    sub->add_option("--input", cfg.input, "input field CSV (x,y,value_re,value_im)")
        ->capture_default_str();
    sub->add_option("--output", cfg.output, "output CSV path")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "seed for randomized suites")->capture_default_str();
    sub->add_option("--bump-radius", cfg.bump_radius, "support radius of the built-in bump")
        ->capture_default_str();
    sub->add_flag("--allow-noncompact", cfg.allow_noncompact,
                  "accept the constant test field (disk-recon)");
    sub->add_option("--chi-start", cfg.chi_start, "surface orbit-sum cutoff start")
        ->capture_default_str();
    sub->add_option("--chi-end", cfg.chi_end, "surface orbit-sum cutoff end")
        ->capture_default_str();
    sub->add_option("--lambda-max", cfg.lambda_max, "largest lambda in tables")
        ->capture_default_str();
    sub->add_option("--lambda-step", cfg.lambda_step, "lambda grid step")->capture_default_str();
    sub->add_option("--z-list", cfg.z_list, "attenuations for the z -> 0 study")
        ->capture_default_str();
    sub->add_flag("--inject-fault", cfg.inject_fault)->group("");  // negative-control hook
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"attenuated X-ray normal-operator inversion on hyperbolic surfaces"};
    app.require_subcommand(0, 1);
    hypxray::RunConfig cfg;

    struct Sub {
        const char* name;
        const char* help;
        hypxray::Command cmd;
    };
    const Sub subs[] = {
        {"selftest", "run the invariant suite and print a pass/fail table",
         hypxray::Command::selftest},
        {"disk-recon", "reconstruct a field on the Poincare disk from Pi_0^(z) data",
         hypxray::Command::disk_recon},
        {"surface-recon", "reconstruct a bump on the genus-2 octagon surface",
         hypxray::Command::surface_recon},
        {"transform-table", "tabulate the kernel transforms against the Gamma closed forms",
         hypxray::Command::transform_table},
        {"kernel-table", "tabulate the tau/sigma kernels and their identities",
         hypxray::Command::kernel_table},
        {"limit-study", "z -> 0 extrapolation of the surface reconstruction",
         hypxray::Command::limit_study},
    };
    for (const auto& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        add_common_flags(sub, cfg);
        sub->callback([&cfg, cmd = s.cmd] { cfg.command = cmd; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return hypxray::kExitUsage;
    }
    if (cfg.command == hypxray::Command::none) {
        std::cerr << app.help() << "\n";
        return hypxray::kExitUsage;
    }
    return hypxray::run_command(cfg);
}
