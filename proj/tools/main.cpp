#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "omarray/config.hpp"
#include "omarray/errors.hpp"
#include "omarray/recipes.hpp"
#include "omarray/sweep.hpp"

namespace {

// Exit codes: 0 clean, 1 some points failed, 2 configuration problem.
constexpr int kOk = 0;
constexpr int kPartial = 1;
constexpr int kConfig = 2;

void log_override(const char* key, const std::string& from, const std::string& to) {
    std::fprintf(stderr, "override: %s = %s (config said %s)\n", key, to.c_str(), from.c_str());
}

int cmd_run(const std::string& config_path, const std::string& out_override,
            bool seed_given, std::uint64_t seed, int workers, bool fresh, bool verbose) {
    omarray::SweepSpec spec = omarray::load_config_file(config_path);
    if (!out_override.empty() && out_override != spec.out) {
        log_override("out", spec.out, out_override);
        spec.out = out_override;
    }
    if (seed_given && seed != spec.ensemble.seed) {
        log_override("seed", std::to_string(spec.ensemble.seed), std::to_string(seed));
        spec.ensemble.seed = seed;
        spec.phase.ensemble.seed = seed;
    }
    omarray::ExecuteOptions eo;
    eo.workers = workers;
    eo.resume = !fresh;
    eo.quiet = !verbose;
    omarray::RunManifest m = omarray::execute(spec, eo);
    std::printf("%s: %d points, %d done, %d failed -> %s\n", m.engine.c_str(),
                static_cast<int>(m.points.size()), m.done_count(), m.failed_count(),
                spec.out.c_str());
    if (m.failed_count() > 0) {
        for (const auto& p : m.points)
            if (p.failed())
                std::fprintf(stderr, "point %d (axis1=%g axis2=%g): %s\n", p.index, p.axis1,
                             p.axis2, p.status.c_str());
        return kPartial;
    }
    return kOk;
}

int cmd_recipe(const std::string& name, double scale, std::uint64_t seed,
               const std::string& out, int workers, bool verbose) {
    omarray::RecipeOptions ro;
    ro.scale = scale;
    ro.seed = seed;
    ro.out = out;
    ro.workers = workers;
    ro.quiet = !verbose;
    omarray::RecipeResult res = omarray::run_figure_recipe(name, ro);
    std::printf("%s -> %s\n", res.name.c_str(), res.files.front().c_str());
    for (size_t i = 0; i < res.manifests.size(); ++i)
        std::printf("  %s: %d/%d points done (hash %s)\n", res.files[i + 1].c_str(),
                    res.manifests[i].done_count(),
                    static_cast<int>(res.manifests[i].points.size()),
                    res.manifests[i].hash.c_str());
    return res.failed_points > 0 ? kPartial : kOk;
}

int cmd_validate(const std::string& config_path) {
    omarray::SweepSpec spec = omarray::load_config_file(config_path);
    std::printf("engine: %s\n", omarray::engine_name(spec.engine).c_str());
    std::printf("points: %d\n", spec.points());
    std::printf("hash: %s\n", omarray::spec_hash(spec).c_str());
    std::printf("%s\n", omarray::spec_to_json(spec).c_str());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sweep driver for driven optomechanical array simulations"};
    app.require_subcommand(1);

    std::string config_path, out_override, recipe_name;
    std::uint64_t seed = 1;
    int workers = 1;
    double scale = 1.0;
    bool fresh = false, verbose = false, list_recipes = false;

    CLI::App* run = app.add_subcommand("run", "execute a sweep described by a config file");
    run->add_option("config", config_path, "path to the config file")->required();
    run->add_option("--out", out_override, "output directory (overrides the config)");
    CLI::Option* run_seed = run->add_option("--seed", seed, "base seed (overrides the config)");
    run->add_option("--workers", workers, "worker threads for independent points");
    run->add_flag("--fresh", fresh, "ignore an existing manifest and recompute every point");
    run->add_flag("--verbose", verbose, "per-point progress on stderr");

    CLI::App* recipe = app.add_subcommand("recipe", "run a pre-registered figure dataset");
    recipe->add_option("name", recipe_name, "recipe name (see --list)");
    recipe->add_option("--scale", scale, "resolution/size/realization multiplier")
        ->check(CLI::PositiveNumber);
    recipe->add_option("--seed", seed, "base seed");
    recipe->add_option("--out", out_override, "output directory (default runs/<name>)");
    recipe->add_option("--workers", workers, "worker threads for independent points");
    recipe->add_flag("--verbose", verbose, "per-point progress on stderr");
    recipe->add_flag("--list", list_recipes, "list recipe names and exit");

    CLI::App* validate =
        app.add_subcommand("validate", "parse a config, print the resolved spec and its hash");
    validate->add_option("config", config_path, "path to the config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config_path, out_override, run_seed->count() > 0, seed, workers,
                           fresh, verbose);
        if (recipe->parsed()) {
            if (list_recipes) {
                for (const auto& n : omarray::recipe_names()) std::printf("%s\n", n.c_str());
                return kOk;
            }
            if (recipe_name.empty()) {
                std::fprintf(stderr, "recipe: a name is required (or --list)\n");
                return kConfig;
            }
            return cmd_recipe(recipe_name, scale, seed, out_override, workers, verbose);
        }
        if (validate->parsed()) return cmd_validate(config_path);
    } catch (const omarray::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const omarray::invalid_params& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfig;
    } catch (const omarray::io_error& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfig;
    }
    return kOk;
}
