#include <qeuclid/experiments.hpp>

#include <CLI11.hpp>

#include <iostream>

extern char** environ;

namespace {

int exit_code(const qeuclid::Error& e) {
    switch (e.kind()) {
        case qeuclid::ErrorKind::Config: return 3;
        case qeuclid::ErrorKind::Precondition: return 4;
        case qeuclid::ErrorKind::Numeric: return 5;
        case qeuclid::ErrorKind::Divergence: return 6;
    }
    return 5;
}

struct Overrides {
    std::string out;
    long long seed = -1;
    int threads = 0;

    void apply(qeuclid::Config& c) const {
        if (!out.empty()) c.set("out", out);
        if (seed >= 0) c.set("seed", std::to_string(seed));
        if (threads > 0) c.set("threads", std::to_string(threads));
    }
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--seed", o.seed, "random seed")->check(CLI::NonNegativeNumber);
    cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional evolution on the quantum Euclidean space"};
    app.require_subcommand(1);

    Overrides run_o, val_o;
    std::string config_path;
    auto* run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("config", config_path, "config file")->required();
    add_common(run, run_o);

    std::string only;
    double radius = 0.0;
    auto* validate = app.add_subcommand("validate", "run the acceptance battery");
    auto* only_opt = validate->add_option("--only", only, "comma-separated criterion numbers");
    validate->add_option("--ml-series-radius", radius, "Mittag-Leffler series/contour seam radius")
        ->check(CLI::PositiveNumber);
    add_common(validate, val_o);

    auto* list = app.add_subcommand("list-experiments", "list experiment kinds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (list->parsed()) {
            for (const auto& e : qeuclid::experiment_catalog()) {
                std::cout << e.name << "\t" << e.description << "\toutputs:";
                for (const auto& f : e.outputs) std::cout << " " << f;
                std::cout << "\n";
            }
            return 0;
        }
        if (run->parsed()) {
            qeuclid::Config c = qeuclid::Config::load(config_path);
            c.apply_environment(environ);
            run_o.apply(c);
            const auto r = qeuclid::run_experiment(c, std::cout);
            for (const auto& f : r.files) std::cout << "wrote " << f << "\n";
            return r.passed ? 0 : 1;
        }
        if (only_opt->count() > 0 && qeuclid::detail::trim(only).empty()) {
            std::cerr << "--only needs at least one criterion number\n";
            return 2;
        }
        qeuclid::Config c;
        c.apply_environment(environ);
        val_o.apply(c);
        if (radius > 0.0) c.set("validation.ml_series_radius", qeuclid::format_number(radius));
        std::vector<int> ids;
        try {
            ids = qeuclid::parse_selection(only_opt->count() > 0 ? only : c.get("validation.only"));
        } catch (const qeuclid::ConfigError& e) {
            std::cerr << e.what() << "\n";
            return 2;
        }
        std::filesystem::path out;
        if (!val_o.out.empty()) {
            out = val_o.out;
            std::filesystem::create_directories(out);
        }
        const auto r = qeuclid::run_validation_suite(c, ids, val_o.out.empty() ? nullptr : &out, std::cout);
        return r.passed ? 0 : 1;
    } catch (const qeuclid::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    }
}
