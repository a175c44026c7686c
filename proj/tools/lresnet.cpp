// lresnet: sample | experiment | bounds | construct | train
// Exit codes: 0 ok, 2 config error, 3 numeric abort, 1 anything else.

#include "lresnet/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kNumeric = 3 };

int report_error(const char* kind, const std::string& message, int code) {
    nlohmann::json err{{"error", kind}, {"message", message}};
    std::cerr << err.dump() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Langevin sampling with ResNet-like drift networks"};
    app.require_subcommand(1, 1);
    std::string config_path, out_dir = ".";
    std::vector<std::string> sets;
    const std::vector<std::string> names{"sample", "experiment", "bounds", "construct", "train"};
    for (const auto& n : names) {
        auto* sub = app.add_subcommand(n);
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--set", sets, "key=value override (dotted path)")->allow_extra_args(false);
        sub->add_option("--out", out_dir, "output directory");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();

    using namespace lresnet;
    try {
        const json cfg = load_config(config_path, sets);
        json summary;
        if (cmd == "sample") summary = cmd_sample(cfg, out_dir);
        else if (cmd == "experiment") summary = cmd_experiment(cfg, out_dir);
        else if (cmd == "bounds") summary = cmd_bounds(cfg, out_dir);
        else if (cmd == "construct") summary = cmd_construct(cfg, out_dir);
        else summary = cmd_train(cfg, out_dir);
        std::cout << summary.dump(2) << '\n';
        return kOk;
    } catch (const NumericAbort& e) {
        nlohmann::json err{{"error", "numeric_abort"}, {"step", e.step()}, {"message", e.what()}};
        std::cerr << err.dump() << '\n';
        return kNumeric;
    } catch (const ConfigError& e) {
        return report_error("config", e.what(), kConfig);
    } catch (const std::invalid_argument& e) {
        return report_error("config", e.what(), kConfig);
    } catch (const nlohmann::json::exception& e) {
        return report_error("config", e.what(), kConfig);
    } catch (const std::exception& e) {
        return report_error("runtime", e.what(), kOther);
    }
}
