#include <iostream>

#include "CLI11.hpp"
#include "aqv/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Verification of Markov-chain requirements under parameter uncertainty"};
    app.require_subcommand(1);
    aqv::CommandLine cl;
    std::uint64_t seed = 0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--model", cl.model, "parametric DTMC file");
        sub->add_option("--props", cl.props, "requirements file");
        sub->add_option("--config", cl.config, "key = value configuration");
        sub->add_option("--out", cl.out, "output directory (overrides output_dir)");
        sub->add_option("--truth", cl.truth, "ground-truth valuation file");
        sub->add_option("--seed", seed, "random seed (overrides the config)");
        sub->add_option("--strategy", cl.strategy, "veracity or uniform")->check(CLI::IsMember({"veracity", "uniform"}));
    };
    auto* verify = app.add_subcommand("verify", "run the verification loop");
    common(verify);
    auto* evaluate = app.add_subcommand("evaluate", "evaluate every requirement at the --truth valuation");
    common(evaluate);
    auto* compare = app.add_subcommand("compare", "veracity against uniform on a scenario list");
    common(compare);
    compare->add_option("--scenarios", cl.scenarios, "scenario list (JSON)")->required();
    auto* sweep = app.add_subcommand("sweep-rbudget", "rerun one scenario over several round budgets");
    common(sweep);
    sweep->add_option("--scenarios", cl.scenarios, "take the first scenario of this list");
    sweep->add_option("--values", cl.values, "comma separated round budgets (default 1250,...,80000)");
    auto* generate = app.add_subcommand("generate-scenarios", "synthesise a scenario list");
    common(generate);
    generate->add_option("--count", cl.count, "number of scenarios")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }
    for (auto* sub : {verify, evaluate, compare, sweep, generate}) {
        if (sub->count("--seed")) cl.seed = seed;
    }

    if (verify->parsed()) return aqv::cmd_verify(cl, std::cout, std::cerr, std::cin);
    if (evaluate->parsed()) return aqv::cmd_evaluate(cl, std::cout, std::cerr);
    if (compare->parsed()) return aqv::cmd_compare(cl, std::cout, std::cerr);
    if (sweep->parsed()) return aqv::cmd_sweep_rbudget(cl, std::cout, std::cerr);
    return aqv::cmd_generate_scenarios(cl, std::cout, std::cerr);
}
