// smallball command-line entry point. Exit codes: 0 pass, 1 bound or claim
// violation, 2 usage, configuration or input error.

#include "smallball/bounds.hpp"
#include "smallball/error.hpp"
#include "smallball/instances.hpp"
#include "smallball/io.hpp"
#include "smallball/prg.hpp"
#include "smallball/sampler.hpp"
#include "smallball/transfer.hpp"
#include "smallball/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <regex>
#include <sstream>

using namespace smallball;
using nlohmann::ordered_json;

namespace {

constexpr int exit_pass = 0;
constexpr int exit_violation = 1;
constexpr int exit_usage = 2;

std::string default_constants_path() { return SMALLBALL_DEFAULT_CONSTANTS; }

std::string text_of(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

kernels::Backend parse_backend(const std::string& name) {
    if (name == "openmp") return kernels::Backend::OpenMP;
    if (name == "serial") return kernels::Backend::Serial;
    throw Error(ErrorCode::ConfigError, "backend must be serial or openmp, got '" + name + "'");
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
    } else {
        io::write_file(out_path, text);
    }
}

// Signs from the chain document: none -> alternating labeling, one row ->
// repeated, otherwise one row per step.
SignSystem signs_for(const io::ChainDocument& doc, std::size_t n) {
    if (!doc.signs || doc.signs->empty()) return SignSystem::alternating(n, doc.chain);
    if (doc.signs->size() == 1) return SignSystem::repeated(doc.signs->front(), n, doc.chain);
    if (doc.signs->size() != n) {
        throw Error(ErrorCode::ConfigError, "chain file has " + std::to_string(doc.signs->size()) +
                                                " sign rows but there are " + std::to_string(n) + " weights");
    }
    return SignSystem(*doc.signs, doc.chain);
}

std::vector<double> parse_center(const std::string& text, std::size_t d) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ConfigError, "center entry '" + item + "' is not a number");
        }
    }
    if (out.size() == 1 && d > 1) out.assign(d, out[0]);
    if (out.size() != d) throw Error(ErrorCode::ConfigError, "center needs " + std::to_string(d) + " coordinates");
    return out;
}

// "all-ones", "arange", "random-unit(d,seed)" or a path to a weights file.
WeightSystem weights_from_spec(const std::string& spec, std::size_t n) {
    if (spec == "all-ones") return WeightSystem::all_ones(n);
    if (spec == "arange") return WeightSystem::arange(n);
    static const std::regex unit(R"(random-unit\((\d+),\s*(\d+)\))");
    std::smatch m;
    if (std::regex_match(spec, m, unit)) {
        return random_unit_weights(n, std::stoul(m[1].str()), std::stoull(m[2].str()));
    }
    return io::load_weights(spec);
}

bool is_generator(const std::string& spec) {
    return spec == "all-ones" || spec == "arange" || spec == "random-unit" || spec.rfind("random-unit(", 0) == 0;
}

void print_reports(const std::vector<BoundReport>& reports, const std::string& out_path) {
    std::ostringstream csv;
    write_reports_csv(csv, reports);
    if (!out_path.empty()) io::write_file(out_path, csv.str());
    std::cout << "instance_id                      n    lambda      prob        bound       ratio   pass\n";
    for (const auto& r : reports) {
        char line[256];
        std::snprintf(line, sizeof line, "%-30s %5zu  %8.4f  %10.4e  %10.4e  %7.4f  %s\n", r.instance_id.c_str(), r.n,
                      r.lambda, r.probability, r.bound, r.ratio, r.pass ? "yes" : "NO");
        std::cout << line;
    }
}

// ---------------------------------------------------------------------------
// Experiment configs

struct ExperimentConfig {
    std::string kind;
    std::string chain;
    std::string weights = "all-ones";
    std::vector<double> x0 = {0.0};
    double radius = 1.0;
    std::vector<std::size_t> n_list;
    std::vector<double> lambda_list;
    std::vector<std::size_t> d_list;
    std::uint64_t seed = default_seed;
    std::uint64_t samples = 100000;
    unsigned k = 0;
    std::string output;
    std::string constants = default_constants_path();
    double budget = 1e6;
};

template <class T>
T config_field(const ordered_json& doc, const char* name, const T& fallback) {
    const auto it = doc.find(name);
    if (it == doc.end()) return fallback;
    try {
        return it->get<T>();
    } catch (const ordered_json::exception&) {
        throw Error(ErrorCode::ConfigError, std::string("config field '") + name + "' has the wrong type");
    }
}

ExperimentConfig parse_config(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw Error(ErrorCode::ConfigError, std::string("config: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorCode::ConfigError, "config must be a JSON object");
    ExperimentConfig c;
    c.kind = config_field<std::string>(doc, "kind", "");
    if (c.kind.empty()) throw Error(ErrorCode::ConfigError, "config field 'kind' is required");
    c.chain = config_field<std::string>(doc, "chain", c.chain);
    c.weights = config_field<std::string>(doc, "weights", c.weights);
    if (const auto it = doc.find("x0"); it != doc.end()) {
        if (it->is_number()) {
            c.x0 = {it->get<double>()};
        } else {
            c.x0 = config_field<std::vector<double>>(doc, "x0", c.x0);
        }
    }
    c.radius = config_field<double>(doc, "R", c.radius);
    c.n_list = config_field<std::vector<std::size_t>>(doc, "n_list", c.n_list);
    c.lambda_list = config_field<std::vector<double>>(doc, "lambda_list", c.lambda_list);
    c.d_list = config_field<std::vector<std::size_t>>(doc, "d_list", c.d_list);
    c.seed = config_field<std::uint64_t>(doc, "seed", c.seed);
    c.samples = config_field<std::uint64_t>(doc, "samples", c.samples);
    c.k = config_field<unsigned>(doc, "k", c.k);
    c.output = config_field<std::string>(doc, "output", c.output);
    c.constants = config_field<std::string>(doc, "constants", c.constants);
    c.budget = config_field<double>(doc, "budget", c.budget);
    return c;
}

// A chain per sweep point: the chain file, or two-state chains over lambda_list.
struct ChainChoice {
    std::string label;
    io::ChainDocument doc;
};

std::vector<ChainChoice> chains_for(const ExperimentConfig& c) {
    std::vector<ChainChoice> out;
    if (!c.chain.empty()) {
        out.push_back({"file", io::load_chain(c.chain)});
    }
    for (const double lam : c.lambda_list) {
        out.push_back({"two-state-" + text_of(lam), {make_two_state_chain(lam), std::nullopt}});
    }
    if (out.empty()) throw Error(ErrorCode::ConfigError, "config needs 'chain' or a nonempty 'lambda_list'");
    return out;
}

std::vector<std::size_t> sizes_for(const ExperimentConfig& c) {
    if (!is_generator(c.weights)) return {0};
    if (c.n_list.empty()) throw Error(ErrorCode::ConfigError, "config field 'n_list' must be nonempty for generated weights");
    return c.n_list;
}

WeightSystem weights_for(const ExperimentConfig& c, std::size_t n, std::size_t d) {
    std::string spec = c.weights;
    if (spec.rfind("random-unit", 0) == 0 && d != 0) {
        spec = "random-unit(" + std::to_string(d) + "," + std::to_string(c.seed) + ")";
    }
    return weights_from_spec(spec, n);
}

int run_bound_sweep(const ExperimentConfig& c, BoundKind kind, bool sampled) {
    const auto constants = ConstantSet::load(c.constants);
    std::vector<BoundReport> reports;
    const std::vector<std::size_t> dims = c.d_list.empty() ? std::vector<std::size_t>{0} : c.d_list;
    for (const auto& choice : chains_for(c)) {
        const double lam = spectral_lambda(choice.doc.chain);
        for (const std::size_t n_req : sizes_for(c)) {
            for (const std::size_t d_req : dims) {
                const auto weights = weights_for(c, n_req, d_req);
                const std::size_t n = weights.size();
                const std::size_t d = weights.dimension();
                const auto signs = signs_for(choice.doc, n);
                std::vector<double> center = c.x0;
                if (center.size() == 1 && d > 1) center.assign(d, center[0]);
                if (center.size() != d) throw Error(ErrorCode::ConfigError, "config field 'x0' has the wrong length");
                double prob = 0.0;
                if (sampled) {
                    prob = smallball_mc(choice.doc.chain, signs, weights, center, c.radius, c.samples, c.seed).estimate;
                } else {
                    const auto dist = exact_sum_distribution(choice.doc.chain, signs, weights);
                    prob = kind == BoundKind::DistinctInt ? dist.max_point_mass()
                                                          : smallball_exact(dist, center[0], c.radius);
                }
                const BoundParams params{n, d, lam, c.radius};
                const double bound = theorem_bound(kind, params, constants);
                const std::string id = choice.label + "-n" + std::to_string(n) + "-d" + std::to_string(d);
                reports.push_back(BoundReport::make(id, params, prob, bound));
            }
        }
    }
    print_reports(reports, c.output);
    return all_pass(reports) ? exit_pass : exit_violation;
}

int run_diff_scaling(const ExperimentConfig& c) {
    ExperimentConfig arange = c;
    arange.weights = "arange";
    const int code = run_bound_sweep(arange, BoundKind::DistinctInt, false);
    if (c.n_list.size() >= 2) {
        for (const auto& choice : chains_for(c)) {
            std::vector<double> xs;
            std::vector<double> ys;
            for (const std::size_t n : c.n_list) {
                const auto dist =
                    exact_sum_distribution(choice.doc.chain, signs_for(choice.doc, n), WeightSystem::arange(n));
                xs.push_back(static_cast<double>(n));
                ys.push_back(dist.max_point_mass());
            }
            std::cout << choice.label << " slope " << loglog_slope(xs, ys) << "\n";
        }
    }
    return code;
}

int run_prg_sweep(const ExperimentConfig& c) {
    const auto constants = ConstantSet::load(c.constants);
    if (c.n_list.empty()) throw Error(ErrorCode::ConfigError, "config field 'n_list' must be nonempty");
    std::vector<BoundReport> reports;
    for (const std::size_t n : c.n_list) {
        const unsigned k = c.k != 0 ? c.k : prg_k_for(n);
        auto graph = std::make_shared<const ExpanderGraph>(build_mgg_expander(k));
        auto weights = weights_for(c, n, 1).flat();
        const std::size_t original = weights.size();
        weights = pad_to_multiple(std::move(weights), k);
        const PrgSpec spec(graph, weights.size());
        const double p = prg_smallball_exact(spec, weights, c.x0.at(0), c.radius, weights.size() - original, c.budget);
        const BoundParams params{original, 1, 0.0, c.radius};
        reports.push_back(BoundReport::make("prg-k" + std::to_string(k) + "-n" + std::to_string(original), params, p,
                                            theorem_bound(BoundKind::Prg, params, constants)));
    }
    print_reports(reports, c.output);
    return all_pass(reports) ? exit_pass : exit_violation;
}

std::string tightness_csv(const std::vector<double>& lambdas, const std::vector<std::size_t>& ns, bool& pass) {
    const auto rows = tightness_sweep(lambdas, ns);
    std::ostringstream csv;
    csv << "lambda,n,center_mass,scaled,slope\n";
    pass = true;
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
        std::vector<double> xs;
        std::vector<double> ys;
        for (std::size_t ni = 0; ni < ns.size(); ++ni) {
            xs.push_back(static_cast<double>(ns[ni]));
            ys.push_back(rows[li * ns.size() + ni].center_mass);
        }
        const double slope = ns.size() >= 2 ? loglog_slope(xs, ys) : 0.0;
        if (ns.size() >= 2) pass = pass && slope >= -0.55 && slope <= -0.45;
        for (std::size_t ni = 0; ni < ns.size(); ++ni) {
            const auto& r = rows[li * ns.size() + ni];
            csv << text_of(r.lambda) << ',' << r.n << ',' << text_of(r.center_mass) << ',' << text_of(r.scaled) << ','
                << (ns.size() >= 2 ? text_of(slope) : std::string()) << '\n';
        }
    }
    return csv.str();
}

int run_tightness(const std::vector<double>& lambdas, const std::vector<std::size_t>& ns, const std::string& out) {
    if (lambdas.empty() || ns.empty()) throw Error(ErrorCode::ConfigError, "tightness needs lambdas and sizes");
    bool pass = true;
    emit(tightness_csv(lambdas, ns, pass), out);
    return pass ? exit_pass : exit_violation;
}

int run_claims(std::uint64_t seed, double budget, const std::string& out) {
    const auto claims = verify_claims(seed, budget);
    emit(claims_report_json(claims), out);
    bool pass = true;
    for (const auto& c : claims) {
        std::cerr << (c.pass ? "PASS " : "FAIL ") << c.id << " instances=" << c.instances
                  << " max_violation=" << c.max_violation << "\n";
        pass = pass && c.pass;
    }
    return pass ? exit_pass : exit_violation;
}

int run_fit(std::uint64_t seed, const std::string& out) {
    emit(fit_all(seed).to_json(), out);
    return exit_pass;
}

int run_verify_all(std::uint64_t seed, const std::string& constants_path, const std::string& out,
                   kernels::Backend backend) {
    VerifyContext ctx;
    ctx.seed = seed;
    ctx.constants = ConstantSet::load(constants_path);
    ctx.backend = backend;
    const auto results = verify_all(ctx);
    bool pass = true;
    for (const auto& r : results) {
        std::cout << r.summary_line() << "\n";
        pass = pass && r.pass;
    }
    if (!out.empty()) io::write_file(out, verify_report_json(seed, results));
    return pass ? exit_pass : exit_violation;
}

// Input paths in a config are relative to the config file; outputs stay
// relative to the working directory.
void resolve_inputs(ExperimentConfig& c, const std::filesystem::path& base) {
    auto resolve = [&](std::string& path) {
        if (!path.empty() && std::filesystem::path(path).is_relative()) path = (base / path).string();
    };
    resolve(c.chain);
    if (!is_generator(c.weights)) resolve(c.weights);
    if (c.constants != default_constants_path()) resolve(c.constants);
}

int run_config(const ExperimentConfig& c) {
    if (c.kind == "smallball-exact") return run_bound_sweep(c, BoundKind::ScalarHalfUnit, false);
    if (c.kind == "smallball-mc") return run_bound_sweep(c, BoundKind::HighDim, true);
    if (c.kind == "diff-scaling") return run_diff_scaling(c);
    if (c.kind == "prg") return run_prg_sweep(c);
    if (c.kind == "tightness") return run_tightness(c.lambda_list, c.n_list, c.output);
    if (c.kind == "verify-claims") return run_claims(c.seed, c.budget, c.output);
    if (c.kind == "fit-constants") return run_fit(c.seed, c.output);
    throw Error(ErrorCode::ConfigError, "config field 'kind' has unknown value '" + c.kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Small-ball probabilities of Markov-chain signed sums"};
    app.require_subcommand(1);
    std::string backend_name = "openmp";
    app.add_option("--backend", backend_name, "Kernel backend: serial or openmp");

    std::string chain_path;
    std::string weights_path;
    std::string out_path;
    std::string in_path;
    std::string constants_path = default_constants_path();
    std::string center = "0";
    double radius = 1.0;
    double eps = 1.0;
    std::uint64_t seed = default_seed;
    std::uint64_t samples = 0;
    double budget = 1e6;
    bool rational = false;
    std::int64_t prime = 0;
    unsigned k = 0;
    std::size_t n = 0;
    std::string mode = "exact";
    bool pad = false;
    bool certify = false;
    std::string graph_path;
    std::vector<double> lambdas = {0.0, 0.3, 0.6};
    std::vector<std::size_t> sizes = {64, 128, 256, 512, 1024};
    std::string config_path;

    auto* gap = app.add_subcommand("spectral-gap", "Spectral parameter of a chain");
    gap->add_option("--chain", chain_path, "Chain JSON")->required();

    auto* dist = app.add_subcommand("exact-dist", "Exact law of an integer signed sum as CSV");
    dist->add_option("--chain", chain_path, "Chain JSON")->required();
    dist->add_option("--weights", weights_path, "Weights JSON or generator")->required();
    dist->add_option("--n", n, "Length for generated weights");
    dist->add_option("--out", out_path, "Output CSV (stdout if absent)");
    dist->add_flag("--rational", rational, "Exact rational arithmetic");

    auto* ball = app.add_subcommand("smallball", "Small-ball probability, exact or sampled");
    ball->add_option("--chain", chain_path, "Chain JSON")->required();
    ball->add_option("--weights", weights_path, "Weights JSON or generator")->required();
    ball->add_option("--n", n, "Length for generated weights");
    ball->add_option("--center,--x0", center, "Center, comma separated for d > 1");
    ball->add_option("--radius", radius, "Closed ball radius");
    ball->add_option("--samples", samples, "Monte Carlo samples (exact when 0)");
    ball->add_option("--seed", seed, "Sampling seed");

    auto* ess = app.add_subcommand("esseen", "Fourier bound for an integer instance");
    ess->add_option("--chain", chain_path, "Chain JSON")->required();
    ess->add_option("--weights", weights_path, "Weights JSON or generator")->required();
    ess->add_option("--n", n, "Length for generated weights");
    ess->add_option("--radius", radius, "Window radius");
    ess->add_option("--eps", eps, "Integration half-width");
    ess->add_option("--constants", constants_path, "Fitted constants JSON");

    auto* zp = app.add_subcommand("zp-average", "Averaged Fourier transform over Z_p");
    zp->add_option("--chain", chain_path, "Chain JSON")->required();
    zp->add_option("--weights", weights_path, "Weights JSON or generator")->required();
    zp->add_option("--n", n, "Length for generated weights");
    zp->add_option("--prime", prime, "Prime (default: smallest prime above twice the largest weight)");

    auto* claims = app.add_subcommand("verify-claims", "Proof-level checks on seeded instances");
    claims->add_option("--budget", budget, "Path enumeration budget per instance");
    claims->add_option("--seed", seed, "Instance seed");
    claims->add_option("--out", out_path, "Output JSON (stdout if absent)");

    auto* fit = app.add_subcommand("fit-constants", "Refit every constant over its family");
    fit->add_option("--seed", seed, "Family seed");
    fit->add_option("--out", out_path, "Output JSON (stdout if absent)");

    auto* build = app.add_subcommand("prg-build", "Build the degree-8 expander on 2^k vertices");
    build->add_option("--k", k, "Even label length")->required();
    build->add_option("--out", out_path, "Output graph JSON (stdout if absent)");
    build->add_flag("--certify", certify, "Compute and store the spectral parameter");

    auto* ptest = app.add_subcommand("prg-test", "Small-ball probability under the expander walk measure");
    ptest->add_option("--k", k, "Even label length")->required();
    ptest->add_option("--n", n, "Number of signs")->required();
    ptest->add_option("--weights", weights_path, "Weights JSON or generator")->required();
    ptest->add_option("--x0", center, "Center");
    ptest->add_option("--radius", radius, "Window radius");
    ptest->add_option("--mode", mode, "exact or sampled")->check(CLI::IsMember({"exact", "sampled"}));
    ptest->add_option("--samples", samples, "Samples in sampled mode");
    ptest->add_option("--seed", seed, "Sampling seed");
    ptest->add_option("--graph", graph_path, "Graph JSON instead of building one");
    ptest->add_flag("--pad-to-multiple", pad, "Append zero weights up to a multiple of k");
    ptest->add_option("--constants", constants_path, "Fitted constants JSON");

    auto* tight = app.add_subcommand("tightness", "Central mass of the two-state chain sum");
    tight->add_option("--lambdas", lambdas, "Spectral parameters");
    tight->add_option("--sizes", sizes, "Sum lengths");
    tight->add_option("--out", out_path, "Output CSV (stdout if absent)");

    auto* all = app.add_subcommand("verify-all", "Run the acceptance suite");
    all->add_option("--seed", seed, "Instance seed");
    all->add_option("--constants", constants_path, "Fitted constants JSON");
    all->add_option("--out", out_path, "Report JSON");

    auto* check = app.add_subcommand("check-report", "Re-read a bound report CSV; exit 1 if any row fails");
    check->add_option("--in", in_path, "Report CSV")->required();

    auto* run = app.add_subcommand("run", "Run an experiment config");
    run->add_option("--config", config_path, "Experiment config JSON")->required();
    auto* seed_override = run->add_option("--seed", seed, "Override the config seed");
    auto* out_override = run->add_option("--out", out_path, "Override the config output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_pass : exit_usage;
    }

    try {
        const auto backend = parse_backend(backend_name);
        auto load_weights = [&]() {
            if (is_generator(weights_path) && n == 0) {
                throw Error(ErrorCode::ConfigError, "--n is required with generated weights");
            }
            return weights_from_spec(weights_path, n);
        };

        if (*gap) {
            const auto doc = io::load_chain(chain_path);
            std::cout << text_of(spectral_lambda(doc.chain)) << "\n";
            return exit_pass;
        }
        if (*dist) {
            const auto doc = io::load_chain(chain_path);
            const auto weights = load_weights();
            DistributionOptions opts;
            opts.backend = backend;
            if (rational) opts.arithmetic = Arithmetic::ExactRational;
            emit(io::distribution_to_csv(exact_sum_distribution(doc.chain, signs_for(doc, weights.size()), weights, opts)),
                 out_path);
            return exit_pass;
        }
        if (*ball) {
            const auto doc = io::load_chain(chain_path);
            const auto weights = load_weights();
            const auto signs = signs_for(doc, weights.size());
            const auto x0 = parse_center(center, weights.dimension());
            ordered_json out;
            out["lambda"] = spectral_lambda(doc.chain);
            if (samples == 0) {
                if (weights.dimension() != 1 || !weights.integral()) {
                    throw Error(ErrorCode::ConfigError, "exact mode needs integer scalar weights; pass --samples");
                }
                const auto d = exact_sum_distribution(doc.chain, signs, weights);
                out["mode"] = "exact";
                out["probability"] = smallball_exact(d, x0[0], radius);
            } else {
                out["mode"] = "sampled";
                out["estimate"] = ordered_json::parse(
                    smallball_mc(doc.chain, signs, weights, x0, radius, samples, seed, backend).to_json());
            }
            std::cout << out.dump(2) << "\n";
            return exit_pass;
        }
        if (*ess) {
            const auto doc = io::load_chain(chain_path);
            const auto weights = load_weights();
            const auto signs = signs_for(doc, weights.size());
            const auto constants = ConstantSet::load(constants_path);
            const Matrix values = step_values(signs, weights);
            const double c = constants.value(constant_names::esseen);
            const double integral = charfn_modulus_integral(doc.chain, values, eps);
            const double bound = c * (radius + 1.0 / eps) * integral;
            ordered_json out;
            out["integral"] = integral;
            out["C_esseen"] = c;
            out["bound"] = bound;
            int code = exit_pass;
            if (weights.integral()) {
                const double p = max_window_probability(exact_sum_distribution(doc.chain, signs, weights), radius);
                out["max_window_probability"] = p;
                out["pass"] = p <= bound;
                if (p > bound) code = exit_violation;
            }
            std::cout << out.dump(2) << "\n";
            return code;
        }
        if (*zp) {
            const auto doc = io::load_chain(chain_path);
            const auto weights = load_weights();
            const std::int64_t p = prime != 0 ? prime : find_prime(weights);
            const auto avg = zp_fourier_average(doc.chain, signs_for(doc, weights.size()), weights, p, backend);
            ordered_json out;
            out["prime"] = avg.prime;
            out["average"] = avg.average;
            std::cout << out.dump(2) << "\n";
            return exit_pass;
        }
        if (*claims) return run_claims(seed, budget, out_path);
        if (*fit) return run_fit(seed, out_path);
        if (*build) {
            auto graph = build_mgg_expander(k);
            if (certify) certify_lambda(graph);
            emit(io::graph_to_json(graph), out_path);
            return exit_pass;
        }
        if (*ptest) {
            std::shared_ptr<const ExpanderGraph> graph;
            if (graph_path.empty()) {
                graph = std::make_shared<const ExpanderGraph>(build_mgg_expander(k));
            } else {
                graph = std::make_shared<const ExpanderGraph>(io::load_graph(graph_path));
                if (graph->k() != k) throw Error(ErrorCode::ConfigError, "graph file does not have 2^k vertices");
            }
            auto weights = weights_from_spec(weights_path, n).flat();
            if (weights.size() != n) {
                throw Error(ErrorCode::ConfigError, "weights file has " + std::to_string(weights.size()) +
                                                        " entries but --n is " + std::to_string(n));
            }
            std::size_t padding = 0;
            if (pad) {
                weights = pad_to_multiple(std::move(weights), k);
                padding = weights.size() - n;
            }
            const PrgSpec spec(graph, weights.size());
            const double x0 = parse_center(center, 1)[0];
            const auto constants = ConstantSet::load(constants_path);
            const double bound = theorem_bound(BoundKind::Prg, {n, 1, 0.0, radius}, constants);
            ordered_json out;
            out["k"] = k;
            out["n"] = n;
            out["padding"] = padding;
            out["log2_size"] = spec.log2_size();
            double p = 0.0;
            if (mode == "exact") {
                p = prg_smallball_exact(spec, weights, x0, radius, padding, walk_budget, backend);
                out["probability"] = p;
            } else {
                const auto est = prg_smallball_sampled(spec, weights, x0, radius, samples == 0 ? 100000 : samples, seed,
                                                       padding, backend);
                p = est.estimate;
                out["estimate"] = ordered_json::parse(est.to_json());
            }
            out["bound"] = bound;
            out["pass"] = p <= bound;
            std::cout << out.dump(2) << "\n";
            return p <= bound ? exit_pass : exit_violation;
        }
        if (*tight) return run_tightness(lambdas, sizes, out_path);
        if (*all) return run_verify_all(seed, constants_path, out_path, backend);
        if (*check) {
            std::istringstream in(io::read_file(in_path));
            const auto reports = read_reports_csv(in);
            std::size_t failed = 0;
            for (const auto& r : reports) failed += r.pass ? 0 : 1;
            std::cout << reports.size() << " rows, " << failed << " failed\n";
            return failed == 0 ? exit_pass : exit_violation;
        }
        if (*run) {
            auto config = parse_config(io::read_file(config_path));
            resolve_inputs(config, std::filesystem::path(config_path).parent_path());
            if (seed_override->count() > 0) config.seed = seed;
            if (out_override->count() > 0) config.output = out_path;
            return run_config(config);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}
