#include "smallball/bounds.hpp"

#include "smallball/error.hpp"
#include "text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace smallball {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Constant sets

ConstantSet::ConstantSet(std::vector<FittedConstant> constants) {
    for (auto& c : constants) set(std::move(c));
}

ConstantSet ConstantSet::uniform(double value) {
    ConstantSet s;
    for (const char* name : {constant_names::equal, constant_names::diff, constant_names::prg, constant_names::esseen,
                             constant_names::cosine, constant_names::coord, constant_names::prg_size}) {
        s.set({name, value, "uniform", "{}"});
    }
    return s;
}

const FittedConstant& ConstantSet::get(const std::string& name) const {
    const auto it = constants_.find(name);
    if (it == constants_.end()) throw Error(ErrorCode::ConfigError, "fitted constant '" + name + "' is missing");
    return it->second;
}

void ConstantSet::set(FittedConstant c) {
    if (!(c.value > 0.0) || !std::isfinite(c.value)) {
        throw Error(ErrorCode::ConfigError, "fitted constant '" + c.name + "' must be positive and finite");
    }
    const std::string key = c.name;
    constants_[key] = std::move(c);
}

std::vector<FittedConstant> ConstantSet::all() const {
    std::vector<FittedConstant> out;
    for (const auto& [name, c] : constants_) out.push_back(c);
    return out;
}

std::string ConstantSet::to_json() const {
    json arr = json::array();
    for (const auto& [name, c] : constants_) {
        arr.push_back({{"name", c.name}, {"value", c.value}, {"family", c.family}, {"grid", json::parse(c.grid)}});
    }
    return arr.dump(2) + "\n";
}

ConstantSet ConstantSet::from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("fitted constants: ") + e.what());
    }
    if (!doc.is_array()) throw Error(ErrorCode::ParseError, "fitted constants: $ must be an array");
    ConstantSet set;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& e = doc[i];
        const std::string path = "$[" + std::to_string(i) + "]";
        if (!e.is_object() || !e.contains("name") || !e["name"].is_string()) {
            throw Error(ErrorCode::ParseError, "fitted constants: " + path + ".name missing or not a string");
        }
        if (!e.contains("value") || !e["value"].is_number()) {
            throw Error(ErrorCode::ParseError, "fitted constants: " + path + ".value missing or not a number");
        }
        FittedConstant c;
        c.name = e["name"].get<std::string>();
        c.value = e["value"].get<double>();
        c.family = e.value("family", "");
        c.grid = e.contains("grid") ? e["grid"].dump() : "{}";
        set.set(std::move(c));
    }
    return set;
}

ConstantSet ConstantSet::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open fitted constants file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

void ConstantSet::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
    out << to_json();
}

// ---------------------------------------------------------------------------
// Quadrature-based bounds

double esseen_bound(const std::function<double(double)>& charfn_modulus, std::size_t dimension, double radius,
                    double eps, double prefactor, const QuadratureOptions& options) {
    if (dimension != 1) {
        throw Error(ErrorCode::UnsupportedDimension,
                    "Esseen quadrature is implemented for d = 1 only, got d = " + std::to_string(dimension));
    }
    if (!(eps > 0.0) || !(radius >= 0.0)) throw Error(ErrorCode::OutOfRange, "need eps > 0 and R >= 0");
    const double integral = adaptive_simpson(charfn_modulus, -eps, eps, options).value;
    return prefactor * (radius + 1.0 / eps) * integral;
}

double charfn_modulus_integral(const MarkovChain& chain, const Matrix& values, double eps) {
    double reach = 0.0;
    for (Eigen::Index j = 0; j < values.rows(); ++j) reach += values.row(j).cwiseAbs().maxCoeff();
    QuadratureOptions opts;
    opts.min_panels = static_cast<std::size_t>(std::clamp(std::ceil(8.0 * reach * eps), 64.0, 65536.0));
    const Matrix& a = chain.transition();
    const Vector& mu = chain.stationary();
    return adaptive_simpson([&](double xi) { return std::abs(kernels::charfn_at(a, mu, values, xi)); }, -eps, eps,
                            opts)
        .value;
}

double cosine_product_integral(const std::vector<double>& weights) {
    double top = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (!(std::abs(weights[j]) >= 1.0)) {
            throw Error(ErrorCode::PreconditionViolated,
                        "weight " + std::to_string(j) + " = " + std::to_string(weights[j]) + " has |v| < 1");
        }
        top = std::max(top, std::abs(weights[j]));
    }
    if (weights.empty()) return 2.0;
    QuadratureOptions opts;
    opts.min_panels = static_cast<std::size_t>(std::clamp(std::ceil(16.0 * top), 64.0, 65536.0));
    if (weights.size() <= 8) {
        for (const double v : weights) {
            const double a = std::abs(v);
            // cos(2 pi xi v) vanishes at xi = (2m + 1) / (4 |v|).
            for (double m = 0;; ++m) {
                const double z = (2.0 * m + 1.0) / (4.0 * a);
                if (z >= 1.0) break;
                opts.breakpoints.push_back(z);
                opts.breakpoints.push_back(-z);
            }
        }
    }
    const auto integrand = [&](double xi) {
        double prod = 1.0;
        for (const double v : weights) prod *= std::abs(std::cos(2.0 * std::numbers::pi * xi * v));
        return prod;
    };
    return adaptive_simpson(integrand, -1.0, 1.0, opts).value;
}

NegativeMoment binomial_negative_moment(unsigned n, double p, unsigned d) {
    if (n < 1 || d < 1) throw Error(ErrorCode::OutOfRange, "need n >= 1 and d >= 1");
    if (!(p > 0.0 && p <= 1.0)) {
        throw Error(ErrorCode::OutOfRange, "success probability must lie in (0, 1], got " + std::to_string(p));
    }
    NegativeMoment out;
    const double dd = d;
    out.bound = std::pow(dd / (static_cast<double>(n) * p), dd);
    if (p == 1.0) {
        out.exact = std::pow(static_cast<double>(n) + 1.0, -dd);
        return out;
    }
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    const double lfn = std::lgamma(static_cast<double>(n) + 1.0);
    kernels::CompensatedSum acc;
    for (unsigned i = 0; i <= n; ++i) {
        const double di = i;
        const double lchoose = lfn - std::lgamma(di + 1.0) - std::lgamma(static_cast<double>(n - i) + 1.0);
        acc.add(std::exp(lchoose + di * lp + static_cast<double>(n - i) * lq - dd * std::log(di + 1.0)));
    }
    out.exact = acc.value();
    return out;
}

// ---------------------------------------------------------------------------
// Theorem formulas

BoundKind parse_bound_kind(const std::string& text) {
    if (text == "highdim") return BoundKind::HighDim;
    if (text == "scalar-half-unit") return BoundKind::ScalarHalfUnit;
    if (text == "distinct-int") return BoundKind::DistinctInt;
    if (text == "prg") return BoundKind::Prg;
    throw Error(ErrorCode::ConfigError, "unknown bound kind '" + text + "'");
}

std::string to_string(BoundKind kind) {
    switch (kind) {
        case BoundKind::HighDim: return "highdim";
        case BoundKind::ScalarHalfUnit: return "scalar-half-unit";
        case BoundKind::DistinctInt: return "distinct-int";
        case BoundKind::Prg: return "prg";
    }
    return "?";
}

const char* bound_constant(BoundKind kind) {
    switch (kind) {
        case BoundKind::HighDim:
        case BoundKind::ScalarHalfUnit: return constant_names::equal;
        case BoundKind::DistinctInt: return constant_names::diff;
        case BoundKind::Prg: return constant_names::prg;
    }
    return "?";
}

double bound_shape(BoundKind kind, const BoundParams& params) {
    if (params.n < 1) throw Error(ErrorCode::OutOfRange, "n must be at least 1");
    if (!(params.lambda >= 0.0 && params.lambda <= 1.0)) {
        throw Error(ErrorCode::OutOfRange, "lambda must lie in [0, 1], got " + std::to_string(params.lambda));
    }
    if (params.lambda == 1.0 && kind != BoundKind::Prg) {
        throw Error(ErrorCode::DegenerateGap, "bound is degenerate at lambda = 1");
    }
    const double n = static_cast<double>(params.n);
    const double gap = 1.0 - params.lambda;
    switch (kind) {
        case BoundKind::HighDim:
            if (params.d < 1) throw Error(ErrorCode::OutOfRange, "d must be at least 1");
            return params.radius * std::sqrt(static_cast<double>(params.d)) / (gap * std::sqrt(n));
        case BoundKind::ScalarHalfUnit: return 1.0 / (gap * std::sqrt(n));
        case BoundKind::DistinctInt: return 1.0 / (gap * gap * gap * n * std::sqrt(n));
        case BoundKind::Prg: return 1.0 / std::sqrt(n);
    }
    return 0.0;
}

double theorem_bound(BoundKind kind, const BoundParams& params, const ConstantSet& constants) {
    const double shape = bound_shape(kind, params);
    if (kind == BoundKind::HighDim) {
        const double threshold =
            1.0 / (constants.value(constant_names::coord) * std::sqrt(static_cast<double>(params.d)));
        if (params.radius < threshold) {
            throw Error(ErrorCode::HypothesisViolated, "radius " + std::to_string(params.radius) +
                                                           " is below the required " + std::to_string(threshold));
        }
    }
    return constants.value(bound_constant(kind)) * shape;
}

FittedConstant fit_constant(const std::vector<std::pair<double, double>>& instances, const std::string& name,
                            const std::string& family, const std::string& grid) {
    if (instances.empty()) throw Error(ErrorCode::EmptyFamily, "cannot fit " + name + " over an empty family");
    double best = 0.0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto [prob, formula] = instances[i];
        if (!(formula > 0.0)) {
            throw Error(ErrorCode::PreconditionViolated,
                        "instance " + std::to_string(i) + " has non-positive formula value");
        }
        best = std::max(best, prob / formula);
    }
    return {name, best, family, grid};
}

double round_up_significant(double x, int digits) {
    if (!(x > 0.0) || !std::isfinite(x)) return x;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, x);
    double y = std::strtod(buf, nullptr);
    if (y >= x) return y;
    const int exponent = static_cast<int>(std::floor(std::log10(y)));
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, y + std::pow(10.0, exponent - digits + 1));
    return std::strtod(buf, nullptr);
}

// ---------------------------------------------------------------------------
// Reports

BoundReport BoundReport::make(std::string id, const BoundParams& params, double probability, double bound) {
    if (id.find_first_of(",\n\"") != std::string::npos) {
        throw Error(ErrorCode::ConfigError, "instance id '" + id + "' contains a CSV delimiter");
    }
    BoundReport r;
    r.instance_id = std::move(id);
    r.n = params.n;
    r.d = params.d;
    r.lambda = params.lambda;
    r.radius = params.radius;
    r.probability = probability;
    r.bound = bound;
    r.ratio = bound > 0.0 ? probability / bound : (probability > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    r.pass = r.ratio <= 1.0;
    return r;
}

void write_reports_csv(std::ostream& out, const std::vector<BoundReport>& reports) {
    out << "instance_id,n,d,lambda,R,prob,bound,ratio,pass\n";
    for (const auto& r : reports) {
        out << r.instance_id << ',' << r.n << ',' << r.d << ',' << text::format_double(r.lambda) << ','
            << text::format_double(r.radius) << ',' << text::format_double(r.probability) << ','
            << text::format_double(r.bound) << ',' << text::format_double(r.ratio) << ','
            << (r.pass ? "true" : "false") << '\n';
    }
}

std::vector<BoundReport> read_reports_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "instance_id,n,d,lambda,R,prob,bound,ratio,pass") {
        throw Error(ErrorCode::ParseError, "report CSV: unexpected header");
    }
    std::vector<BoundReport> out;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto f = text::split(line, ',');
        const std::string where = "report CSV row " + std::to_string(row);
        if (f.size() != 9) throw Error(ErrorCode::ParseError, where + ": expected 9 fields");
        BoundReport r;
        r.instance_id = std::string(f[0]);
        r.n = static_cast<std::size_t>(text::parse_int(f[1], where + " n"));
        r.d = static_cast<std::size_t>(text::parse_int(f[2], where + " d"));
        r.lambda = text::parse_double(f[3], where + " lambda");
        r.radius = text::parse_double(f[4], where + " R");
        r.probability = text::parse_double(f[5], where + " prob");
        r.bound = text::parse_double(f[6], where + " bound");
        r.ratio = text::parse_double(f[7], where + " ratio");
        if (f[8] == "true") {
            r.pass = true;
        } else if (f[8] == "false") {
            r.pass = false;
        } else {
            throw Error(ErrorCode::ParseError, where + ": pass must be true or false");
        }
        if (r.pass != (r.ratio <= 1.0)) throw Error(ErrorCode::ParseError, where + ": pass flag disagrees with ratio");
        out.push_back(std::move(r));
    }
    return out;
}

bool all_pass(const std::vector<BoundReport>& reports) {
    return std::all_of(reports.begin(), reports.end(), [](const BoundReport& r) { return r.pass; });
}

}  // namespace smallball
