#pragma once

// Analytic bounds: Esseen quadrature, the cosine-product integral, binomial
// negative moments, the theorem-level formulas, and the fitted constants they
// depend on.

#include "smallball/chain.hpp"
#include "smallball/kernels.hpp"
#include "smallball/quadrature.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace smallball {

/// A numerically certified stand-in for an unspecified universal constant:
/// the supremum of probability / formula over a recorded instance family.
struct FittedConstant {
    std::string name;
    double value = 0.0;
    std::string family;
    /// Grid parameters of the fit, as a JSON object serialized to text.
    std::string grid = "{}";
};

/// Named constants. Lookup of a missing name throws ConfigError.
class ConstantSet {
public:
    ConstantSet() = default;
    explicit ConstantSet(std::vector<FittedConstant> constants);

    /// Every constant set to `value`; handy for checking raw formulas.
    static ConstantSet uniform(double value);

    [[nodiscard]] const FittedConstant& get(const std::string& name) const;
    [[nodiscard]] double value(const std::string& name) const { return get(name).value; }
    [[nodiscard]] bool contains(const std::string& name) const { return constants_.count(name) != 0; }
    void set(FittedConstant c);
    [[nodiscard]] std::vector<FittedConstant> all() const;

    static ConstantSet load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
    [[nodiscard]] std::string to_json() const;
    static ConstantSet from_json(const std::string& text);

private:
    std::map<std::string, FittedConstant> constants_;
};

namespace constant_names {
inline constexpr const char* equal = "C_equal";
inline constexpr const char* diff = "C_diff";
inline constexpr const char* prg = "C_prg";
inline constexpr const char* esseen = "C_esseen";
inline constexpr const char* cosine = "C_cos";
inline constexpr const char* coord = "C_coord";
inline constexpr const char* prg_size = "C_1";
}  // namespace constant_names

// ---------------------------------------------------------------------------

/// prefactor * (R / sqrt(d) + sqrt(d) / eps)^d * integral_{|xi| <= eps} |phi(xi)|.
/// Only d = 1 is supported (UnsupportedDimension otherwise).
double esseen_bound(const std::function<double(double)>& charfn_modulus, std::size_t dimension, double radius,
                    double eps, double prefactor, const QuadratureOptions& options = {});

/// integral_{-eps}^{eps} |E exp(2 pi i xi S)| for the chain sum with the given
/// step values. Panels are refined in proportion to the largest possible sum.
double charfn_modulus_integral(const MarkovChain& chain, const Matrix& values, double eps = 1.0);

/// integral_{-1}^{1} prod_j |cos(2 pi xi v_j)|; requires |v_j| >= 1.
double cosine_product_integral(const std::vector<double>& weights);

struct NegativeMoment {
    double exact = 0.0;
    double bound = 0.0;
};

/// E[1 / (X + 1)^d] for X ~ Binomial(n, p), together with d^d / (n p)^d.
NegativeMoment binomial_negative_moment(unsigned n, double p, unsigned d);

enum class BoundKind { HighDim, ScalarHalfUnit, DistinctInt, Prg };

BoundKind parse_bound_kind(const std::string& text);
std::string to_string(BoundKind kind);

struct BoundParams {
    std::size_t n = 1;
    std::size_t d = 1;
    double lambda = 0.0;
    double radius = 1.0;
};

/// The formula with its constant set to 1.
double bound_shape(BoundKind kind, const BoundParams& params);

/// Name of the constant a bound kind uses.
const char* bound_constant(BoundKind kind);

/// Constant times shape. The high-dimensional bound also checks its radius
/// hypothesis R >= 1 / (C_coord sqrt(d)).
double theorem_bound(BoundKind kind, const BoundParams& params, const ConstantSet& constants);

/// max of probability / formula over the instances.
FittedConstant fit_constant(const std::vector<std::pair<double, double>>& instances, const std::string& name = "C",
                            const std::string& family = "", const std::string& grid = "{}");

/// Smallest number with `digits` significant digits that is >= x.
double round_up_significant(double x, int digits = 6);

// ---------------------------------------------------------------------------

struct BoundReport {
    std::string instance_id;
    std::size_t n = 0;
    std::size_t d = 1;
    double lambda = 0.0;
    double radius = 0.0;
    double probability = 0.0;
    double bound = 0.0;
    double ratio = 0.0;
    bool pass = false;

    static BoundReport make(std::string id, const BoundParams& params, double probability, double bound);
};

void write_reports_csv(std::ostream& out, const std::vector<BoundReport>& reports);
/// Parses the CSV written above; ParseError on malformed rows or on pass flags
/// that disagree with their ratio.
std::vector<BoundReport> read_reports_csv(std::istream& in);
bool all_pass(const std::vector<BoundReport>& reports);

}  // namespace smallball
