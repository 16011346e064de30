#include "smallball/io.hpp"

#include "smallball/error.hpp"
#include "text.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace smallball::io {

using nlohmann::json;

namespace {

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, what + ": " + e.what());
    }
}

[[noreturn]] void fail(const std::string& what, const std::string& path, const std::string& msg) {
    throw Error(ErrorCode::ParseError, what + ": " + path + " " + msg);
}

const json& field(const json& obj, const char* name, const std::string& what) {
    const auto it = obj.find(name);
    if (it == obj.end()) fail(what, std::string("$.") + name, "is missing");
    return *it;
}

double number_at(const json& v, const std::string& what, const std::string& path) {
    if (!v.is_number()) fail(what, path, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(what, path, "must be finite");
    return x;
}

std::int64_t integer_at(const json& v, const std::string& what, const std::string& path) {
    if (!v.is_number_integer()) fail(what, path, "must be an integer");
    return v.get<std::int64_t>();
}

std::vector<double> number_row(const json& v, const std::string& what, const std::string& path,
                               std::optional<std::size_t> length) {
    if (!v.is_array()) fail(what, path, "must be an array");
    if (length && v.size() != *length) {
        fail(what, path, "must have " + std::to_string(*length) + " entries, found " + std::to_string(v.size()));
    }
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number_at(v[i], what, path + "[" + std::to_string(i) + "]"));
    return out;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::ConfigError, "failed writing " + path.string());
}

// ---------------------------------------------------------------------------

ChainDocument parse_chain(const std::string& text) {
    const std::string what = "chain";
    const json doc = parse_json(text, what);
    if (!doc.is_object()) fail(what, "$", "must be an object");
    const std::int64_t n = integer_at(field(doc, "n_states", what), what, "$.n_states");
    if (n < 1) fail(what, "$.n_states", "must be positive");
    const auto un = static_cast<std::size_t>(n);

    const json& rows = field(doc, "transition", what);
    if (!rows.is_array() || rows.size() != un) fail(what, "$.transition", "must be an array of n_states rows");
    Matrix a(n, n);
    for (std::size_t i = 0; i < un; ++i) {
        const auto row = number_row(rows[i], what, "$.transition[" + std::to_string(i) + "]", un);
        for (std::size_t j = 0; j < un; ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
    std::optional<Vector> mu;
    if (const auto it = doc.find("stationary"); it != doc.end()) {
        const auto row = number_row(*it, what, "$.stationary", un);
        mu = Eigen::Map<const Vector>(row.data(), n);
    }
    ChainDocument out{validate_chain(a, mu), std::nullopt};
    if (const auto it = doc.find("signs"); it != doc.end()) {
        if (!it->is_array()) fail(what, "$.signs", "must be an array of rows");
        std::vector<std::vector<int>> signs;
        for (std::size_t j = 0; j < it->size(); ++j) {
            const std::string path = "$.signs[" + std::to_string(j) + "]";
            const json& row = (*it)[j];
            if (!row.is_array() || row.size() != un) fail(what, path, "must have n_states entries");
            std::vector<int> r;
            for (std::size_t y = 0; y < un; ++y) {
                const std::int64_t s = integer_at(row[y], what, path + "[" + std::to_string(y) + "]");
                if (s != 1 && s != -1) fail(what, path + "[" + std::to_string(y) + "]", "must be +1 or -1");
                r.push_back(static_cast<int>(s));
            }
            signs.push_back(std::move(r));
        }
        out.signs = std::move(signs);
    }
    return out;
}

ChainDocument load_chain(const std::filesystem::path& path) { return parse_chain(read_file(path)); }

std::string chain_to_json(const MarkovChain& chain, const std::vector<std::vector<int>>* signs) {
    const auto n = static_cast<Eigen::Index>(chain.n_states());
    json doc;
    doc["n_states"] = n;
    json rows = json::array();
    for (Eigen::Index i = 0; i < n; ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < n; ++j) row.push_back(chain.transition()(i, j));
        rows.push_back(std::move(row));
    }
    doc["transition"] = std::move(rows);
    json mu = json::array();
    for (Eigen::Index i = 0; i < n; ++i) mu.push_back(chain.stationary()(i));
    doc["stationary"] = std::move(mu);
    if (signs != nullptr) doc["signs"] = *signs;
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

WeightSystem parse_weights(const std::string& text, WeightVariant variant) {
    const std::string what = "weights";
    const json doc = parse_json(text, what);
    if (!doc.is_array()) fail(what, "$", "must be an array");
    if (doc.empty()) return WeightSystem(1, {}, variant);
    if (doc[0].is_array()) {
        const std::size_t d = doc[0].size();
        if (d == 0) fail(what, "$[0]", "must not be empty");
        std::vector<double> flat;
        for (std::size_t i = 0; i < doc.size(); ++i) {
            const auto row = number_row(doc[i], what, "$[" + std::to_string(i) + "]", d);
            flat.insert(flat.end(), row.begin(), row.end());
        }
        return WeightSystem(d, std::move(flat), variant);
    }
    return WeightSystem(1, number_row(doc, what, "$", std::nullopt), variant);
}

WeightSystem load_weights(const std::filesystem::path& path, WeightVariant variant) {
    return parse_weights(read_file(path), variant);
}

std::string weights_to_json(const WeightSystem& weights) {
    json doc = json::array();
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights.dimension() == 1) {
            doc.push_back(weights.at(i, 0));
        } else {
            const auto v = weights.vector(i);
            doc.push_back(std::vector<double>(v.begin(), v.end()));
        }
    }
    return doc.dump() + "\n";
}

// ---------------------------------------------------------------------------

void write_distribution_csv(std::ostream& out, const SumDistribution& dist) {
    out << "sum,probability\n";
    for (std::size_t i = 0; i < dist.masses.size(); ++i) {
        out << dist.offset + static_cast<std::int64_t>(i) << ',' << text::format_double(dist.masses[i]) << '\n';
    }
}

std::string distribution_to_csv(const SumDistribution& dist) {
    std::ostringstream ss;
    write_distribution_csv(ss, dist);
    return ss.str();
}

SumDistribution parse_distribution_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != "sum,probability") {
        throw Error(ErrorCode::ParseError, "distribution CSV: expected header sum,probability");
    }
    SumDistribution out;
    std::size_t line_no = 1;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = "distribution CSV line " + std::to_string(line_no);
        const auto f = text::split(line, ',');
        if (f.size() != 2) throw Error(ErrorCode::ParseError, where + ": expected 2 fields");
        const std::int64_t s = text::parse_int(f[0], where);
        const double p = text::parse_double(f[1], where);
        if (first) {
            out.offset = s;
            first = false;
        }
        if (s != out.offset + static_cast<std::int64_t>(out.masses.size())) {
            throw Error(ErrorCode::ParseError, where + ": sums must be consecutive");
        }
        out.masses.push_back(p);
    }
    out.span = std::max(std::abs(out.lowest()), std::abs(out.highest()));
    return out;
}

// ---------------------------------------------------------------------------

std::string graph_to_json(const ExpanderGraph& graph) {
    json doc;
    doc["k"] = graph.k();
    doc["degree"] = graph.degree();
    json rows = json::array();
    for (std::size_t v = 0; v < graph.vertices(); ++v) {
        json row = json::array();
        for (std::size_t e = 0; e < graph.degree(); ++e) row.push_back(graph.neighbor(v, e));
        rows.push_back(std::move(row));
    }
    doc["neighbors"] = std::move(rows);
    if (graph.certified_lambda()) doc["certified_lambda"] = *graph.certified_lambda();
    return doc.dump() + "\n";
}

ExpanderGraph parse_graph(const std::string& text) {
    const std::string what = "graph";
    const json doc = parse_json(text, what);
    if (!doc.is_object()) fail(what, "$", "must be an object");
    const std::int64_t k = integer_at(field(doc, "k", what), what, "$.k");
    const std::int64_t degree = integer_at(field(doc, "degree", what), what, "$.degree");
    if (k < 0 || k > 24) fail(what, "$.k", "must lie in [0, 24]");
    if (degree < 1) fail(what, "$.degree", "must be positive");
    const std::size_t vertices = std::size_t{1} << k;
    const json& rows = field(doc, "neighbors", what);
    if (!rows.is_array() || rows.size() != vertices) fail(what, "$.neighbors", "must have 2^k rows");
    std::vector<std::uint32_t> flat;
    flat.reserve(vertices * static_cast<std::size_t>(degree));
    for (std::size_t v = 0; v < vertices; ++v) {
        const std::string path = "$.neighbors[" + std::to_string(v) + "]";
        const json& row = rows[v];
        if (!row.is_array() || row.size() != static_cast<std::size_t>(degree)) fail(what, path, "must have degree entries");
        for (std::size_t e = 0; e < row.size(); ++e) {
            const std::int64_t w = integer_at(row[e], what, path + "[" + std::to_string(e) + "]");
            if (w < 0 || static_cast<std::size_t>(w) >= vertices) {
                fail(what, path + "[" + std::to_string(e) + "]", "is not a vertex");
            }
            flat.push_back(static_cast<std::uint32_t>(w));
        }
    }
    ExpanderGraph graph(vertices, static_cast<std::size_t>(degree), std::move(flat));
    if (const auto it = doc.find("certified_lambda"); it != doc.end()) {
        graph.set_certified_lambda(number_at(*it, what, "$.certified_lambda"));
    }
    return graph;
}

ExpanderGraph load_graph(const std::filesystem::path& path) { return parse_graph(read_file(path)); }

}  // namespace smallball::io
