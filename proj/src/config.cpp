#include "tube/config.hpp"

#include <algorithm>
#include <charconv>
#include <numbers>
#include <fstream>
#include <sstream>

#include <toml.hpp>

#include "tube/errors.hpp"

namespace tube {

namespace {

class Reader {
public:
    Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const toml::node* node, std::string_view field, std::string_view problem) const {
        std::ostringstream msg;
        msg << source_;
        if (node && node->source().begin.line > 0) msg << ':' << node->source().begin.line;
        msg << ": " << field << ": " << problem;
        throw ConfigError(msg.str());
    }

    double number(const toml::table& t, std::string_view key, std::string_view field, std::optional<double> fallback) const {
        const toml::node* node = t.get(key);
        if (!node) {
            if (fallback) return *fallback;
            fail(&t, field, "missing");
        }
        if (auto v = node->value<double>()) return *v;
        fail(node, field, "expected a number");
    }

    std::int64_t integer(const toml::table& t, std::string_view key, std::string_view field,
                         std::optional<std::int64_t> fallback) const {
        const toml::node* node = t.get(key);
        if (!node) {
            if (fallback) return *fallback;
            fail(&t, field, "missing");
        }
        if (!node->is_integer()) fail(node, field, "expected an integer");
        return node->as_integer()->get();
    }

    std::string string(const toml::table& t, std::string_view key, std::string_view field,
                       std::optional<std::string> fallback) const {
        const toml::node* node = t.get(key);
        if (!node) {
            if (fallback) return *fallback;
            fail(&t, field, "missing");
        }
        if (!node->is_string()) fail(node, field, "expected a string");
        return node->as_string()->get();
    }

    bool boolean(const toml::table& t, std::string_view key, std::string_view field, bool fallback) const {
        const toml::node* node = t.get(key);
        if (!node) return fallback;
        if (!node->is_boolean()) fail(node, field, "expected true or false");
        return node->as_boolean()->get();
    }

    std::vector<double> numbers(const toml::table& t, std::string_view key, std::string_view field) const {
        const toml::node* node = t.get(key);
        if (!node) fail(&t, field, "missing");
        std::vector<double> out;
        if (auto v = node->value<double>()) return {*v};
        const toml::array* arr = node->as_array();
        if (!arr) fail(node, field, "expected a number or a list of numbers");
        for (const auto& item : *arr) {
            auto v = item.value<double>();
            if (!v) fail(&item, field, "expected a number");
            out.push_back(*v);
        }
        return out;
    }

    std::vector<std::int64_t> integers(const toml::table& t, std::string_view key, std::string_view field) const {
        const toml::node* node = t.get(key);
        if (!node) fail(&t, field, "missing");
        if (node->is_integer()) return {node->as_integer()->get()};
        const toml::array* arr = node->as_array();
        if (!arr) fail(node, field, "expected an integer or a list of integers");
        std::vector<std::int64_t> out;
        for (const auto& item : *arr) {
            if (!item.is_integer()) fail(&item, field, "expected an integer");
            out.push_back(item.as_integer()->get());
        }
        return out;
    }

    const toml::table* table(const toml::table& t, std::string_view key, std::string_view field) const {
        const toml::node* node = t.get(key);
        if (!node) return nullptr;
        if (!node->is_table()) fail(node, field, "expected a table");
        return node->as_table();
    }

    const std::string& source() const { return source_; }

private:
    std::string source_;
};

std::vector<std::pair<double, double>> read_samples(const Reader& r, const toml::table& t, const std::string& field,
                                                    const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) r.fail(t.get("file"), field + ".file", "cannot open " + file.string());
    std::vector<std::pair<double, double>> rows;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        double s = 0.0, k = 0.0;
        auto parse = [](std::string_view text, double& out) {
            while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
            while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
            auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
            return ec == std::errc() && ptr == text.data() + text.size();
        };
        if (comma == std::string::npos || !parse(std::string_view(line).substr(0, comma), s) ||
            !parse(std::string_view(line).substr(comma + 1), k)) {
            // A header line is allowed before the first sample.
            if (rows.empty()) continue;
            r.fail(t.get("file"), field + ".file", file.string() + ":" + std::to_string(number) + ": expected 's,kappa'");
        }
        rows.emplace_back(s, k);
    }
    return rows;
}

CurvatureProfile read_profile(const Reader& r, const toml::table& t, const std::string& field,
                              const std::filesystem::path& base_dir) {
    const std::string kind = r.string(t, "kind", field + ".kind", "constant");
    if (kind == "constant") return CurvatureProfile::constant(r.number(t, "value", field + ".value", 0.0));
    if (kind == "sine")
        return CurvatureProfile::sine(r.number(t, "amplitude", field + ".amplitude", std::nullopt),
                                      r.number(t, "frequency", field + ".frequency", 1.0),
                                      r.number(t, "phase", field + ".phase", 0.0));
    if (kind == "bump")
        return CurvatureProfile::bump(r.number(t, "amplitude", field + ".amplitude", std::nullopt),
                                      r.number(t, "center", field + ".center", std::nullopt),
                                      r.number(t, "half_width", field + ".half_width", std::nullopt));
    if (kind == "sampled") {
        std::filesystem::path file = r.string(t, "file", field + ".file", std::nullopt);
        if (file.is_relative()) file = base_dir / file;
        const auto rows = read_samples(r, t, field, file);
        std::vector<double> s, k;
        for (const auto& [a, b] : rows) {
            s.push_back(a);
            k.push_back(b);
        }
        try {
            return CurvatureProfile::sampled(s, k);
        } catch (const Error& e) {
            r.fail(t.get("file"), field + ".file", e.what());
        }
    }
    r.fail(t.get("kind"), field + ".kind", "unknown profile '" + kind + "' (constant, sine, bump, sampled)");
}

GaussCurvature read_gauss(const Reader& r, const toml::table& t) {
    const std::string kind = r.string(t, "kind", "surface.gauss.kind", "constant");
    if (kind == "constant") return GaussCurvature::constant(r.number(t, "value", "surface.gauss.value", 0.0));
    if (kind == "cosine")
        return GaussCurvature::cosine(r.number(t, "amplitude", "surface.gauss.amplitude", std::nullopt),
                                      r.number(t, "frequency", "surface.gauss.frequency", 1.0),
                                      r.number(t, "phase", "surface.gauss.phase", 0.0));
    if (kind == "product")
        return GaussCurvature::product(r.number(t, "amplitude", "surface.gauss.amplitude", std::nullopt),
                                       r.number(t, "frequency", "surface.gauss.frequency", 1.0),
                                       r.number(t, "slope", "surface.gauss.slope", 0.0));
    r.fail(t.get("kind"), "surface.gauss.kind", "unknown preset '" + kind + "' (constant, cosine, product)");
}

std::size_t positive_count(const Reader& r, const toml::table& t, std::int64_t v, std::string_view field) {
    if (v < 0) r.fail(&t, field, "must be non-negative");
    return static_cast<std::size_t>(v);
}

RunConfig build(const toml::table& root, const Reader& r, const std::filesystem::path& base_dir) {
    RunConfig cfg;
    cfg.mode = r.string(root, "mode", "mode", "sweep");
    SweepConfig& sc = cfg.sweep;

    const toml::table* surface = r.table(root, "surface", "surface");
    const toml::table* curve = r.table(root, "curve", "curve");
    if (surface && curve) r.fail(surface, "surface", "give either [curve] or [surface], not both");

    if (const toml::table* cs = r.table(root, "cross_section", "cross_section")) {
        const std::string kind = r.string(*cs, "kind", "cross_section.kind", "interval");
        if (kind == "interval") {
            const double hw = r.number(*cs, "half_width", "cross_section.half_width", 1.0);
            if (!(hw > 0.0)) r.fail(cs->get("half_width"), "cross_section.half_width", "must be positive");
            sc.omega = CrossSection::interval(hw);
        } else if (kind == "rectangle") {
            const auto sides = r.numbers(*cs, "sides", "cross_section.sides");
            for (double s : sides)
                if (!(s > 0.0)) r.fail(cs->get("sides"), "cross_section.sides", "sides must be positive");
            sc.omega = CrossSection::rectangle(sides);
        } else {
            r.fail(cs->get("kind"), "cross_section.kind", "unknown cross-section '" + kind + "' (interval, rectangle)");
        }
    }

    if (surface) {
        sc.kind = GeometryKind::Surface;
        SurfaceStripSpec spec;
        spec.length = r.number(*surface, "length", "surface.length", std::nullopt);
        if (!(spec.length > 0.0)) r.fail(surface->get("length"), "surface.length", "must be positive");
        if (const toml::table* k = r.table(*surface, "kappa", "surface.kappa"))
            spec.kappa = read_profile(r, *k, "surface.kappa", base_dir);
        if (const toml::table* g = r.table(*surface, "gauss", "surface.gauss")) spec.gauss = read_gauss(r, *g);
        sc.surface = spec;
    } else {
        const toml::table empty;
        const toml::table& c = curve ? *curve : empty;
        const std::int64_t dim = r.integer(c, "dim", "curve.dim", 2);
        if (dim < 2) r.fail(c.get("dim"), "curve.dim", "must be at least 2");
        const double length = r.number(c, "length", "curve.length", std::numbers::pi);
        if (!(length > 0.0)) r.fail(c.get("length"), "curve.length", "must be positive");
        CurvatureProfile kappa1 = read_profile(r, c, "curve", base_dir);
        std::vector<CurvatureProfile> higher;
        if (const toml::node* h = c.get("higher")) {
            const toml::array* arr = h->as_array();
            if (!arr) r.fail(h, "curve.higher", "expected an array of tables");
            std::size_t i = 2;
            for (const auto& item : *arr) {
                if (!item.is_table()) r.fail(&item, "curve.higher", "expected a table");
                higher.push_back(read_profile(r, *item.as_table(), "curve.higher[" + std::to_string(i++) + "]", base_dir));
            }
        }
        if (higher.size() + 2 != static_cast<std::size_t>(dim))
            r.fail(&c, "curve.higher", "dim = " + std::to_string(dim) + " needs " + std::to_string(dim - 2) +
                                            " [[curve.higher]] entries, found " + std::to_string(higher.size()));
        std::optional<double> c_gamma;
        if (c.get("c_gamma")) c_gamma = r.number(c, "c_gamma", "curve.c_gamma", std::nullopt);
        try {
            sc.curve.emplace(static_cast<std::size_t>(dim), length, std::move(kappa1), std::move(higher), c_gamma);
        } catch (const Error& e) {
            r.fail(&c, "curve", e.what());
        }
    }

    if (const toml::table* sw = r.table(root, "sweep", "sweep")) {
        if (sw->get("eps")) sc.eps = r.numbers(*sw, "eps", "sweep.eps");
        const std::int64_t n = r.integer(*sw, "n", "sweep.n", 3);
        if (n < 1) r.fail(sw->get("n"), "sweep.n", "must be at least 1");
        sc.n = static_cast<std::size_t>(n);
    }
    if (const toml::table* g = r.table(root, "grid", "grid")) {
        sc.s_nodes = positive_count(r, *g, r.integer(*g, "s_nodes", "grid.s_nodes", 400), "grid.s_nodes");
        if (g->get("t_nodes")) {
            sc.t_nodes.clear();
            for (std::int64_t v : r.integers(*g, "t_nodes", "grid.t_nodes"))
                sc.t_nodes.push_back(positive_count(r, *g, v, "grid.t_nodes"));
        }
    }
    if (const toml::table* s = r.table(root, "solver", "solver")) {
        sc.solver.tol = r.number(*s, "tol", "solver.tol", 1e-9);
        if (!(sc.solver.tol > 0.0)) r.fail(s->get("tol"), "solver.tol", "must be positive");
        const std::int64_t seed = r.integer(*s, "seed", "solver.seed", static_cast<std::int64_t>(sc.solver.seed));
        if (seed < 0) r.fail(s->get("seed"), "solver.seed", "must be non-negative");
        sc.solver.seed = static_cast<std::uint64_t>(seed);
    }
    if (const toml::table* o = r.table(root, "output", "output")) {
        cfg.output.dir = r.string(*o, "dir", "output.dir", "out");
        cfg.output.export_matrices = r.boolean(*o, "export_matrices", "output.export_matrices", false);
        sc.compute_floor = r.boolean(*o, "floor", "output.floor", true);
        sc.check_bracket = r.boolean(*o, "bracket", "output.bracket", true);
    }
    return cfg;
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir, std::string_view source_name) {
    const Reader reader{std::string(source_name)};
    toml::table root;
    try {
        root = toml::parse(text, source_name);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << source_name << ':' << e.source().begin.line << ": syntax: " << e.description();
        throw ConfigError(msg.str());
    }
    return build(root, reader, base_dir);
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open config file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.parent_path().empty() ? "." : path.parent_path(), path.string());
}

void validate_run_config(const RunConfig& config) {
    const SweepConfig& sc = config.sweep;
    static const std::vector<std::string> modes{"spectrum", "sweep", "nodal", "validate"};
    if (std::find(modes.begin(), modes.end(), config.mode) == modes.end())
        throw ConfigError("mode: unknown mode '" + config.mode + "' (spectrum, sweep, nodal, validate)");
    if (config.mode == "validate") return;
    if (sc.eps.empty()) throw ConfigError("sweep.eps: at least one value is required");
    for (std::size_t i = 0; i < sc.eps.size(); ++i) {
        if (!(sc.eps[i] > 0.0)) throw ConfigError("sweep.eps: values must be positive");
        if (i > 0 && !(sc.eps[i] < sc.eps[i - 1])) throw ConfigError("sweep.eps: values must be strictly decreasing");
    }
    if (sc.n < 1) throw ConfigError("sweep.n: must be at least 1");
    if (sc.s_nodes < 8) throw ConfigError("grid.s_nodes: at least 8 nodes are required");
    for (std::size_t m : sc.t_nodes)
        if (m < 8) throw ConfigError("grid.t_nodes: at least 8 nodes per transverse axis are required");
    const std::size_t td = sc.omega.transverse_dims();
    if (sc.t_nodes.size() != 1 && sc.t_nodes.size() != td)
        throw ConfigError("grid.t_nodes: give one count or one per transverse axis (" + std::to_string(td) + ")");
    if (sc.kind == GeometryKind::Tube && sc.curve && sc.curve->dim() != td + 1)
        throw ConfigError("cross_section: " + std::to_string(td) + " transverse axes do not match curve.dim = " +
                          std::to_string(sc.curve->dim()));
    if (sc.kind == GeometryKind::Surface &&
        (sc.omega.kind() != CrossSection::Kind::Interval || sc.omega.sides().front() != 2.0))
        throw ConfigError("cross_section: surface strips use the interval (-1, 1)");
    if (config.mode == "sweep" && sc.eps.size() < 3) throw ConfigError("sweep.eps: a sweep needs at least three values");
}

std::vector<double> parse_eps_list(std::string_view text) {
    std::vector<double> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        std::string_view item = text.substr(0, comma);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || ptr != item.data() + item.size() || !(v > 0.0))
            throw ConfigError("--eps: '" + std::string(item) + "' is not a positive number");
        out.push_back(v);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    if (out.empty()) throw ConfigError("--eps: empty list");
    return out;
}

}  // namespace tube
