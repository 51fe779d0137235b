#include "paintmo/config.hpp"

#include <fstream>
#include <set>

#include "paintmo/error.hpp"

namespace paintmo {

namespace {

using nlohmann::json;

// Reads known keys from one JSON object and rejects the rest.
class Section {
public:
    Section(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
        if (!doc_.is_object()) throw Error(ErrorKind::schema, "config: '" + path_ + "' must be an object");
    }
    ~Section() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto& [key, value] : doc_.items()) {
            if (!seen_.count(key)) throw Error(ErrorKind::schema, "config: unknown key '" + path_ + key + "'");
        }
    }

    template <class T>
    void read(const char* key, T& target) {
        seen_.insert(key);
        if (!doc_.contains(key)) return;
        try {
            target = doc_.at(key).get<T>();
        } catch (const json::exception&) {
            throw Error(ErrorKind::schema, "config: '" + path_ + key + "' has the wrong type");
        }
    }

    template <class F>
    void nested(const char* key, F&& f) {
        seen_.insert(key);
        if (!doc_.contains(key)) return;
        Section sub(doc_.at(key), path_ + key + ".");
        f(sub);
    }

private:
    const json& doc_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_crs(Section& s, CrsOptions& o) {
    s.read("population", o.population);
    s.read("max_evals", o.max_evals);
    s.read("tol", o.tol);
    s.read("seed", o.seed);
    s.read("threads", o.threads);
}

void read_local(Section& s, LocalImproveOptions& o) {
    s.read("max_iterations", o.max_iterations);
    s.read("step_fraction", o.step_fraction);
    s.read("max_backtracks", o.max_backtracks);
}

json crs_json(const CrsOptions& o) {
    return {{"population", o.population}, {"max_evals", o.max_evals}, {"tol", o.tol},
            {"seed", o.seed}, {"threads", o.threads}};
}

json local_json(const LocalImproveOptions& o) {
    return {{"max_iterations", o.max_iterations}, {"step_fraction", o.step_fraction},
            {"max_backtracks", o.max_backtracks}};
}

} // namespace

Config config_from_json(const json& doc) {
    Config c;
    Section root(doc, "");
    root.nested("paint", [&](Section& s) {
        s.read("gap_tol", c.paint.gap_tol);
        s.read("dominance_tol", c.paint.dominance_tol);
        s.read("range_delta", c.paint.range_delta);
        s.read("threads", c.paint.threads);
        s.nested("triangulation", [&](Section& t) {
            t.read("joggle", c.paint.triangulation.joggle);
            t.read("dedup", c.paint.triangulation.dedup);
            t.read("coplanar_tol", c.paint.triangulation.coplanar_tol);
            t.read("seed", c.paint.triangulation.seed);
            t.read("max_joggle_attempts", c.paint.triangulation.max_joggle_attempts);
        });
    });
    root.nested("surrogate", [&](Section& s) {
        s.read("rho", c.rho);
        s.read("threads", c.solve.threads);
    });
    root.nested("projection", [&](Section& s) {
        s.nested("crs", [&](Section& t) { read_crs(t, c.projection.crs); });
        s.nested("local", [&](Section& t) { read_local(t, c.projection.local); });
    });
    root.nested("generate", [&](Section& s) {
        s.read("count", c.generate_count);
        s.read("pilot_samples", c.generate.pilot_samples);
        s.read("improve", c.generate.improve);
        s.read("filter_tol", c.generate.filter_tol);
        s.read("seed", c.generate.seed);
        s.nested("crs", [&](Section& t) { read_crs(t, c.generate.crs); });
        s.nested("local", [&](Section& t) { read_local(t, c.generate.local); });
    });
    require(c.rho >= 0.0, "config: rho must be nonnegative");
    c.projection.rho = c.rho;
    c.generate.rho = c.rho;
    return c;
}

json config_to_json(const Config& c) {
    const auto& t = c.paint.triangulation;
    return {
        {"paint",
         {{"gap_tol", c.paint.gap_tol},
          {"dominance_tol", c.paint.dominance_tol},
          {"range_delta", c.paint.range_delta},
          {"threads", c.paint.threads},
          {"triangulation",
           {{"joggle", t.joggle},
            {"dedup", t.dedup},
            {"coplanar_tol", t.coplanar_tol},
            {"seed", t.seed},
            {"max_joggle_attempts", t.max_joggle_attempts}}}}},
        {"surrogate", {{"rho", c.rho}, {"threads", c.solve.threads}}},
        {"projection", {{"crs", crs_json(c.projection.crs)}, {"local", local_json(c.projection.local)}}},
        {"generate",
         {{"count", c.generate_count},
          {"pilot_samples", c.generate.pilot_samples},
          {"improve", c.generate.improve},
          {"filter_tol", c.generate.filter_tol},
          {"seed", c.generate.seed},
          {"crs", crs_json(c.generate.crs)},
          {"local", local_json(c.generate.local)}}},
    };
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open config file '" + path + "'");
    try {
        return config_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::parse, "config '" + path + "': " + e.what());
    }
}

void apply_seed(Config& config, std::uint64_t seed) {
    config.generate.seed = seed;
    config.generate.crs.seed = seed;
    config.projection.crs.seed = seed;
    config.paint.triangulation.seed = seed;
}

} // namespace paintmo
