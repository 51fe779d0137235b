#include "paintmo/outcomes.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "paintmo/error.hpp"

namespace paintmo {

namespace {

std::string trim(std::string_view s) {
    auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(trim(cell));
            cell.clear();
        } else {
            cell.push_back(c);
        }
    }
    cells.push_back(trim(cell));
    return cells;
}

double parse_number(const std::string& text, std::size_t line) {
    // inf/nan parse fine here and are reported as data errors below.
    const char* begin = text.c_str();
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(begin, &end);
    if (text.empty() || end != begin + text.size()) {
        throw Error(ErrorKind::parse,
                    "row " + std::to_string(line) + ": '" + text + "' is not a number");
    }
    if (!std::isfinite(value)) {
        throw Error(ErrorKind::data,
                    "row " + std::to_string(line) + ": non-finite value '" + text + "'");
    }
    return value;
}

OutcomeSet parse_csv(std::istream& in) {
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        rows.emplace_back(line_no, split_csv_line(line));
    }
    if (rows.size() < 3) {
        throw Error(ErrorKind::parse, "csv header needs name, unit and direction rows");
    }
    const char* labels[] = {"name", "unit", "direction"};
    for (std::size_t h = 0; h < 3; ++h) {
        if (rows[h].second.empty() || rows[h].second.front() != labels[h]) {
            throw Error(ErrorKind::parse, "row " + std::to_string(rows[h].first) +
                                              ": expected header row '" + labels[h] + "'");
        }
    }
    const std::size_t width = rows[0].second.size();
    if (width < 2) {
        throw Error(ErrorKind::schema, "csv declares no objectives");
    }
    for (std::size_t h = 1; h < 3; ++h) {
        if (rows[h].second.size() != width) {
            throw Error(ErrorKind::parse, "row " + std::to_string(rows[h].first) + ": expected " +
                                              std::to_string(width) + " cells");
        }
    }

    OutcomeSet set;
    for (std::size_t c = 1; c < width; ++c) {
        ObjectiveSpec spec;
        spec.name = rows[0].second[c];
        spec.unit = rows[1].second[c];
        try {
            spec.direction = parse_direction(rows[2].second[c]);
        } catch (const Error& e) {
            throw Error(ErrorKind::parse, "row " + std::to_string(rows[2].first) + ": " + e.what());
        }
        set.specs.push_back(std::move(spec));
    }
    validate_specs(set.specs);

    for (std::size_t r = 3; r < rows.size(); ++r) {
        const auto& [number, cells] = rows[r];
        if (cells.size() != width) {
            throw Error(ErrorKind::parse, "row " + std::to_string(number) + ": expected " +
                                              std::to_string(width) + " cells, got " +
                                              std::to_string(cells.size()));
        }
        Point value;
        value.reserve(width - 1);
        for (std::size_t c = 1; c < width; ++c) {
            value.push_back(parse_number(cells[c], number));
        }
        set.points.push_back(to_canonical(set.specs, value));
        set.provenance.push_back(cells[0].empty() ? "given" : cells[0]);
    }
    return set;
}

OutcomeSet parse_json(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::parse, std::string("json: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("objectives") || !doc["objectives"].is_array()) {
        throw Error(ErrorKind::schema, "json outcome set needs an 'objectives' array");
    }
    OutcomeSet set;
    for (const auto& o : doc["objectives"]) {
        if (!o.is_object() || !o.contains("name") || !o.contains("direction")) {
            throw Error(ErrorKind::schema, "objective entries need 'name' and 'direction'");
        }
        ObjectiveSpec spec;
        spec.name = o["name"].get<std::string>();
        spec.unit = o.value("unit", "");
        spec.direction = parse_direction(o["direction"].get<std::string>());
        set.specs.push_back(std::move(spec));
    }
    validate_specs(set.specs);

    const bool canonical = doc.value("space", "original") == "canonical";
    const auto points = doc.value("points", nlohmann::json::array());
    for (std::size_t r = 0; r < points.size(); ++r) {
        const auto& row = points[r];
        if (!row.is_array() || row.size() != set.specs.size()) {
            throw Error(ErrorKind::parse, "row " + std::to_string(r + 1) + ": expected " +
                                              std::to_string(set.specs.size()) + " values");
        }
        Point value;
        for (const auto& v : row) {
            if (!v.is_number()) {
                throw Error(ErrorKind::data, "row " + std::to_string(r + 1) + ": non-finite or non-numeric value");
            }
            const double x = v.get<double>();
            if (!std::isfinite(x)) {
                throw Error(ErrorKind::data, "row " + std::to_string(r + 1) + ": non-finite value");
            }
            value.push_back(x);
        }
        set.points.push_back(canonical ? value : to_canonical(set.specs, value));
    }
    if (doc.contains("provenance")) {
        set.provenance = doc["provenance"].get<std::vector<std::string>>();
        if (set.provenance.size() != set.points.size()) {
            throw Error(ErrorKind::schema, "provenance length differs from point count");
        }
    } else {
        set.provenance.assign(set.points.size(), "given");
    }
    return set;
}

} // namespace

Point Ranges::normalize(std::span<const double> p) const {
    Point out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i] = (p[i] - ideal[i]) * weights[i];
    }
    return out;
}

Point Ranges::denormalize(std::span<const double> q) const {
    Point out(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        out[i] = q[i] / weights[i] + ideal[i];
    }
    return out;
}

std::string to_string(Direction direction) {
    return direction == Direction::minimize ? "minimize" : "maximize";
}

Direction parse_direction(const std::string& text) {
    std::string lower = text;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "min" || lower == "minimize") {
        return Direction::minimize;
    }
    if (lower == "max" || lower == "maximize") {
        return Direction::maximize;
    }
    throw Error(ErrorKind::schema, "unknown direction '" + text + "'");
}

void validate_specs(std::span<const ObjectiveSpec> specs) {
    if (specs.size() < 2) {
        throw Error(ErrorKind::schema, "at least two objectives are required");
    }
    std::set<std::string> names;
    for (const auto& s : specs) {
        if (s.name.empty()) {
            throw Error(ErrorKind::schema, "objective name must not be empty");
        }
        if (!names.insert(s.name).second) {
            throw Error(ErrorKind::schema, "duplicate objective name '" + s.name + "'");
        }
    }
}

OutcomeSet parse_outcome_set(std::istream& in, OutcomeFormat format) {
    return format == OutcomeFormat::csv ? parse_csv(in) : parse_json(in);
}

OutcomeSet load_outcome_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::io, "cannot open '" + path + "'");
    }
    const bool json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
    return parse_outcome_set(in, json ? OutcomeFormat::json : OutcomeFormat::csv);
}

void write_outcome_set_csv(std::ostream& out, const OutcomeSet& set) {
    out << "name";
    for (const auto& s : set.specs) out << ',' << s.name;
    out << "\nunit";
    for (const auto& s : set.specs) out << ',' << s.unit;
    out << "\ndirection";
    for (const auto& s : set.specs) out << ',' << (s.direction == Direction::minimize ? "min" : "max");
    out << '\n';
    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    for (std::size_t r = 0; r < set.size(); ++r) {
        out << (r < set.provenance.size() ? set.provenance[r] : "given");
        for (double v : to_display(set.specs, set.points[r])) out << ',' << v;
        out << '\n';
    }
    out.precision(old_precision);
}

Point to_canonical(std::span<const ObjectiveSpec> specs, std::span<const double> value) {
    require(specs.size() == value.size(), "objective count mismatch");
    Point out(value.begin(), value.end());
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (specs[i].direction == Direction::maximize) {
            out[i] = -out[i];
        }
    }
    return out;
}

Point to_display(std::span<const ObjectiveSpec> specs, std::span<const double> canonical) {
    return to_canonical(specs, canonical);
}

bool dominates(std::span<const double> a, std::span<const double> b, double tol) {
    require(a.size() == b.size(), "dominates: length mismatch");
    bool strictly_better = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i] + tol) {
            return false;
        }
        if (a[i] < b[i] - tol) {
            strictly_better = true;
        }
    }
    return strictly_better;
}

std::vector<std::size_t> nondominated_indices(std::span<const Point> points, double tol) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
            dominated = j != i && dominates(points[j], points[i], tol);
        }
        if (!dominated) {
            keep.push_back(i);
        }
    }
    return keep;
}

OutcomeSet pareto_filter(const OutcomeSet& set, double tol) {
    std::vector<std::size_t> keep;
    if (tol > 0.0 && set.size() > 0) {
        const Ranges ranges = compute_ranges(set);
        std::vector<Point> normalized;
        normalized.reserve(set.size());
        for (const auto& p : set.points) {
            normalized.push_back(ranges.normalize(p));
        }
        keep = nondominated_indices(normalized, tol);
    } else {
        keep = nondominated_indices(set.points, 0.0);
    }
    OutcomeSet out;
    out.specs = set.specs;
    for (std::size_t i : keep) {
        out.points.push_back(set.points[i]);
        out.provenance.push_back(i < set.provenance.size() ? set.provenance[i] : "given");
    }
    return out;
}

Ranges compute_ranges(std::span<const Point> points, double delta) {
    if (points.empty()) {
        throw Error(ErrorKind::empty_set, "cannot compute ranges of an empty outcome set");
    }
    const std::size_t k = points.front().size();
    Ranges r;
    r.ideal = points.front();
    r.nadir_estimate = points.front();
    for (const auto& p : points) {
        require(p.size() == k, "inconsistent objective count");
        for (std::size_t i = 0; i < k; ++i) {
            r.ideal[i] = std::min(r.ideal[i], p[i]);
            r.nadir_estimate[i] = std::max(r.nadir_estimate[i], p[i]);
        }
    }
    r.weights.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        r.weights[i] = 1.0 / (r.nadir_estimate[i] - r.ideal[i] + delta);
        if (!std::isfinite(r.weights[i]) || r.weights[i] <= 0.0) {
            throw Error(ErrorKind::data, "objective " + std::to_string(i + 1) +
                                             " has zero range; use a positive delta");
        }
    }
    return r;
}

Ranges compute_ranges(const OutcomeSet& set, double delta) {
    return compute_ranges(std::span<const Point>(set.points), delta);
}

} // namespace paintmo
