#include "valgroup/config.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

namespace valgroup {

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

long long parse_int(const std::string& value, const std::string& field) {
    long long out = 0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last)
        throw ValidationError(field, "'" + value + "' is not an integer");
    return out;
}

std::vector<int> parse_int_list(const std::string& value, const std::string& field) {
    std::vector<int> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(static_cast<int>(parse_int(trim(item), field)));
    if (out.empty()) throw ValidationError(field, "empty list");
    return out;
}

struct RawConfig {
    std::optional<std::string> kind, label;
    std::optional<long long> prime, factors, affine_base, affine_slope;
    std::vector<std::vector<int>> prefix_deepen, eventual_deepen;
    std::vector<int> prefix_mult, eventual_mult;
};

RawConfig read_lines(std::string_view text) {
    RawConfig raw;
    std::string section; // "", "prefix", "eventual"
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ValidationError("line " + std::to_string(lineno), "malformed section header");
            section = trim(std::string_view(t).substr(1, t.size() - 2));
            if (section != "prefix" && section != "eventual")
                throw ValidationError("[" + section + "]", "unknown section");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ValidationError("line " + std::to_string(lineno), "expected key = value");
        const std::string key = trim(std::string_view(t).substr(0, eq));
        const std::string value = trim(std::string_view(t).substr(eq + 1));
        const std::string path = section.empty() ? key : "[" + section + "]." + key;

        if (section.empty()) {
            if (key == "kind")
                raw.kind = value;
            else if (key == "prime")
                raw.prime = parse_int(value, path);
            else if (key == "factors")
                raw.factors = parse_int(value, path);
            else if (key == "label")
                raw.label = value;
            else
                throw ValidationError(path, "unknown key");
        } else if (key == "deepen") {
            auto list = parse_int_list(value, path);
            (section == "prefix" ? raw.prefix_deepen : raw.eventual_deepen)
                .push_back(std::move(list));
        } else if (key == "mult") {
            (section == "prefix" ? raw.prefix_mult : raw.eventual_mult)
                .push_back(static_cast<int>(parse_int(value, path)));
        } else if (section == "eventual" && key == "affine_base") {
            raw.affine_base = parse_int(value, path);
        } else if (section == "eventual" && key == "affine_slope") {
            raw.affine_slope = parse_int(value, path);
        } else {
            throw ValidationError(path, "unknown key");
        }
    }
    return raw;
}

} // namespace

FiltrationSpec parse_spec_config(std::string_view text) {
    RawConfig raw = read_lines(text);
    if (!raw.kind) throw ValidationError("kind", "missing (prufer | elem)");
    if (!raw.prime) throw ValidationError("prime", "missing");
    if (!is_prime(*raw.prime))
        throw ValidationError("prime", std::to_string(*raw.prime) + " is not prime");

    if (*raw.kind == "prufer") {
        if (!raw.prefix_mult.empty() || !raw.eventual_mult.empty())
            throw ValidationError("mult", "mult lines apply to elem specs only");
        if (raw.affine_base || raw.affine_slope)
            throw ValidationError("[eventual].affine_base",
                                  "affine tails apply to elem specs only");
        const long long factors = raw.factors.value_or(1);
        if (factors < 1) throw ValidationError("factors", "must be >= 1");
        auto spec = FiltrationSpec::prufer(*raw.prime, static_cast<int>(factors),
                                           raw.prefix_deepen, raw.eventual_deepen);
        if (raw.label) spec.set_label(*raw.label);
        return spec;
    }
    if (*raw.kind == "elem") {
        if (raw.factors)
            throw ValidationError("factors", "factor counts apply to prufer specs only");
        if (!raw.prefix_deepen.empty() || !raw.eventual_deepen.empty())
            throw ValidationError("deepen", "deepen lines apply to prufer specs only");
        const bool affine = raw.affine_base.has_value() || raw.affine_slope.has_value();
        if (affine) {
            if (!raw.eventual_mult.empty())
                throw ValidationError("[eventual].mult",
                                      "an affine tail excludes periodic mult lines");
            if (!raw.affine_base || !raw.affine_slope)
                throw ValidationError("[eventual]",
                                      "affine tails need both affine_base and affine_slope");
            auto spec = FiltrationSpec::elem_affine(*raw.prime, raw.prefix_mult,
                                                    *raw.affine_base, *raw.affine_slope);
            if (raw.label) spec.set_label(*raw.label);
            return spec;
        }
        auto spec = FiltrationSpec::elem_periodic(*raw.prime, raw.prefix_mult, raw.eventual_mult);
        if (raw.label) spec.set_label(*raw.label);
        return spec;
    }
    throw ValidationError("kind", "'" + *raw.kind + "' is not prufer or elem");
}

FiltrationSpec load_spec_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config", "cannot read '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_spec_config(buffer.str());
}

std::string spec_fingerprint(const FiltrationSpec& spec) {
    const std::string text = spec.canonical_text();
    unsigned long long hash = 1469598103934665603ULL; // FNV-1a 64
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << hash;
    return os.str();
}

} // namespace valgroup
