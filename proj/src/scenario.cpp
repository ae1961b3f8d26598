#include <advstab/error.hpp>
#include <advstab/scenario.hpp>
#include <advstab/thresholds.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace advstab {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw InputError("scenario", "line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& v, int line) {
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto r = std::from_chars(v.data(), end, out);
    if (r.ec != std::errc() || r.ptr != end || !std::isfinite(out)) fail(line, "not a number: '" + v + "'");
    return out;
}

int to_int(const std::string& v, int line) {
    int out = 0;
    const auto* end = v.data() + v.size();
    const auto r = std::from_chars(v.data(), end, out);
    if (r.ec != std::errc() || r.ptr != end) fail(line, "not an integer: '" + v + "'");
    return out;
}

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

Profile load_profile(const std::string& source, const std::filesystem::path& base_dir) {
    if (ends_with(source, ".csv")) {
        std::filesystem::path p(source);
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        return Profile::from_csv(p);
    }
    return parse_profile(source);
}

Habitat Scenario::habitat() const { return Habitat(r, K, Grid(grid_n)); }

Predator Scenario::predator() const { return Predator{nu.value_or(1.0), b, gamma}; }

std::vector<double> Scenario::mu_samples() const {
    if (mu_count == 1) return {mu_min};
    return log_range(mu_min, mu_max, mu_count);
}

void Scenario::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw InputError("scenario", std::string(name) + " must be positive");
    };
    positive(b, "b");
    positive(gamma, "gamma");
    if (mu) positive(*mu, "mu");
    if (nu) positive(*nu, "nu");
    if (q && !(*q >= 0.0)) throw InputError("scenario", "q must be nonnegative");
    if (grid_n < 16) throw InputError("scenario", "grid_n must be at least 16");
    positive(mu_min, "mu_min");
    positive(mu_max, "mu_max");
    if (mu_max < mu_min) throw InputError("scenario", "mu_max must not be below mu_min");
    if (mu_count < 1) throw InputError("scenario", "mu_count must be at least 1");
    if (q_resolution < 2) throw InputError("scenario", "q_resolution must be at least 2");
    if (!(q_low_fraction > 0.0 && q_low_fraction < q_high_fraction && q_high_fraction < 1.0)) {
        throw InputError("scenario", "q fractions must satisfy 0 < q_low < q_high < 1");
    }
    positive(T, "T");
    if (dt) positive(*dt, "dt");
}

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
    Scenario s;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    bool have_r = false;
    bool have_k = false;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string l = trim(std::string_view(raw).substr(0, hash));
        if (l.empty()) continue;
        if (l.front() == '[') {
            if (l.back() != ']') fail(line, "unterminated section header");
            section = trim(std::string_view(l).substr(1, l.size() - 2));
            if (section != "profiles" && section != "rates" && section != "ranges") {
                fail(line, "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = l.find('=');
        if (eq == std::string::npos) fail(line, "expected key = value");
        const std::string key = trim(std::string_view(l).substr(0, eq));
        const std::string value = trim(std::string_view(l).substr(eq + 1));
        if (key.empty() || value.empty()) fail(line, "empty key or value");

        try {
            if (section.empty()) {
                if (key == "grid_n") {
                    s.grid_n = to_int(value, line);
                } else {
                    fail(line, "unknown top-level key '" + key + "'");
                }
            } else if (section == "profiles") {
                if (key == "r") {
                    s.r = load_profile(value, base_dir);
                    s.r_source = value;
                    have_r = true;
                } else if (key == "K") {
                    s.K = load_profile(value, base_dir);
                    s.k_source = value;
                    have_k = true;
                } else {
                    fail(line, "unknown profile '" + key + "'");
                }
            } else if (section == "rates") {
                const double v = to_double(value, line);
                if (key == "b") s.b = v;
                else if (key == "gamma") s.gamma = v;
                else if (key == "mu") s.mu = v;
                else if (key == "nu") s.nu = v;
                else if (key == "q") s.q = v;
                else fail(line, "unknown rate '" + key + "'");
            } else {
                if (key == "mu_count") s.mu_count = to_int(value, line);
                else if (key == "q_resolution") s.q_resolution = to_int(value, line);
                else if (key == "mu_min") s.mu_min = to_double(value, line);
                else if (key == "mu_max") s.mu_max = to_double(value, line);
                else if (key == "q_low") s.q_low_fraction = to_double(value, line);
                else if (key == "q_high") s.q_high_fraction = to_double(value, line);
                else if (key == "T") s.T = to_double(value, line);
                else if (key == "dt") s.dt = to_double(value, line);
                else fail(line, "unknown range key '" + key + "'");
            }
        } catch (const ParseError& e) {
            fail(line, e.what());
        }
    }
    if (!have_r || !have_k) throw InputError("scenario", "both r and K must be given in [profiles]");
    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw InputError("scenario", "cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_scenario(ss.str(), path.parent_path());
}

}  // namespace advstab
