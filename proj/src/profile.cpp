#include <advstab/profile.hpp>

#include <advstab/error.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace advstab {

namespace detail {

enum class Op { Number, Variable, Negate, Add, Sub, Mul, Div, Sin, Cos, Exp };

struct ExprNode {
    Op op = Op::Number;
    double value = 0.0;
    std::shared_ptr<const ExprNode> lhs;
    std::shared_ptr<const ExprNode> rhs;
};

}  // namespace detail

namespace {

using detail::ExprNode;
using detail::Op;
using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_node(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr, double value = 0.0) {
    auto node = std::make_shared<ExprNode>();
    node->op = op;
    node->value = value;
    node->lhs = std::move(lhs);
    node->rhs = std::move(rhs);
    return node;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse() {
        NodePtr root = expression();
        skip_space();
        if (pos_ != text_.size()) {
            throw ParseError("unexpected character '" + std::string(1, text_[pos_]) + "'", pos_);
        }
        return root;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expression() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = make_node(Op::Add, lhs, term());
            } else if (accept('-')) {
                lhs = make_node(Op::Sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = make_node(Op::Mul, lhs, unary());
            } else if (accept('/')) {
                lhs = make_node(Op::Div, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) return make_node(Op::Negate, unary());
        return primary();
    }

    NodePtr primary() {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = expression();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
    }

    NodePtr number() {
        const std::size_t start = pos_;
        auto is_digit = [&](std::size_t i) {
            return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]));
        };
        while (is_digit(pos_)) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (is_digit(pos_)) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
            if (is_digit(p)) {
                pos_ = p;
                while (is_digit(pos_)) ++pos_;
            }
        }
        double value = 0.0;
        const auto* first = text_.data() + start;
        const auto* last = text_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last) throw ParseError("malformed number", start);
        return make_node(Op::Number, nullptr, nullptr, value);
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);
        if (name == "x") return make_node(Op::Variable);

        Op op;
        if (name == "sin") {
            op = Op::Sin;
        } else if (name == "cos") {
            op = Op::Cos;
        } else if (name == "exp") {
            op = Op::Exp;
        } else {
            throw ParseError("unknown identifier '" + std::string(name) + "'", start);
        }
        if (!accept('(')) throw ParseError("expected '(' after function name", pos_);
        NodePtr arg = expression();
        if (!accept(')')) throw ParseError("expected ')'", pos_);
        return make_node(op, arg);
    }
};

double eval_node(const ExprNode& n, double x) {
    switch (n.op) {
        case Op::Number: return n.value;
        case Op::Variable: return x;
        case Op::Negate: return -eval_node(*n.lhs, x);
        case Op::Add: return eval_node(*n.lhs, x) + eval_node(*n.rhs, x);
        case Op::Sub: return eval_node(*n.lhs, x) - eval_node(*n.rhs, x);
        case Op::Mul: return eval_node(*n.lhs, x) * eval_node(*n.rhs, x);
        case Op::Div: {
            const double den = eval_node(*n.rhs, x);
            if (den == 0.0) {
                throw InputError("profiles", "division by zero at x = " + std::to_string(x));
            }
            return eval_node(*n.lhs, x) / den;
        }
        case Op::Sin: return std::sin(eval_node(*n.lhs, x));
        case Op::Cos: return std::cos(eval_node(*n.lhs, x));
        case Op::Exp: return std::exp(eval_node(*n.lhs, x));
    }
    return std::numeric_limits<double>::quiet_NaN();
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void print_node(const ExprNode& n, std::string& out) {
    auto binary = [&](const char* sym) {
        out += '(';
        print_node(*n.lhs, out);
        out += sym;
        print_node(*n.rhs, out);
        out += ')';
    };
    auto call = [&](const char* name) {
        out += name;
        out += '(';
        print_node(*n.lhs, out);
        out += ')';
    };
    switch (n.op) {
        case Op::Number: {
            // Negative literals only arise from constant(); keep them parseable.
            if (n.value < 0) {
                out += "(-" + format_number(-n.value) + ")";
            } else {
                out += format_number(n.value);
            }
            break;
        }
        case Op::Variable: out += 'x'; break;
        case Op::Negate:
            out += "(-";
            print_node(*n.lhs, out);
            out += ')';
            break;
        case Op::Add: binary(" + "); break;
        case Op::Sub: binary(" - "); break;
        case Op::Mul: binary(" * "); break;
        case Op::Div: binary(" / "); break;
        case Op::Sin: call("sin"); break;
        case Op::Cos: call("cos"); break;
        case Op::Exp: call("exp"); break;
    }
}

}  // namespace

Profile Profile::parse(std::string_view text) {
    Profile p;
    p.root_ = Parser(text).parse();
    return p;
}

Profile Profile::constant(double value) {
    Profile p;
    p.root_ = make_node(Op::Number, nullptr, nullptr, value);
    return p;
}

Profile Profile::sampled(std::vector<double> xs, std::vector<double> values) {
    if (xs.size() != values.size() || xs.size() < 2) {
        throw InputError("profiles", "sampled profile needs at least two (x, value) pairs");
    }
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] > xs[i - 1])) throw InputError("profiles", "sample abscissae must be strictly increasing");
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw InputError("profiles", "non-finite sample value");
    }
    Profile p;
    p.xs_ = std::move(xs);
    p.values_ = std::move(values);
    return p;
}

Profile Profile::from_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("profiles", "cannot open profile table " + path.string());
    std::vector<double> xs;
    std::vector<double> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        double x = 0.0;
        double v = 0.0;
        if (!(fields >> x >> v)) {
            // Tolerate a single header line.
            if (xs.empty() && line_no == 1) continue;
            throw InputError("profiles", path.string() + ":" + std::to_string(line_no) + ": expected two numbers");
        }
        xs.push_back(x);
        values.push_back(v);
    }
    if (xs.empty() || xs.front() > 0.0 || xs.back() < 1.0) {
        throw InputError("profiles", "profile table " + path.string() + " must cover [0,1]");
    }
    return sampled(std::move(xs), std::move(values));
}

double Profile::operator()(double x) const {
    double v;
    if (root_) {
        v = eval_node(*root_, x);
    } else {
        if (x <= xs_.front()) {
            v = values_.front();
        } else if (x >= xs_.back()) {
            v = values_.back();
        } else {
            const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
            const auto hi = static_cast<std::size_t>(it - xs_.begin());
            const std::size_t lo = hi - 1;
            const double t = (x - xs_[lo]) / (xs_[hi] - xs_[lo]);
            v = t == 0.0 ? values_[lo] : (1.0 - t) * values_[lo] + t * values_[hi];
        }
    }
    if (!std::isfinite(v)) throw InputError("profiles", "non-finite value at x = " + std::to_string(x));
    return v;
}

std::string Profile::to_string() const {
    if (!root_) {
        std::ostringstream os;
        os << "<table of " << xs_.size() << " samples>";
        return os.str();
    }
    std::string out;
    print_node(*root_, out);
    return out;
}

Profile parse_profile(std::string_view text) { return Profile::parse(text); }

std::vector<double> evaluate(const Profile& p, const Grid& grid) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(grid.size()));
    for (double x : grid.nodes()) out.push_back(p(x));
    return out;
}

std::vector<double> evaluate_vertices(const Profile& p, int intervals) {
    std::vector<double> out(static_cast<std::size_t>(intervals) + 1);
    for (int i = 0; i <= intervals; ++i) {
        out[static_cast<std::size_t>(i)] = p(static_cast<double>(i) / intervals);
    }
    return out;
}

double integrate(const Profile& p, int intervals) {
    if (intervals % 2 != 0) ++intervals;
    const auto f = evaluate_vertices(p, intervals);
    double sum = f.front() + f.back();
    for (int i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * f[static_cast<std::size_t>(i)];
    return sum / (3.0 * intervals);
}

double max_value(const Profile& p, int intervals) {
    const auto f = evaluate_vertices(p, intervals);
    return *std::max_element(f.begin(), f.end());
}

double min_value(const Profile& p, int intervals) {
    const auto f = evaluate_vertices(p, intervals);
    return *std::min_element(f.begin(), f.end());
}

// ---------------------------------------------------------------------------
// Hypotheses

const char* hypothesis_name(Hypothesis h) {
    switch (h) {
        case Hypothesis::RPositive: return "r_positive";
        case Hypothesis::KPositive: return "K_positive";
        case Hypothesis::RNonConstant: return "r_nonconstant";
        case Hypothesis::KNonConstant: return "K_nonconstant";
        case Hypothesis::ROverKNonIncreasing: return "r_over_K_nonincreasing";
        case Hypothesis::RNonDecreasing: return "r_nondecreasing";
        case Hypothesis::KOverRFlatAtZero: return "K_over_r_flat_at_0";
        case Hypothesis::KOverRFlatAtOne: return "K_over_r_flat_at_1";
        case Hypothesis::KRatioBounded: return "K_max_le_2_K_min";
        case Hypothesis::KMinAtLeastOne: return "K_min_ge_1";
        case Hypothesis::KOverRConvex: return "K_over_r_convex";
    }
    return "?";
}

bool HypothesisReport::theorem_hypotheses() const {
    return std::all_of(checks.begin(), checks.end(), [](const HypothesisCheck& c) { return c.holds; });
}

bool HypothesisReport::integral_gain_hypotheses() const {
    for (Hypothesis h : {Hypothesis::RPositive, Hypothesis::KPositive, Hypothesis::KOverRFlatAtZero,
                         Hypothesis::KOverRFlatAtOne, Hypothesis::KMinAtLeastOne, Hypothesis::KOverRConvex}) {
        if (!(*this)[h].holds) return false;
    }
    return true;
}

namespace {

// Fourth-order differences on a uniform vertex grid (needs >= 6 points).
std::vector<double> first_derivative(const std::vector<double>& f, double h) {
    const std::size_t m = f.size();
    std::vector<double> d(m);
    for (std::size_t i = 2; i + 2 < m; ++i) {
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    }
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
    const std::size_t e = m - 1;
    d[e] = (25.0 * f[e] - 48.0 * f[e - 1] + 36.0 * f[e - 2] - 16.0 * f[e - 3] + 3.0 * f[e - 4]) / (12.0 * h);
    d[e - 1] = (3.0 * f[e] + 10.0 * f[e - 1] - 18.0 * f[e - 2] + 6.0 * f[e - 3] - f[e - 4]) / (12.0 * h);
    return d;
}

std::vector<double> second_derivative(const std::vector<double>& f, double h) {
    const std::size_t m = f.size();
    const double s = 12.0 * h * h;
    std::vector<double> d(m);
    for (std::size_t i = 2; i + 2 < m; ++i) {
        d[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) / s;
    }
    auto one_sided = [&](std::size_t at, int dir) {
        auto g = [&](int k) { return f[static_cast<std::size_t>(static_cast<long>(at) + dir * k)]; };
        return (45.0 * g(0) - 154.0 * g(1) + 214.0 * g(2) - 156.0 * g(3) + 61.0 * g(4) - 10.0 * g(5)) / s;
    };
    auto near_side = [&](std::size_t edge, int dir) {
        auto g = [&](int k) { return f[static_cast<std::size_t>(static_cast<long>(edge) + dir * k)]; };
        return (10.0 * g(0) - 15.0 * g(1) - 4.0 * g(2) + 14.0 * g(3) - 6.0 * g(4) + g(5)) / s;
    };
    d[0] = one_sided(0, +1);
    d[1] = near_side(0, +1);
    d[m - 1] = one_sided(m - 1, -1);
    d[m - 2] = near_side(m - 1, -1);
    return d;
}

HypothesisCheck at_least(double value, double bound, double tol) {
    return {value - bound >= -tol, value - bound};
}

}  // namespace

HypothesisReport check_hypotheses(const Profile& r, const Profile& K, const Grid& grid) {
    const int intervals = 4 * grid.size();
    const double h = 1.0 / intervals;
    const auto rv = evaluate_vertices(r, intervals);
    const auto kv = evaluate_vertices(K, intervals);

    std::vector<double> r_over_k(rv.size());
    std::vector<double> k_over_r(rv.size());
    for (std::size_t i = 0; i < rv.size(); ++i) {
        r_over_k[i] = rv[i] / kv[i];
        k_over_r[i] = kv[i] / rv[i];
    }

    const auto [r_min, r_max] = std::minmax_element(rv.begin(), rv.end());
    const auto [k_min, k_max] = std::minmax_element(kv.begin(), kv.end());

    const auto d_r = first_derivative(rv, h);
    const auto d_r_over_k = first_derivative(r_over_k, h);
    const auto d_k_over_r = first_derivative(k_over_r, h);
    const auto dd_k_over_r = second_derivative(k_over_r, h);

    HypothesisReport rep;
    rep.refined_intervals = intervals;
    const double tol = derivative_sign_tolerance;

    rep[Hypothesis::RPositive] = {*r_min > 0.0, *r_min};
    rep[Hypothesis::KPositive] = {*k_min > 0.0, *k_min};

    auto spread = [](double lo, double hi) {
        const double scale = std::max(std::abs(lo), std::abs(hi));
        const double margin = (hi - lo) - nonconstant_tolerance * scale;
        return HypothesisCheck{margin > 0.0, margin};
    };
    rep[Hypothesis::RNonConstant] = spread(*r_min, *r_max);
    rep[Hypothesis::KNonConstant] = spread(*k_min, *k_max);

    const double max_d_rk = *std::max_element(d_r_over_k.begin(), d_r_over_k.end());
    rep[Hypothesis::ROverKNonIncreasing] = at_least(-max_d_rk, 0.0, tol);
    rep[Hypothesis::RNonDecreasing] = at_least(*std::min_element(d_r.begin(), d_r.end()), 0.0, tol);
    rep[Hypothesis::KOverRFlatAtZero] = at_least(-std::abs(d_k_over_r.front()), 0.0, tol);
    rep[Hypothesis::KOverRFlatAtOne] = at_least(-std::abs(d_k_over_r.back()), 0.0, tol);
    rep[Hypothesis::KRatioBounded] = at_least(2.0 * *k_min, *k_max, 0.0);
    rep[Hypothesis::KMinAtLeastOne] = at_least(*k_min, 1.0, 0.0);
    rep[Hypothesis::KOverRConvex] = at_least(*std::min_element(dd_k_over_r.begin(), dd_k_over_r.end()), 0.0, tol);
    return rep;
}

}  // namespace advstab
