#pragma once

#include <advstab/grid.hpp>

#include <array>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace advstab {

namespace detail {
struct ExprNode;
}

/// A coefficient function on [0,1], either an expression in `x` or a table
/// of samples with linear interpolation. Immutable and cheap to copy.
///
/// Expression grammar:
///   expr   := term (('+' | '-') term)*
///   term   := unary (('*' | '/') unary)*
///   unary  := '-' unary | primary
///   primary:= number | 'x' | func '(' expr ')' | '(' expr ')'
///   func   := 'sin' | 'cos' | 'exp'
class Profile {
public:
    static Profile parse(std::string_view text);
    static Profile constant(double value);
    /// Samples at strictly increasing abscissae; values outside the table
    /// are held at the nearest end value.
    static Profile sampled(std::vector<double> xs, std::vector<double> values);
    /// Two-column CSV (x, value). x must be strictly increasing and cover [0,1].
    static Profile from_csv(const std::filesystem::path& path);

    /// Throws on division by zero or a non-finite result.
    double operator()(double x) const;

    bool is_expression() const noexcept { return root_ != nullptr; }

    /// Fully parenthesised source form; parses back to an equivalent tree.
    std::string to_string() const;

private:
    std::shared_ptr<const detail::ExprNode> root_;
    std::vector<double> xs_;
    std::vector<double> values_;
};

Profile parse_profile(std::string_view text);

/// Samples at the grid nodes. Throws if any value is non-finite.
std::vector<double> evaluate(const Profile& p, const Grid& grid);

/// Samples on the vertex grid {0, 1/m, ..., 1}.
std::vector<double> evaluate_vertices(const Profile& p, int intervals);

/// Composite Simpson integral over [0,1].
double integrate(const Profile& p, int intervals = 4096);

/// Maximum / minimum over [0,1], taken on a vertex grid including both ends.
double max_value(const Profile& p, int intervals = 4096);
double min_value(const Profile& p, int intervals = 4096);

enum class Hypothesis {
    RPositive,
    KPositive,
    RNonConstant,
    KNonConstant,
    ROverKNonIncreasing,    // (r/K)' <= 0
    RNonDecreasing,         // r' >= 0
    KOverRFlatAtZero,       // (K/r)'(0) = 0
    KOverRFlatAtOne,        // (K/r)'(1) = 0
    KRatioBounded,          // max K <= 2 min K
    KMinAtLeastOne,         // min K >= 1
    KOverRConvex,           // (K/r)'' >= 0
};

inline constexpr std::size_t hypothesis_count = 11;

const char* hypothesis_name(Hypothesis h);

struct HypothesisCheck {
    bool holds = false;
    /// Signed slack: positive when satisfied with room to spare.
    double margin = 0.0;
};

struct HypothesisReport {
    std::array<HypothesisCheck, hypothesis_count> checks{};
    int refined_intervals = 0;

    const HypothesisCheck& operator[](Hypothesis h) const { return checks[static_cast<std::size_t>(h)]; }
    HypothesisCheck& operator[](Hypothesis h) { return checks[static_cast<std::size_t>(h)]; }

    /// Every hypothesis of the main theorem (all eleven flags).
    bool theorem_hypotheses() const;
    /// Those needed for the ∫η > ∫K inequality.
    bool integral_gain_hypotheses() const;
};

inline constexpr double derivative_sign_tolerance = 1e-8;
inline constexpr double nonconstant_tolerance = 1e-10;

/// Derivative conditions use fourth-order finite differences on a vertex
/// grid with 4n intervals; sign conditions tolerate violations up to 1e-8.
HypothesisReport check_hypotheses(const Profile& r, const Profile& K, const Grid& grid);

}  // namespace advstab
