#pragma once

// Energy reports and their CSV / JSON-lines serialization, plus the
// fixed-decimal formatting used by the rendered tables.

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "errors.hpp"
#include "geometry.hpp"

namespace ellipstat {

enum class Method { analytic, spectral, bem, oracle };

inline std::string to_string(Method m)
{
    switch (m) {
    case Method::analytic: return "analytic";
    case Method::spectral: return "spectral";
    case Method::bem: return "bem";
    case Method::oracle: return "oracle";
    }
    return "?";
}

inline Method parse_method(std::string_view s)
{
    if (s == "analytic") return Method::analytic;
    if (s == "spectral") return Method::spectral;
    if (s == "bem") return Method::bem;
    if (s == "oracle") return Method::oracle;
    throw ConfigurationError("unknown method: " + std::string(s));
}

/// A density as the user gave it: coefficients in one of the two conventions.
struct DensitySpec
{
    std::string description;
    std::array<double, 3> coefficients{0.0, 0.0, 0.0};
    DensityConvention convention = DensityConvention::normalized;

    AffineDensity normalized(const Ellipse& e) const
    {
        if (convention == DensityConvention::normalized)
            return {coefficients[0], coefficients[1], coefficients[2]};
        return MonomialDensity{coefficients[0], coefficients[1], coefficients[2]}.normalized(e);
    }
};

namespace detail {

inline std::string format_coefficient(double c)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", c);
    return buf;
}

}  // namespace detail

/// "c0 + c1*x1 + c2*x2" in the monomial convention.  Terms may come in any
/// order and repeat; a variable without a factor has coefficient 1.
inline DensitySpec parse_sigma(std::string_view text)
{
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch)))
            s.push_back(ch);
    auto fail = [&]() { throw ConfigurationError("cannot parse density expression '" + std::string(text) + "'"); };
    if (s.empty())
        fail();

    std::array<double, 3> c{0.0, 0.0, 0.0};
    const char* p = s.c_str();
    const char* const end = p + s.size();
    bool first = true;
    while (p < end) {
        double sign = 1.0;
        if (*p == '+' || *p == '-') {
            sign = *p == '-' ? -1.0 : 1.0;
            ++p;
        } else if (!first) {
            fail();
        }
        first = false;

        double factor = 1.0;
        bool have_number = false;
        if (p < end && *p != 'x') {
            char* next = nullptr;
            factor = std::strtod(p, &next);
            if (next == p || *p == '+' || *p == '-')
                fail();
            p = next;
            have_number = true;
        }
        int slot = 0;
        if (have_number && p < end && *p == '*')
            ++p;
        else if (have_number && p < end && *p == 'x')
            fail();
        if (p < end && *p == 'x') {
            if (p + 1 >= end || (p[1] != '1' && p[1] != '2'))
                fail();
            slot = p[1] - '0';
            p += 2;
        } else if (!have_number || p[-1] == '*') {
            fail();
        }
        c[std::size_t(slot)] += sign * factor;
    }
    for (double v : c)
        if (!std::isfinite(v))
            fail();

    DensitySpec d;
    d.description = std::string(text);
    d.coefficients = c;
    d.convention = DensityConvention::monomial;
    return d;
}

/// "--density one|x1|x2" (monomial convention).
inline DensitySpec named_density(std::string_view name)
{
    DensitySpec d;
    d.description = std::string(name);
    d.convention = DensityConvention::monomial;
    if (name == "one")
        d.coefficients = {1.0, 0.0, 0.0};
    else if (name == "x1")
        d.coefficients = {0.0, 1.0, 0.0};
    else if (name == "x2")
        d.coefficients = {0.0, 0.0, 1.0};
    else
        throw ConfigurationError("unknown density: " + std::string(name));
    return d;
}

/// "--alpha a0,a1,a2" (normalized convention).
inline DensitySpec alpha_density(const std::array<double, 3>& alpha)
{
    DensitySpec d;
    d.description = "alpha=" + detail::format_coefficient(alpha[0]) + "," + detail::format_coefficient(alpha[1]) + "," +
                    detail::format_coefficient(alpha[2]);
    d.coefficients = alpha;
    d.convention = DensityConvention::normalized;
    for (double v : alpha)
        if (!std::isfinite(v))
            throw ConfigurationError("density coefficients must be finite");
    return d;
}

struct MethodParameters
{
    std::optional<int> truncation;
    std::optional<int> level;
    std::optional<int> q;
    std::optional<int> q_sing;
};

struct EnergyReport
{
    Method method = Method::analytic;
    double a = 1.0;
    double b = 1.0;
    DensitySpec density;
    MethodParameters parameters;
    double value = 0.0;
    std::optional<double> reference;
    std::optional<double> relative_error;

    void set_reference(double ref)
    {
        reference = ref;
        relative_error = std::abs(value - ref) / std::abs(ref);
    }
};

// ---- number formatting ----------------------------------------------------

inline std::string format_full(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

enum class Rounding { truncate, half_even };

inline Rounding parse_rounding(std::string_view s)
{
    if (s == "truncate") return Rounding::truncate;
    if (s == "half-even") return Rounding::half_even;
    throw ConfigurationError("unknown rounding mode: " + std::string(s));
}

/// Fixed-point with the given number of decimals.  printf rounds the exact
/// binary value half-to-even; truncation cuts the exact decimal expansion.
inline std::string format_fixed(double v, int decimals, Rounding mode)
{
    char buf[512];
    if (mode == Rounding::half_even) {
        std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
        return buf;
    }
    std::snprintf(buf, sizeof buf, "%.*f", decimals + 40, v);
    std::string s = buf;
    s.resize(s.find('.') + std::size_t(decimals) + (decimals > 0 ? 1 : 0));
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos)
        s.erase(0, 1);
    return s;
}

// ---- CSV -------------------------------------------------------------------

namespace detail {

inline std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"')
            out += '"';
        out += ch;
    }
    return out + '"';
}

inline std::string opt_int(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }

}  // namespace detail

inline void write_csv_header(std::ostream& out)
{
    out << "method,a,b,density,convention,c0,c1,c2,truncation,level,q,q_sing,value,reference,relative_error\n";
}

/// rounded: values printed with 10 significant digits instead of 17.
inline void write_csv_row(std::ostream& out, const EnergyReport& r, bool rounded = false)
{
    auto num = [rounded](double v) {
        if (!rounded)
            return format_full(v);
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return std::string(buf);
    };
    const auto& c = r.density.coefficients;
    out << to_string(r.method) << ',' << format_full(r.a) << ',' << format_full(r.b) << ','
        << detail::csv_escape(r.density.description) << ',' << to_string(r.density.convention) << ','
        << format_full(c[0]) << ',' << format_full(c[1]) << ',' << format_full(c[2]) << ','
        << detail::opt_int(r.parameters.truncation) << ',' << detail::opt_int(r.parameters.level) << ','
        << detail::opt_int(r.parameters.q) << ',' << detail::opt_int(r.parameters.q_sing) << ',' << num(r.value) << ','
        << (r.reference ? num(*r.reference) : "") << ',' << (r.relative_error ? num(*r.relative_error) : "") << '\n';
}

// ---- JSON lines --------------------------------------------------------------

inline nlohmann::ordered_json to_json(const EnergyReport& r)
{
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    if (r.parameters.truncation)
        params["truncation"] = *r.parameters.truncation;
    if (r.parameters.level)
        params["level"] = *r.parameters.level;
    if (r.parameters.q)
        params["q"] = *r.parameters.q;
    if (r.parameters.q_sing)
        params["q_sing"] = *r.parameters.q_sing;

    nlohmann::ordered_json j;
    j["method"] = to_string(r.method);
    j["ellipse"] = {{"a", r.a}, {"b", r.b}};
    j["density"] = {{"description", r.density.description},
                    {"coefficients", r.density.coefficients},
                    {"convention", to_string(r.density.convention)}};
    j["parameters"] = params;
    j["value"] = r.value;
    j["reference"] = r.reference ? nlohmann::ordered_json(*r.reference) : nlohmann::ordered_json(nullptr);
    j["relative_error"] =
        r.relative_error ? nlohmann::ordered_json(*r.relative_error) : nlohmann::ordered_json(nullptr);
    return j;
}

inline void write_jsonl(std::ostream& out, const EnergyReport& r) { out << to_json(r).dump() << '\n'; }

}  // namespace ellipstat
