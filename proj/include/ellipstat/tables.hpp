#pragma once

// The three comparison tables for b = 0.5: energies of 1, x1, x2 (Table 1),
// of x1 + 2 x2 + 3 (Table 2), and the worst BEM relative error over
// a = 0.5:0.05:1.5 (Table 3).

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "analytic.hpp"
#include "bem.hpp"
#include "geometry.hpp"
#include "mesh.hpp"
#include "report.hpp"

namespace ellipstat {

inline constexpr double table_minor_axis = 0.5;

/// Table abscissae are 0.5 + 0.05 k, k = 0..20.  Keeping the integer index
/// avoids comparing accumulated floating-point steps.
inline double table_a(int k) { return double(10 + k) / 20.0; }

inline constexpr std::array<int, 6> table1_indices{0, 4, 8, 12, 16, 20};
inline constexpr std::array<int, 6> table2_indices{5, 8, 11, 14, 17, 20};
inline constexpr int table3_count = 21;

/// Monomial densities of the tables: 1, x1, x2 and x1 + 2 x2 + 3.
inline constexpr std::array<std::array<double, 3>, 4> table_monomials{{
    {1.0, 0.0, 0.0},
    {0.0, 1.0, 0.0},
    {0.0, 0.0, 1.0},
    {3.0, 1.0, 2.0},
}};

/// Display scales of the Table 1 rows (the x1 row is printed times 10, the x2
/// row times 100).
inline constexpr std::array<double, 3> table1_scales{1.0, 10.0, 100.0};
inline constexpr std::array<const char*, 4> table_row_names{"I_sigma0", "I_sigma1", "I_sigma2", "I_sigma"};
inline constexpr std::array<const char*, 3> table1_scale_labels{"", " x10^-1", " x10^-2"};

/// Energies of the four monomial densities on one geometry.
struct TableEnergies
{
    std::array<double, 4> exact{};
    std::optional<std::array<double, 4>> computed;
};

inline std::array<double, 4> exact_table_energies(const Ellipse& e)
{
    std::array<double, 4> out{};
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& c = table_monomials[i];
        out[i] = analytic_energy(e, MonomialDensity{c[0], c[1], c[2]}.normalized(e));
    }
    return out;
}

inline std::array<double, 4> bem_table_energies(const Ellipse& e, int level, const BemOptions& opts)
{
    const TriangleMesh mesh = generate(e, level);
    const EnergyMatrix m = assemble(mesh, opts);
    std::array<double, 4> out{};
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& c = table_monomials[i];
        out[i] = bem_energy(m, mesh, MonomialDensity{c[0], c[1], c[2]}.normalized(e));
    }
    return out;
}

struct TableOptions
{
    bool exact_only = false;
    int level = 5;
    BemOptions bem{};
    unsigned workers = 1;  // geometries computed concurrently
};

/// Energies at every a = table_a(k).  Geometries are independent; with
/// workers > 1 they are split across threads, each assembling serially, and
/// results land in fixed slots so the output does not depend on scheduling.
class TableData
{
public:
    explicit TableData(const TableOptions& opts) : opts_(opts), rows_(std::size_t(table3_count))
    {
        for (int k = 0; k < table3_count; ++k)
            rows_[std::size_t(k)].exact = exact_table_energies(Ellipse(table_a(k), table_minor_axis));
        if (opts.exact_only)
            return;

        BemOptions serial = opts.bem;
        serial.workers = 1;
        const unsigned workers = std::max(1u, std::min(opts.workers, unsigned(table3_count)));
        auto job = [&](unsigned w) {
            for (int k = int(w); k < table3_count; k += int(workers))
                rows_[std::size_t(k)].computed =
                    bem_table_energies(Ellipse(table_a(k), table_minor_axis), opts.level, serial);
        };
        if (workers == 1) {
            job(0);
        } else {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back(job, w);
        }
    }

    const TableOptions& options() const noexcept { return opts_; }
    bool has_computed() const noexcept { return !opts_.exact_only; }
    const TableEnergies& at(int k) const { return rows_.at(std::size_t(k)); }

    /// max_k |computed - exact| / |exact| for density i, over all 21 geometries.
    double max_relative_error(std::size_t i) const
    {
        double worst = 0.0;
        for (const auto& r : rows_)
            if (r.computed)
                worst = std::max(worst, std::abs((*r.computed)[i] - r.exact[i]) / std::abs(r.exact[i]));
        return worst;
    }

private:
    TableOptions opts_;
    std::vector<TableEnergies> rows_;
};

// ---- output ------------------------------------------------------------------

/// Long-form CSV: one line per (table, quantity, a).
inline void write_tables_csv(std::ostream& out, const TableData& data)
{
    out << "table,quantity,a,b,exact,computed,relative_error\n";
    auto line = [&](int table, std::size_t i, int k) {
        const auto& r = data.at(k);
        out << table << ',' << table_row_names[i] << ',' << format_full(table_a(k)) << ','
            << format_full(table_minor_axis) << ',' << format_full(r.exact[i]) << ',';
        if (r.computed)
            out << format_full((*r.computed)[i]) << ','
                << format_full(std::abs((*r.computed)[i] - r.exact[i]) / std::abs(r.exact[i]));
        else
            out << ',';
        out << '\n';
    };
    for (std::size_t i = 0; i < 3; ++i)
        for (int k : table1_indices)
            line(1, i, k);
    for (int k : table2_indices)
        line(2, 3, k);
    if (data.has_computed())
        for (std::size_t i = 0; i < 4; ++i) {
            out << 3 << ',' << table_row_names[i] << ",,";
            out << format_full(table_minor_axis) << ",,," << format_full(data.max_relative_error(i)) << '\n';
        }
}

/// Exact row of Table 1 for density i, as printed (4 decimals, scaled).
inline std::vector<std::string> table1_exact_cells(const TableData& data, std::size_t i, Rounding mode)
{
    std::vector<std::string> cells;
    for (int k : table1_indices)
        cells.push_back(format_fixed(data.at(k).exact[i] * table1_scales[i], 4, mode));
    return cells;
}

inline std::vector<std::string> table2_exact_cells(const TableData& data, Rounding mode)
{
    std::vector<std::string> cells;
    for (int k : table2_indices)
        cells.push_back(format_fixed(data.at(k).exact[3], 4, mode));
    return cells;
}

namespace detail {

inline void text_row(std::ostream& out, const std::string& label, const std::vector<std::string>& cells)
{
    std::string line = label;
    line.resize(std::max<std::size_t>(line.size(), 26), ' ');
    for (const auto& c : cells) {
        std::string cell = c;
        if (cell.size() < 9)
            cell.insert(0, 9 - cell.size(), ' ');
        line += cell;
    }
    out << line << '\n';
}

}  // namespace detail

inline void write_tables_text(std::ostream& out, const TableData& data, Rounding mode)
{
    auto a_row = [&](const auto& indices) {
        std::vector<std::string> cells;
        for (int k : indices)
            cells.push_back(format_fixed(table_a(k), 2, Rounding::half_even));
        return cells;
    };

    out << "Table 1: energies of 1, x1, x2 on the ellipse with b = 0.5\n";
    detail::text_row(out, "a", a_row(table1_indices));
    for (std::size_t i = 0; i < 3; ++i) {
        const std::string name = std::string(table_row_names[i]) + table1_scale_labels[i];
        if (data.has_computed()) {
            std::vector<std::string> cells;
            for (int k : table1_indices)
                cells.push_back(format_fixed((*data.at(k).computed)[i] * table1_scales[i], 4, mode));
            detail::text_row(out, name + " comp", cells);
        }
        detail::text_row(out, name + " exact", table1_exact_cells(data, i, mode));
    }

    out << "\nTable 2: energy of x1 + 2 x2 + 3 on the ellipse with b = 0.5\n";
    detail::text_row(out, "a", a_row(table2_indices));
    if (data.has_computed()) {
        std::vector<std::string> cells;
        for (int k : table2_indices)
            cells.push_back(format_fixed((*data.at(k).computed)[3], 4, mode));
        detail::text_row(out, "I_sigma comp", cells);
    }
    detail::text_row(out, "I_sigma exact", table2_exact_cells(data, mode));

    if (data.has_computed()) {
        out << "\nTable 3: max relative error (per mil), b = 0.5, a = 0.5:0.05:1.5, level "
            << data.options().level << "\n";
        std::vector<std::string> names, cells;
        for (std::size_t i = 0; i < 4; ++i) {
            names.emplace_back(table_row_names[i]);
            cells.push_back(format_fixed(1e3 * data.max_relative_error(i), 4, Rounding::half_even));
        }
        detail::text_row(out, "", names);
        detail::text_row(out, "eps_rel", cells);
    }
}

}  // namespace ellipstat
