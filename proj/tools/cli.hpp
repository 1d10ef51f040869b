#pragma once

// Command-line front end.  run() takes the argument vector and the two output
// streams so the tests can drive it in-process.

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ellipstat/ellipstat.hpp"

namespace ellipstat::cli {

enum ExitCode { exit_ok = 0, exit_usage = 1, exit_numerical = 2 };

class UsageError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

enum class Format { csv, jsonl, text };

inline Format parse_format(const std::string& s)
{
    if (s == "csv") return Format::csv;
    if (s == "jsonl") return Format::jsonl;
    return Format::text;
}

/// Writes to --out when given, otherwise to the supplied stream.
class Sink
{
public:
    Sink(const std::string& path, std::ostream& fallback) : out_(&fallback)
    {
        if (path.empty())
            return;
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
        if (!*file_)
            throw UsageError("cannot open output file: " + path);
        out_ = file_.get();
    }
    std::ostream& stream() { return *out_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* out_;
};

struct DensityFlags
{
    std::vector<std::string> alpha;
    std::vector<std::string> sigma;
    std::vector<std::string> named;

    std::vector<DensitySpec> resolve() const
    {
        std::vector<DensitySpec> out;
        for (const auto& s : alpha) {
            std::array<double, 3> c{};
            std::stringstream ss(s);
            std::string tok;
            std::size_t n = 0;
            while (std::getline(ss, tok, ',')) {
                if (n == 3)
                    throw UsageError("--alpha takes exactly three values");
                std::size_t used = 0;
                try {
                    c[n] = std::stod(tok, &used);
                } catch (const std::exception&) {
                    throw UsageError("bad --alpha value: " + s);
                }
                if (used != tok.size())
                    throw UsageError("bad --alpha value: " + s);
                ++n;
            }
            if (n != 3)
                throw UsageError("--alpha takes exactly three values");
            out.push_back(alpha_density(c));
        }
        for (const auto& s : sigma)
            out.push_back(parse_sigma(s));
        for (const auto& s : named)
            out.push_back(named_density(s));
        if (out.empty())
            out.push_back(named_density("one"));
        return out;
    }
};

inline void add_density_flags(CLI::App* cmd, DensityFlags& d)
{
    cmd->add_option("--alpha", d.alpha, "alpha0,alpha1,alpha2 for sigma = alpha0 + alpha1 x1/a + alpha2 x2/b")
        ->take_all();
    cmd->add_option("--sigma", d.sigma, "monomial density, e.g. \"3 + x1 + 2*x2\"")->take_all();
    cmd->add_option("--density", d.named, "one, x1 or x2")
        ->check(CLI::IsMember({"one", "x1", "x2"}))
        ->take_all();
}

struct QuadratureFlags
{
    int truncation = 30;
    int level = 4;
    int q = BemOptions{}.q;
    int q_sing = BemOptions{}.q_sing;
    unsigned workers = 1;
    CLI::Option* truncation_opt = nullptr;
    CLI::Option* level_opt = nullptr;
    CLI::Option* q_opt = nullptr;
    CLI::Option* q_sing_opt = nullptr;

    BemOptions bem() const
    {
        BemOptions o;
        o.q = q;
        o.q_sing = q_sing;
        o.workers = workers;
        return o;
    }
};

inline void add_quadrature_flags(CLI::App* cmd, QuadratureFlags& f, bool with_level)
{
    f.truncation_opt = cmd->add_option("-N", f.truncation, "spectral truncation degree")->check(CLI::NonNegativeNumber);
    if (with_level)
        f.level_opt = cmd->add_option("--level", f.level, "mesh refinement level")->check(CLI::Range(0, 12));
    f.q_opt = cmd->add_option("--q", f.q, "Gauss order for separated triangle pairs")->check(CLI::PositiveNumber);
    f.q_sing_opt = cmd->add_option("--q-sing", f.q_sing, "Gauss order of the singular transforms")
                       ->check(CLI::PositiveNumber);
    cmd->add_option("--workers", f.workers, "worker threads")->check(CLI::Range(1u, 256u));
}

inline MethodParameters parameters_for(Method m, const QuadratureFlags& f)
{
    MethodParameters p;
    if (m == Method::spectral)
        p.truncation = f.truncation;
    if (m == Method::bem) {
        p.level = f.level;
        p.q = f.q;
        p.q_sing = f.q_sing;
    }
    return p;
}

inline void check_method_flags(const std::vector<Method>& methods, const QuadratureFlags& f)
{
    auto uses = [&](Method m) { return std::find(methods.begin(), methods.end(), m) != methods.end(); };
    if (f.truncation_opt->count() && !uses(Method::spectral))
        throw UsageError("-N applies only to --method spectral");
    const bool bem_flag = (f.level_opt && f.level_opt->count()) || f.q_opt->count() || f.q_sing_opt->count();
    if (bem_flag && !uses(Method::bem))
        throw UsageError("--level, --q and --q-sing apply only to --method bem");
}

class ReportWriter
{
public:
    ReportWriter(std::ostream& out, Format fmt, bool rounded) : out_(out), fmt_(fmt), rounded_(rounded) {}

    void write(const EnergyReport& r)
    {
        if (fmt_ == Format::csv) {
            if (first_)
                write_csv_header(out_);
            write_csv_row(out_, r, rounded_);
        } else if (fmt_ == Format::jsonl) {
            write_jsonl(out_, r);
        } else {
            write_text(r);
        }
        first_ = false;
    }

private:
    void write_text(const EnergyReport& r)
    {
        out_ << to_string(r.method) << "  a=" << format_full(r.a) << "  b=" << format_full(r.b) << "  sigma="
             << r.density.description << " (" << to_string(r.density.convention) << ")";
        if (r.parameters.truncation)
            out_ << "  N=" << *r.parameters.truncation;
        if (r.parameters.level)
            out_ << "  level=" << *r.parameters.level << "  q=" << *r.parameters.q << "  q_sing=" << *r.parameters.q_sing;
        out_ << "  energy=" << format_full(r.value);
        if (r.relative_error)
            out_ << "  rel_err=" << format_full(*r.relative_error);
        out_ << '\n';
    }

    std::ostream& out_;
    Format fmt_;
    bool rounded_;
    bool first_ = true;
};

// ---- energy ----------------------------------------------------------------

struct EnergyArgs
{
    std::vector<double> a, b;
    std::vector<std::string> methods{"analytic"};
    DensityFlags density;
    QuadratureFlags quad;
    std::string format = "csv";
    std::string out;
    bool rounded = false;
};

/// R^3 (alpha0^2 I_0 + (alpha1^2 + alpha2^2) I_c) on a circle of radius R.
class OracleValues
{
public:
    double energy(double radius, const AffineDensity& d)
    {
        if (!constant_) {
            constant_ = i_sigma0_circle_quadrature().value;
            linear_ = i_c_semianalytic().value;
        }
        return radius * radius * radius *
               (d.alpha0 * d.alpha0 * *constant_ + (d.alpha1 * d.alpha1 + d.alpha2 * d.alpha2) * *linear_);
    }

private:
    std::optional<double> constant_, linear_;
};

inline int cmd_energy(const EnergyArgs& args, std::ostream& stdout_)
{
    std::vector<Method> methods;
    for (const auto& m : args.methods)
        methods.push_back(parse_method(m));
    check_method_flags(methods, args.quad);
    const auto densities = args.density.resolve();

    std::vector<Ellipse> geometries;
    for (double a : args.a)
        for (double b : args.b) {
            try {
                geometries.emplace_back(a, b);
            } catch (const DomainError& e) {
                throw UsageError(e.what());
            }
        }
    for (Method m : methods)
        if (m == Method::oracle)
            for (const auto& e : geometries)
                if (e.a() != e.b())
                    throw UsageError("--method oracle is only available for circles (a == b)");

    Sink sink(args.out, stdout_);
    ReportWriter writer(sink.stream(), parse_format(args.format), args.rounded);
    OracleValues oracle;
    for (Method m : methods)
        for (const auto& e : geometries) {
            std::optional<TriangleMesh> mesh;
            std::optional<EnergyMatrix> matrix;
            if (m == Method::bem) {
                mesh = generate(e, args.quad.level);
                matrix = assemble(*mesh, args.quad.bem());
            }
            for (const auto& spec : densities) {
                const AffineDensity d = spec.normalized(e);
                EnergyReport r;
                r.method = m;
                r.a = e.a();
                r.b = e.b();
                r.density = spec;
                r.parameters = parameters_for(m, args.quad);
                switch (m) {
                case Method::analytic: r.value = analytic_energy(e, d); break;
                case Method::spectral: r.value = spectral_energy(e, d, args.quad.truncation); break;
                case Method::bem: r.value = bem_energy(*matrix, *mesh, d); break;
                case Method::oracle: r.value = oracle.energy(e.a(), d); break;
                }
                if (m != Method::analytic)
                    r.set_reference(analytic_energy(e, d));
                writer.write(r);
            }
        }
    return exit_ok;
}

// ---- tables ----------------------------------------------------------------

struct TablesArgs
{
    bool exact_only = false;
    QuadratureFlags quad{.level = 5};
    std::string format = "text";
    std::string rounding = "truncate";
    std::string out;
    std::string csv;
};

inline int cmd_tables(const TablesArgs& args, std::ostream& stdout_)
{
    if (args.quad.truncation_opt->count())
        throw UsageError("-N does not apply to tables");
    if (args.exact_only && (args.quad.level_opt->count() || args.quad.q_opt->count() || args.quad.q_sing_opt->count()))
        throw UsageError("--level, --q and --q-sing need the computed rows (drop --exact-only)");
    if (args.format == "jsonl")
        throw UsageError("tables support --format text or csv");

    TableOptions opts;
    opts.exact_only = args.exact_only;
    opts.level = args.quad.level;
    opts.bem = args.quad.bem();
    opts.workers = args.quad.workers;
    const TableData data(opts);
    const Rounding mode = parse_rounding(args.rounding);

    Sink sink(args.out, stdout_);
    if (args.format == "csv")
        write_tables_csv(sink.stream(), data);
    else
        write_tables_text(sink.stream(), data, mode);
    if (!args.csv.empty()) {
        Sink extra(args.csv, stdout_);
        write_tables_csv(extra.stream(), data);
    }
    return exit_ok;
}

// ---- convergence -------------------------------------------------------------

struct ConvergenceArgs
{
    double a = 1.0;
    double b = 1.0;
    std::string method;
    DensityFlags density;
    QuadratureFlags quad;
    std::optional<int> from, to;
    std::string format = "csv";
    std::string out;
    bool rounded = false;
};

inline int cmd_convergence(const ConvergenceArgs& args, std::ostream& stdout_)
{
    const Method m = parse_method(args.method);
    if (m != Method::spectral && m != Method::bem)
        throw UsageError("convergence studies need --method spectral or bem");
    if (args.quad.truncation_opt->count())
        throw UsageError("-N is swept by --from/--to");
    if ((args.quad.q_opt->count() || args.quad.q_sing_opt->count()) && m != Method::bem)
        throw UsageError("--q and --q-sing apply only to --method bem");

    const int from = args.from.value_or(0);
    const int to = args.to.value_or(m == Method::spectral ? 30 : 4);
    if (from < 0 || to < from)
        throw UsageError("empty sweep range");

    std::optional<Ellipse> eo;
    try {
        eo.emplace(args.a, args.b);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    const Ellipse e = *eo;
    const auto densities = args.density.resolve();

    Sink sink(args.out, stdout_);
    ReportWriter writer(sink.stream(), parse_format(args.format), args.rounded);
    QuadratureFlags q = args.quad;
    for (int p = from; p <= to; ++p) {
        std::optional<TriangleMesh> mesh;
        std::optional<EnergyMatrix> matrix;
        if (m == Method::bem) {
            q.level = p;
            mesh = generate(e, p);
            matrix = assemble(*mesh, q.bem());
        } else {
            q.truncation = p;
        }
        for (const auto& spec : densities) {
            const AffineDensity d = spec.normalized(e);
            EnergyReport r;
            r.method = m;
            r.a = e.a();
            r.b = e.b();
            r.density = spec;
            r.parameters = parameters_for(m, q);
            r.value = m == Method::bem ? bem_energy(*matrix, *mesh, d) : spectral_energy(e, d, p);
            r.set_reference(analytic_energy(e, d));
            writer.write(r);
        }
    }
    return exit_ok;
}

// ---- mesh ------------------------------------------------------------------

struct MeshArgs
{
    std::optional<double> a, b;
    std::optional<int> level;
    std::string input;
    std::string out;
};

inline int cmd_mesh(const MeshArgs& args, std::ostream& stdout_)
{
    if (!args.input.empty()) {
        if (args.a || args.b || args.level)
            throw UsageError("--input cannot be combined with -a, -b or --level");
        std::ifstream in(args.input, std::ios::binary);
        if (!in)
            throw UsageError("cannot open mesh file: " + args.input);
        const TriangleMesh m = read_mesh(in);
        Sink sink(args.out, stdout_);
        sink.stream() << "valid mesh: " << m.node_count() << " nodes, " << m.triangle_count() << " triangles, "
                      << m.boundary_count() << " boundary nodes, area " << format_full(mesh_area(m)) << '\n';
        return exit_ok;
    }
    if (!args.a || !args.b || !args.level)
        throw UsageError("mesh generation needs -a, -b and --level (or --input FILE to validate)");
    std::optional<Ellipse> e;
    try {
        e.emplace(*args.a, *args.b);
    } catch (const DomainError& err) {
        throw UsageError(err.what());
    }
    const TriangleMesh m = generate(*e, *args.level);
    Sink sink(args.out, stdout_);
    write_mesh(m, sink.stream());
    return exit_ok;
}

// ---- entry point ---------------------------------------------------------------

inline int run(std::vector<std::string> argv, std::ostream& stdout_, std::ostream& stderr_)
{
    CLI::App app{"Electrostatic energy of charged elliptical discs"};
    app.name("ellipstat");
    app.require_subcommand(1);

    EnergyArgs energy;
    auto* c_energy = app.add_subcommand("energy", "energy of affine densities by any route");
    c_energy->add_option("-a", energy.a, "semi-major axis (repeatable)")->required()->take_all();
    c_energy->add_option("-b", energy.b, "semi-minor axis (repeatable)")->required()->take_all();
    c_energy->add_option("--method", energy.methods, "analytic, spectral, bem or oracle")
        ->check(CLI::IsMember({"analytic", "spectral", "bem", "oracle"}))
        ->take_all();
    add_density_flags(c_energy, energy.density);
    add_quadrature_flags(c_energy, energy.quad, true);
    c_energy->add_option("--format", energy.format)->check(CLI::IsMember({"csv", "jsonl", "text"}));
    c_energy->add_option("--out", energy.out, "output file (default: stdout)");
    c_energy->add_flag("--rounded", energy.rounded, "10 significant digits in CSV");

    TablesArgs tables;
    auto* c_tables = app.add_subcommand("tables", "reproduce the b = 0.5 comparison tables");
    c_tables->add_flag("--exact-only", tables.exact_only, "skip the BEM rows and Table 3");
    add_quadrature_flags(c_tables, tables.quad, true);
    c_tables->add_option("--format", tables.format)->check(CLI::IsMember({"csv", "jsonl", "text"}));
    c_tables->add_option("--rounding", tables.rounding, "4-decimal rendering: truncate or half-even")
        ->check(CLI::IsMember({"truncate", "half-even"}));
    c_tables->add_option("--out", tables.out, "output file (default: stdout)");
    c_tables->add_option("--csv", tables.csv, "also write the long-form CSV here");

    ConvergenceArgs conv;
    auto* c_conv = app.add_subcommand("convergence", "sweep N or the refinement level");
    c_conv->add_option("-a", conv.a)->required();
    c_conv->add_option("-b", conv.b)->required();
    c_conv->add_option("--method", conv.method, "spectral or bem")
        ->required()
        ->check(CLI::IsMember({"analytic", "spectral", "bem", "oracle"}));
    add_density_flags(c_conv, conv.density);
    add_quadrature_flags(c_conv, conv.quad, false);
    c_conv->add_option("--from", conv.from, "first N or level (default 0)");
    c_conv->add_option("--to", conv.to, "last N or level (default 30 / 4)");
    c_conv->add_option("--format", conv.format)->check(CLI::IsMember({"csv", "jsonl", "text"}));
    c_conv->add_option("--out", conv.out, "output file (default: stdout)");
    c_conv->add_flag("--rounded", conv.rounded, "10 significant digits in CSV");

    MeshArgs mesh;
    auto* c_mesh = app.add_subcommand("mesh", "generate or validate a triangulation");
    c_mesh->add_option("-a", mesh.a);
    c_mesh->add_option("-b", mesh.b);
    c_mesh->add_option("--level", mesh.level)->check(CLI::Range(0, 12));
    c_mesh->add_option("--input", mesh.input, "mesh file to validate");
    c_mesh->add_option("--out", mesh.out, "output file (default: stdout)");

    std::reverse(argv.begin(), argv.end());
    try {
        app.parse(std::move(argv));
    } catch (const CLI::Success& e) {
        return app.exit(e, stdout_, stderr_);
    } catch (const CLI::ParseError& e) {
        app.exit(e, stdout_, stderr_);
        return exit_usage;
    }

    try {
        if (c_energy->parsed())
            return cmd_energy(energy, stdout_);
        if (c_tables->parsed())
            return cmd_tables(tables, stdout_);
        if (c_conv->parsed())
            return cmd_convergence(conv, stdout_);
        return cmd_mesh(mesh, stdout_);
    } catch (const UsageError& e) {
        stderr_ << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const ConfigurationError& e) {
        stderr_ << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const ParseError& e) {
        stderr_ << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const ValidationError& e) {
        stderr_ << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const DomainError& e) {
        stderr_ << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const ConvergenceError& e) {
        stderr_ << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::exception& e) {
        stderr_ << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    }
}

}  // namespace ellipstat::cli
