#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qgeom/deformation.hpp"
#include "qgeom/envelope_sections.hpp"
#include "qgeom/io.hpp"
#include "qgeom/verify.hpp"

using namespace qgeom;
using io::Json;

namespace {

struct Options {
    std::string connection, path, chain, envelope, germ, matrices, csv_file;
    std::string out = "json";
    std::string pole, x, o, z, anchor, function = "exp";
    std::string suite = "all", fixtures = QGEOM_FIXTURE_DIR;
    double tol = 1e-10;
    int order = 0;
    int samples = 0;
    std::uint64_t seed = 20240607;
};

struct Output {
    Json json;
    std::string csv;
};

void require(const std::string& value, const char* flag) {
    if (value.empty()) throw ValidationError(std::string(flag) + ": required for this command");
}

std::string csv_block(const std::vector<Complex>& zs, const std::vector<Matrix>& ms) {
    std::string out = io::csv_header(static_cast<int>(ms.front().rows()), static_cast<int>(ms.front().cols())) + "\n";
    for (std::size_t k = 0; k < zs.size(); ++k) out += io::csv_row(zs[k], ms[k]) + "\n";
    return out;
}

Output run_transport(const Options& opt) {
    require(opt.connection, "--connection");
    require(opt.path, "--path");
    const GaugePotential phi = io::read_connection(opt.connection);
    const ComplexPath path = io::read_path(opt.path);
    const int n = phi.dimension();
    Matrix init = Matrix::Identity(n, n);
    GermKind kind = GermKind::fundamental;
    if (!opt.germ.empty()) {
        init = io::matrix_from_json(io::read_json_file(opt.germ), "germ");
        if (!phi.algebra().contains(init)) throw ValidationError("germ: not in the connection's algebra");
        kind = GermKind::adjoint;
    } else {
        GroupElement check(init);
    }
    const PotentialField field = PotentialField::of(phi);
    require_clear_path(path, field.punctures);
    const TransportedSection section(field, path, init, kind, TransportOptions{opt.tol});
    Output out;
    out.json = {{"kind", kind == GermKind::adjoint ? "adjoint" : "fundamental"},
                {"end_value", io::to_json(section.end_value())},
                {"determinant", io::to_json(section.end_value().determinant())},
                {"flatness_residual", section.flatness_residual()},
                {"steps", section.steps()}};
    const int samples = std::max(opt.samples, 2);
    std::vector<Complex> zs;
    std::vector<Matrix> ms;
    for (int k = 0; k < samples; ++k) {
        const double t = static_cast<double>(k) / (samples - 1);
        zs.push_back(path.eval(t).point);
        ms.push_back(section.value(t));
    }
    out.csv = csv_block(zs, ms);
    return out;
}

Output run_monodromy(const Options& opt) {
    require(opt.connection, "--connection");
    const GaugePotential phi = io::read_connection(opt.connection);
    Output out;
    if (!opt.path.empty()) {
        const ComplexPath loop = io::read_path(opt.path);
        const Matrix m = monodromy(phi, loop, opt.tol).matrix();
        out.json = {{"monodromy", io::to_json(m)}, {"determinant", io::to_json(m.determinant())}};
        out.csv = csv_block({loop.start()}, {m});
        return out;
    }
    const CompositeMonodromy c = composite_monodromy(phi, opt.tol);
    Json loops = Json::array();
    std::vector<Complex> zs;
    std::vector<Matrix> ms;
    for (const auto& loop : c.loops) {
        loops.push_back({{"pole", io::to_json(loop.pole)},
                         {"monodromy", io::to_json(loop.monodromy)},
                         {"determinant", io::to_json(loop.monodromy.determinant())}});
        zs.push_back(loop.pole);
        ms.push_back(loop.monodromy);
    }
    const int n = phi.dimension();
    out.json = {{"basepoint", io::to_json(c.basepoint)},
                {"loops", std::move(loops)},
                {"product", io::to_json(c.product)},
                {"relation_defect", (c.product - Matrix::Identity(n, n)).norm()}};
    out.csv = zs.empty() ? io::csv_header(n, n) + "\n" : csv_block(zs, ms);
    return out;
}

Output run_regint(const Options& opt) {
    require(opt.z, "--z");
    const Complex p = opt.pole.empty() ? Complex(0.0) : io::parse_complex(opt.pole, "--pole");
    const Complex z = io::parse_complex(opt.z, "--z");
    if (opt.order < 0) throw ValidationError("--order: must be non-negative");
    std::function<Complex(Complex)> f;
    if (opt.function == "exp") f = [p](Complex x) { return std::exp(x - p); };
    else if (opt.function == "one") f = [](Complex) { return Complex(1.0); };
    else if (opt.function == "linear") f = [p](Complex x) { return x - p; };
    else if (opt.function == "square") f = [p](Complex x) { return (x - p) * (x - p); };
    else throw ValidationError("--function: expected exp, one, linear or square");
    const ComplexPath path = opt.path.empty() ? ComplexPath::segment(p, z) : io::read_path(opt.path);
    const RegularizedIntegrator integrator(
        RegIntegralSpec{AnalyticFunction::scalar(f), p, z, opt.order, path, {}, {}, std::min(opt.tol, 1e-13)});
    Output out;
    const Matrix value = integrator.value();
    out.json = {{"function", opt.function}, {"pole", io::to_json(p)}, {"z", io::to_json(z)},
                {"order", opt.order}, {"value", io::to_json(value(0, 0))}};
    out.csv = csv_block({z}, {value});
    return out;
}

Output run_boundary(const Options& opt) {
    require(opt.connection, "--connection");
    require(opt.chain, "--chain");
    const GaugePotential phi = io::read_connection(opt.connection);
    const QuantumTrajectory gamma = io::chain_from_json(io::read_json_file(opt.chain), phi);
    const BoundaryReport report = boundary_1(gamma, opt.tol);
    Output out;
    out.json = io::to_json(report);
    std::vector<Complex> zs;
    std::vector<Matrix> ms;
    for (const auto& t : report.divisor.terms()) {
        zs.push_back(t.point);
        ms.push_back(t.coefficient);
    }
    const int n = phi.dimension();
    out.csv = zs.empty() ? io::csv_header(n, n) + "\n" : csv_block(zs, ms);
    return out;
}

Output run_deform(const Options& opt) {
    require(opt.connection, "--connection");
    require(opt.chain, "--chain");
    require(opt.x, "--x");
    const GaugePotential phi = io::read_connection(opt.connection);
    const QuantumTrajectory gamma = io::chain_from_json(io::read_json_file(opt.chain), phi);
    const Complex x = io::parse_complex(opt.x, "--x");
    const Complex o = opt.o.empty() ? Complex(0.0, 3.0) : io::parse_complex(opt.o, "--o");
    const DeformationPotentialField field(gamma, o, opt.tol);
    const Matrix f = field.value(x), df = field.derivative(x), dir = field.direction(x);
    Output out;
    out.json = {{"x", io::to_json(x)},
                {"o", io::to_json(o)},
                {"potential", io::to_json(f)},
                {"derivative", io::to_json(df)},
                {"direction", io::to_json(dir)},
                {"cycle_residual", field.cycle_residual()}};
    out.csv = csv_block({x}, {dir});
    return out;
}

Output run_envelope(const Options& opt) {
    require(opt.envelope, "--envelope");
    io::EnvelopeFixture fx = io::read_envelope(opt.envelope);
    if (!opt.anchor.empty()) fx.spec.anchor_pole = io::parse_complex(opt.anchor, "--anchor");
    if (!opt.z.empty()) fx.spec.z_targets = {io::parse_complex(opt.z, "--z")};
    if (fx.spec.z_targets.empty()) throw ValidationError("z_targets: no target points");
    Json rows = Json::array();
    std::vector<Matrix> values;
    for (const Complex& z : fx.spec.z_targets) {
        const EnvelopeEvaluation ev = evaluate_envelope(fx.spec, z, opt.tol);
        rows.push_back({{"z", io::to_json(z)},
                        {"envelope", io::to_json(ev.value)},
                        {"transported", io::to_json(ev.transported)},
                        {"gate", {{"slope", ev.gate.slope},
                                  {"exponent", ev.gate.exponent},
                                  {"integrand_order", ev.gate.integrand_order},
                                  {"monodromy_defect", ev.gate.monodromy_defect}}}});
        values.push_back(ev.value);
    }
    Output out;
    out.json = {{"anchor_pole", io::to_json(fx.spec.anchor_pole)}, {"targets", std::move(rows)}};
    out.csv = csv_block(fx.spec.z_targets, values);
    return out;
}

Output run_commutant(const Options& opt) {
    std::vector<GroupElement> ms;
    int n = 0;
    if (!opt.matrices.empty()) {
        const Json j = io::read_json_file(opt.matrices);
        if (!j.is_array()) throw ValidationError("matrices: expected an array of matrices");
        for (std::size_t k = 0; k < j.size(); ++k)
            ms.emplace_back(io::matrix_from_json(j[k], "matrices[" + std::to_string(k) + "]"));
        if (ms.empty()) throw ValidationError("matrices: empty list");
        n = ms.front().dimension();
    } else {
        require(opt.connection, "--connection or --matrices");
        const GaugePotential phi = io::read_connection(opt.connection);
        for (const auto& loop : composite_monodromy(phi, opt.tol).loops) ms.emplace_back(loop.monodromy);
        n = phi.dimension();
    }
    const auto basis = joint_commutant(ms, n);
    Json out_basis = Json::array();
    std::vector<Complex> zs;
    std::vector<Matrix> values;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        out_basis.push_back(io::to_json(basis[k].matrix()));
        zs.emplace_back(static_cast<double>(k), 0.0);
        values.push_back(basis[k].matrix());
    }
    Output out;
    out.json = {{"dimension", basis.size()}, {"basis", std::move(out_basis)}};
    out.csv = basis.empty() ? io::csv_header(n, n) + "\n" : csv_block(zs, values);
    return out;
}

int run_verify_command(const Options& opt) {
    const auto results = run_verify(VerifyConfig{opt.fixtures, opt.suite, opt.seed, opt.tol});
    Json props = Json::array();
    Json failed = Json::array();
    for (const auto& r : results) {
        Json entry = {{"suite", r.suite}, {"name", r.name}, {"passed", r.passed},
                      {"value", r.value}, {"threshold", r.threshold}};
        if (r.diagnostic) entry["diagnostic"] = true;
        if (!r.detail.empty()) entry["detail"] = r.detail;
        props.push_back(std::move(entry));
        if (!r.passed && !r.diagnostic) failed.push_back(r.suite + "." + r.name);
    }
    const Json doc = {{"suite", opt.suite}, {"seed", opt.seed}, {"properties", std::move(props)},
                      {"failed", failed}, {"ok", failed.empty()}};
    std::cout << doc.dump(2) << "\n";
    for (const auto& name : failed) std::cerr << "FAILED " << name.get<std::string>() << "\n";
    return failed.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flat sections, regularised integrals and quantum homology on the Riemann sphere"};
    app.require_subcommand(1);
    Options opt;

    auto common = [&](CLI::App* cmd) {
        cmd->add_option("--tol", opt.tol, "Transport / quadrature tolerance")->check(CLI::PositiveNumber);
        cmd->add_option("--out", opt.out, "Output format")->check(CLI::IsMember({"json", "csv"}));
        cmd->add_option("--csv", opt.csv_file, "Also write CSV rows to this file");
        cmd->add_option("--seed", opt.seed, "Seed for randomised properties");
    };

    auto* transport = app.add_subcommand("transport", "Transport a flat section along a path");
    transport->add_option("--connection", opt.connection, "Connection JSON");
    transport->add_option("--path", opt.path, "Path JSON");
    transport->add_option("--germ", opt.germ, "Adjoint germ at the path start (matrix JSON)");
    transport->add_option("--samples", opt.samples, "CSV sample count along the path");
    common(transport);

    auto* mono = app.add_subcommand("monodromy", "Monodromy of a loop, or of based loops around all poles");
    mono->add_option("--connection", opt.connection, "Connection JSON");
    mono->add_option("--path", opt.path, "Closed loop JSON");
    common(mono);

    auto* regint = app.add_subcommand("regint", "Regularised integral of f / (zeta - p)^(d+1)");
    regint->add_option("--pole", opt.pole, "Singular endpoint p as re,im");
    regint->add_option("--z", opt.z, "Regular endpoint as re,im");
    regint->add_option("--order", opt.order, "Order d");
    regint->add_option("--function", opt.function, "exp, one, linear or square (in zeta - p)");
    regint->add_option("--path", opt.path, "Path from p to z (default: straight segment)");
    common(regint);

    auto* boundary = app.add_subcommand("boundary", "Boundary divisor of a chain");
    boundary->add_option("--connection", opt.connection, "Connection JSON");
    boundary->add_option("--chain", opt.chain, "Chain JSON");
    common(boundary);

    auto* deform = app.add_subcommand("deform", "Deformation potential and direction of a cycle");
    deform->add_option("--connection", opt.connection, "Connection JSON");
    deform->add_option("--chain", opt.chain, "Closed chain JSON");
    deform->add_option("--x", opt.x, "Evaluation point as re,im");
    deform->add_option("--o", opt.o, "Reference point as re,im");
    common(deform);

    auto* envelope = app.add_subcommand("envelope", "Envelope sections over a z grid");
    envelope->add_option("--envelope", opt.envelope, "Envelope set-up JSON");
    envelope->add_option("--anchor", opt.anchor, "Anchor pole as re,im (overrides the file)");
    envelope->add_option("--z", opt.z, "Single target as re,im (overrides the file)");
    common(envelope);

    auto* commutant = app.add_subcommand("commutant", "Joint commutant of monodromies or given matrices");
    commutant->add_option("--connection", opt.connection, "Connection JSON");
    commutant->add_option("--matrices", opt.matrices, "JSON array of matrices");
    common(commutant);

    auto* verify = app.add_subcommand("verify", "Run the invariant suite on fixtures");
    verify->add_option("--suite", opt.suite, "Suite name or all");
    verify->add_option("--fixtures", opt.fixtures, "Fixture directory");
    common(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (verify->parsed()) return run_verify_command(opt);
        Output out;
        if (transport->parsed()) out = run_transport(opt);
        else if (mono->parsed()) out = run_monodromy(opt);
        else if (regint->parsed()) out = run_regint(opt);
        else if (boundary->parsed()) out = run_boundary(opt);
        else if (deform->parsed()) out = run_deform(opt);
        else if (envelope->parsed()) out = run_envelope(opt);
        else out = run_commutant(opt);

        if (!opt.csv_file.empty()) {
            std::ofstream csv(opt.csv_file);
            if (!csv) throw ValidationError("--csv: cannot write " + opt.csv_file);
            csv << out.csv;
        }
        if (opt.out == "csv") std::cout << out.csv;
        else std::cout << out.json.dump(2) << "\n";
        return 0;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
