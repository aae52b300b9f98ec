#include "qgeom/verify.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <random>

#include <Eigen/LU>

#include "qgeom/deformation.hpp"
#include "qgeom/envelope_sections.hpp"
#include "qgeom/io.hpp"
#include "qgeom/reg_integral.hpp"

namespace qgeom {

namespace {

class Runner {
public:
    Runner(const VerifyConfig& config, std::vector<PropertyResult>& out) : config_(config), out_(out) {}

    /// Runs `body`, which returns the measured value; passes when value <= threshold
    /// (or >= threshold with at_least).
    void check(const std::string& suite, const std::string& name, double threshold,
               const std::function<double()>& body, bool at_least = false, bool diagnostic = false) {
        PropertyResult r{suite, name, false, 0.0, threshold, {}, diagnostic};
        try {
            r.value = body();
            r.passed = std::isfinite(r.value) && (at_least ? r.value >= threshold : r.value <= threshold);
        } catch (const std::exception& e) {
            r.value = std::nan("");
            r.detail = e.what();
        }
        out_.push_back(std::move(r));
    }

    std::string fixture(const std::string& name) const {
        return (std::filesystem::path(config_.fixtures_dir) / name).string();
    }

    double tol() const { return config_.tol; }
    std::uint64_t seed() const { return config_.seed; }

private:
    const VerifyConfig& config_;
    std::vector<PropertyResult>& out_;
};

double relative(const Matrix& a, const Matrix& b) {
    return (a - b).norm() / std::max(1.0, b.norm());
}

Matrix random_matrix(std::mt19937_64& rng, int n, bool traceless) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = Complex(u(rng), u(rng));
    if (traceless) m -= Matrix::Identity(n, n) * (m.trace() / static_cast<double>(n));
    return m;
}

/// dim of { E : M E = E M for all M } from the rank of the stacked map on
/// the elementary basis.
int commutant_dimension(const std::vector<Matrix>& ms, int n) {
    if (ms.empty()) return n * n;
    Matrix stacked(static_cast<Eigen::Index>(ms.size()) * n * n, n * n);
    for (int col = 0; col < n * n; ++col) {
        Matrix e = Matrix::Zero(n, n);
        e(col / n, col % n) = 1.0;
        for (std::size_t k = 0; k < ms.size(); ++k) {
            const Matrix c = ms[k] * e - e * ms[k];
            for (int r = 0; r < n * n; ++r)
                stacked(static_cast<Eigen::Index>(k) * n * n + r, col) = c(r / n, r % n);
        }
    }
    Eigen::FullPivLU<Matrix> lu(stacked);
    double scale = 0.0;
    for (const auto& m : ms) scale = std::max(scale, m.norm());
    if (lu.maxPivot() <= 1e-8 * scale) return n * n;
    lu.setThreshold(1e-8 * scale / lu.maxPivot());
    return n * n - static_cast<int>(lu.rank());
}

void transport_suite(Runner& run) {
    run.check("transport", "constant_potential_matches_exponential", 1e-9, [&] {
        const GaugePotential phi = io::read_connection(run.fixture("constant.json"));
        const Complex z0(0.0, 0.0), z1(1.0, 0.5);
        const auto result = transport_fundamental(phi, ComplexPath::segment(z0, z1),
                                                  GroupElement::identity(phi.dimension()), run.tol());
        return relative(result.end_value, matrix_exp(Matrix(phi.poly_tail()[0] * (z1 - z0))));
    });
    run.check("transport", "sl2_determinant_identity", 1e-8, [&] {
        const GaugePotential phi = io::read_connection(run.fixture("sl2_two_pole.json"));
        const ComplexPath path = io::read_path(run.fixture("path_upper.json"));
        const TransportedSection section(PotentialField::of(phi), path,
                                         Matrix::Identity(phi.dimension(), phi.dimension()),
                                         GermKind::fundamental, TransportOptions{run.tol()});
        double worst = 0.0;
        for (int k = 0; k <= 64; ++k)
            worst = std::max(worst, std::abs(section.value(k / 64.0).determinant() - 1.0));
        return worst;
    });
    run.check("transport", "adjoint_matches_conjugated_fundamental", 1e-8, [&] {
        const GaugePotential phi = io::read_connection(run.fixture("sl2_three_pole.json"));
        const ComplexPath path = io::read_path(run.fixture("path_upper.json"));
        const int n = phi.dimension();
        const Matrix g = transport_fundamental(phi, path, GroupElement::identity(n), run.tol()).end_value;
        std::mt19937_64 rng(run.seed());
        double worst = 0.0;
        for (int k = 0; k < 5; ++k) {
            const AdjointElement e(random_matrix(rng, n, true), phi.algebra());
            const Matrix w =
                transport_adjoint(phi, path, FlatSectionGerm::adjoint(path.start(), e), run.tol()).end_value;
            worst = std::max(worst, relative(w, adjoint_action(g, e.matrix())));
        }
        return worst;
    });
}

void monodromy_suite(Runner& run) {
    for (const char* name : {"sl2_two_pole", "sl2_three_pole"}) {
        run.check("monodromy", std::string("composite_relation_") + name, 1e-6, [&] {
            const GaugePotential phi = io::read_connection(run.fixture(std::string(name) + ".json"));
            const CompositeMonodromy c = composite_monodromy(phi, run.tol());
            return (c.product - Matrix::Identity(phi.dimension(), phi.dimension())).norm();
        });
    }
    run.check("monodromy", "loop_without_poles_is_identity", 1e-8, [&] {
        const GaugePotential phi = io::read_connection(run.fixture("sl2_three_pole.json"));
        const Matrix m = monodromy(phi, io::read_path(run.fixture("loop_empty.json")), run.tol()).matrix();
        return (m - Matrix::Identity(phi.dimension(), phi.dimension())).norm();
    });
    run.check("monodromy", "local_model_eigenvalues", 1e-6, [&] {
        const GaugePotential phi = io::read_connection(run.fixture("sl2_three_pole.json"));
        const ComplexPath loop = io::read_path(run.fixture("loop_minus_one.json"));
        const Matrix m = monodromy(phi, loop, run.tol()).matrix();
        const Matrix local = matrix_exp(Matrix(2.0 * kPi * kI * residue(phi, -1.0).matrix()));
        // 2x2: equal trace and determinant means equal spectra
        return std::max(std::abs(m.trace() - local.trace()),
                        std::abs(m.determinant() - local.determinant()));
    });
}

Complex exp_series_regint(Complex w, int d) {
    // sum_{k>d} w^{k-d}/((k-d) k!) - sum_{k<d} w^{-(d-k)}/((d-k) k!) + log(w)/d!
    Complex sum = std::log(w);
    double fact = 1.0;
    for (int k = 1; k <= d; ++k) fact *= k;
    sum /= fact;
    double kf = 1.0;
    for (int k = 0; k < 60; ++k) {
        if (k > 0) kf *= k;
        if (k < d) sum -= std::pow(w, -(d - k)) / (static_cast<double>(d - k) * kf);
        if (k > d) sum += std::pow(w, k - d) / (static_cast<double>(k - d) * kf);
    }
    return sum;
}

RegIntegralSpec exp_spec(Complex p, Complex z, int d) {
    return {AnalyticFunction::scalar([p](Complex x) { return std::exp(x - p); }), p, z, d,
            ComplexPath::segment(p, z), {}, {}, 1e-13};
}

void regint_suite(Runner& run) {
    const Complex p(0.2, -0.1), z(1.1, 0.6);
    for (int d = 0; d <= 2; ++d) {
        run.check("regint", "exp_series_d" + std::to_string(d), 1e-10, [&] {
            return std::abs(regularized_integral(exp_spec(p, z, d))(0, 0) - exp_series_regint(z - p, d));
        });
    }
    run.check("regint", "inert_on_vanishing_integrand", 1e-10, [&] {
        double worst = 0.0;
        for (int d = 0; d <= 2; ++d) {
            RegIntegralSpec spec{AnalyticFunction::scalar([p, d](Complex x) {
                                     return std::pow(x - p, d + 1) * std::exp(x - p);
                                 }),
                                 p, z, d, ComplexPath::segment(p, z), {}, {}, 1e-13};
            worst = std::max(worst, std::abs(regularized_integral(spec)(0, 0) -
                                             (std::exp(z - p) - 1.0)));
        }
        return worst;
    });
    run.check("regint", "envelope_limit_slope", 0.9, [&] {
        const RegularizedIntegrator integrator(exp_spec(p, z, 0));
        const Matrix value = integrator.value();
        std::vector<double> xs, ys;
        for (double s : {1e-3, 1e-2, 1e-1}) {
            xs.push_back(std::log(s));
            ys.push_back(std::log((integrator.family(p + s * (z - p) / std::abs(z - p)) - value).norm()));
        }
        const double mx = (xs[0] + xs[1] + xs[2]) / 3.0, my = (ys[0] + ys[1] + ys[2]) / 3.0;
        double num = 0.0, den = 0.0;
        for (int k = 0; k < 3; ++k) {
            num += (xs[k] - mx) * (ys[k] - my);
            den += (xs[k] - mx) * (xs[k] - mx);
        }
        return num / den;
    }, true);
    run.check("regint", "condition_residual_closed_form", 1e-6, [&] {
        const RegularizedIntegrator integrator(exp_spec(p, z, 0));
        double worst = 0.0;
        for (double s : {1e-3, 1e-2, 1e-1}) {
            const Complex q = p + s * (z - p) / std::abs(z - p);
            const Matrix closed = integrator.condition_closed_form(q);
            worst = std::max(worst, (integrator.condition_residual(q) - closed).norm() / closed.norm());
        }
        return worst;
    });
}

void homology_suite(Runner& run) {
    run.check("homology", "reference_chain_is_cycle", 1e-6, [&] {
        const GaugePotential phi = io::read_connection(run.fixture("sl2_two_pole.json"));
        const QuantumTrajectory gamma = io::chain_from_json(io::read_json_file(run.fixture("chain_trivial.json")), phi);
        return is_cycle(gamma, 1e-6, run.tol()).residual;
    });
    run.check("homology", "segment_chain_boundary", 1e-8, [&] {
        const GaugePotential phi = io::read_connection(run.fixture("sl2_two_pole.json"));
        const QuantumTrajectory gamma = io::chain_from_json(io::read_json_file(run.fixture("chain_segment.json")), phi);
        const Cell& cell = gamma.cells()[0];
        const Matrix end = transport_adjoint(phi, cell.path, cell.germ, run.tol()).end_value;
        QuantumDivisor expected;
        expected.add(cell.path.end(), end);
        expected.add(cell.path.start(), Matrix(-cell.germ.value));
        return boundary_1(gamma, run.tol()).divisor.distance(expected);
    });
    run.check("homology", "commutant_germ_trivial_cycle", 1e-6, [&] {
        const GaugePotential phi = io::read_connection(run.fixture("sl2_three_pole.json"));
        const ComplexPath loop = loop_around(-1.0, 0.5, 0.0, phi.punctures());
        const Matrix m = monodromy(phi, loop, run.tol()).matrix();
        const Matrix e = m - Matrix::Identity(2, 2) * (m.trace() / 2.0);
        const TrivialCycle c = trivial_cycle_around(phi, -1.0, 0.5, AdjointElement(e, phi.algebra()), run.tol());
        return std::max(c.commutation_residual, is_cycle(c.trajectory, 1e-6, run.tol()).residual);
    });
    run.check("homology", "non_commuting_germ_detected", 1e-2, [&] {
        const GaugePotential phi = io::read_connection(run.fixture("sl2_three_pole.json"));
        Matrix e(2, 2);
        e << 0.0, 1.0, 1.0, 0.0;
        const TrivialCycle c = trivial_cycle_around(phi, -1.0, 0.5, AdjointElement(e, phi.algebra()), run.tol());
        return is_cycle(c.trajectory, 1e-6, run.tol()).residual;
    }, true);
    run.check("homology", "subdivision_and_linearity", 1e-8, [&] {
        const GaugePotential phi = io::read_connection(run.fixture("sl2_three_pole.json"));
        std::mt19937_64 rng(run.seed() + 1);
        std::uniform_real_distribution<double> u(-1.8, 1.8);
        auto random_cell = [&] {
            while (true) {
                const Complex a(u(rng), u(rng)), b(u(rng), u(rng));
                const ComplexPath path = ComplexPath::segment(a, b);
                if (path.length() < 0.2 || min_distance_to_punctures(path, phi.punctures()) < 0.3) continue;
                return Cell{1.0, path, FlatSectionGerm::adjoint(a, AdjointElement(random_matrix(rng, 2, true), phi.algebra()))};
            }
        };
        double worst = 0.0;
        for (int k = 0; k < 3; ++k) {
            const QuantumTrajectory g1(phi, {random_cell()}), g2(phi, {random_cell()});
            const auto [a, b] = subdivide(g1, g1.cells()[0], 0.37, run.tol());
            const QuantumTrajectory split(phi, {a, b});
            worst = std::max(worst, boundary_1(split, run.tol()).divisor.distance(boundary_1(g1, run.tol()).divisor));
            const Complex s(0.7, -0.4), t(-1.3, 0.2);
            QuantumDivisor expected;
            expected.add(boundary_1(g1, run.tol()).divisor, s);
            expected.add(boundary_1(g2, run.tol()).divisor, t);
            worst = std::max(worst, boundary_1(g1.scaled(s) + g2.scaled(t), run.tol()).divisor.distance(expected));
        }
        return worst;
    });
}

void deformation_suite(Runner& run) {
    run.check("deformation", "central_residue_law", 1e-8, [&] {
        const GaugePotential phi = io::read_connection(run.fixture("sl2_two_pole.json"));
        const Complex c(0.4, -0.7);
        const ComplexPath loop = io::read_path(run.fixture("loop_minus_one.json"));
        const QuantumTrajectory gamma(phi, {Cell{1.0, loop, FlatSectionGerm::adjoint(loop.start(), AdjointElement::general(Matrix::Identity(2, 2) * c))}});
        const Complex o(0.0, 3.0);
        const Matrix inside = deformation_potential(gamma, Complex(-1.1, 0.1), o, run.tol());
        const Matrix outside = deformation_potential(gamma, Complex(0.5, 1.5), o, run.tol());
        return std::max((inside - 2.0 * kPi * kI * c * Matrix::Identity(2, 2)).norm(), outside.norm());
    });
    run.check("deformation", "contour_invariance", 1e-8, [&] {
        const GaugePotential phi = io::read_connection(run.fixture("sl2_two_pole.json"));
        const AdjointElement a = residue(phi, -1.0);
        auto circle = [&](double r) {
            const ComplexPath loop = loop_around(-1.0, r, 0.0, phi.punctures());
            return QuantumTrajectory(phi, {Cell{1.0, loop, FlatSectionGerm::adjoint(loop.start(), a)}});
        };
        const Complex o(0.0, 3.0);
        return std::max(homology_invariance_check(circle(0.4), circle(0.6), Complex(-1.1, 0.1), o, run.tol()),
                        homology_invariance_check(circle(0.4), circle(0.6), Complex(0.5, 1.5), o, run.tol()));
    });
    auto three_pole_cycle = [&] {
        const GaugePotential phi = io::read_connection(run.fixture("sl2_three_pole.json"));
        const ComplexPath loop = loop_around(-1.0, 0.5, 0.0, phi.punctures());
        const Matrix m = monodromy(phi, loop, run.tol()).matrix();
        const Matrix e = m - Matrix::Identity(2, 2) * (m.trace() / 2.0);
        return QuantumTrajectory(phi, {Cell{1.0, loop, FlatSectionGerm::adjoint(loop.start(), AdjointElement(e, phi.algebra()))}});
    };
    run.check("deformation", "reference_shift_spread", 1e-8, [&] {
        const std::vector<Complex> xs = {{-1.2, 0.1}, {-0.8, -0.2}, {0.3, 0.4}, {0.0, -1.0}, {1.5, 0.5}};
        return reference_shift_constant(three_pole_cycle(), Complex(0.0, 3.0), Complex(-2.5, -2.0), xs, run.tol()).spread;
    });
    run.check("deformation", "derivative_cauchy_vs_differences", 1e-6, [&] {
        const DeformationPotentialField field(three_pole_cycle(), Complex(0.0, 3.0), run.tol());
        const Complex x(-0.8, 0.1);
        const double h = 1e-3;
        const Matrix fd = (8.0 * (field.value(x + h) - field.value(x - h)) -
                           (field.value(x + 2.0 * h) - field.value(x - 2.0 * h))) / (12.0 * h);
        const Matrix cauchy = field.derivative(x);
        return (cauchy - fd).norm() / cauchy.norm();
    });
}

void envelope_suite(Runner& run) {
    auto load = [&] { return io::read_envelope(run.fixture("envelope.json")); };
    run.check("envelope", "offset_spread_over_grid", 1e-7, [&] {
        const auto fx = load();
        Matrix first;
        double spread = 0.0;
        for (const Complex& z : fx.spec.z_targets) {
            const EnvelopeEvaluation ev = evaluate_envelope(fx.spec, z, run.tol());
            const Matrix diff = ev.value - ev.transported;
            if (first.size() == 0) first = diff;
            spread = std::max(spread, (diff - first).norm());
        }
        return spread;
    });
    run.check("envelope", "boundary_is_z_times_element", 1e-8, [&] {
        const auto fx = load();
        double worst = 0.0;
        for (const Complex& z : fx.spec.z_targets) {
            const EnvelopeEvaluation ev = evaluate_envelope(fx.spec, z, run.tol());
            const AdjointElement mz(ev.transported, fx.spec.phi.algebra());
            const LocalizedTrajectory lt = localized_boundary_trajectory(fx.spec.phi, fx.spec.anchor_pole, z, mz, fx.spec.route, run.tol());
            QuantumDivisor expected;
            expected.add(z, ev.transported);
            worst = std::max(worst, boundary_1(lt.trajectory, run.tol()).divisor.distance(expected));
        }
        return worst;
    });
    run.check("envelope", "homotopic_route_independence", 1e-7, [&] {
        const auto fx = load();
        EnvelopeSectionSpec alt = fx.spec;
        alt.route = fx.alternate_route;
        const Complex z = fx.spec.z_targets.front();
        return (envelope_section(fx.spec, z, run.tol()) - envelope_section(alt, z, run.tol())).norm();
    });
    run.check("envelope", "residual_scan_decreasing", 0.0, [&] {
        const auto fx = load();
        const Complex z = fx.spec.z_targets.front(), p = fx.spec.anchor_pole;
        const auto scan = envelope_residual_scan(fx.spec, z, {p + 0.1 * (z - p), p + 0.03 * (z - p), p + 0.01 * (z - p)}, run.tol());
        double worst = -1.0;
        for (std::size_t k = 1; k < scan.size(); ++k) worst = std::max(worst, scan[k] - scan[k - 1]);
        return worst;
    });
    run.check("envelope", "flatness_relative", 1e-6, [&] {
        const auto fx = load();
        return envelope_flatness_residual(fx.spec, fx.spec.z_targets.front(), 0.05, run.tol());
    }, false, true);
}

void commutant_suite(Runner& run) {
    for (const char* name : {"sl2_two_pole", "sl2_three_pole"}) {
        run.check("commutant", std::string("monodromy_commutant_") + name, 0.0, [&] {
            const GaugePotential phi = io::read_connection(run.fixture(std::string(name) + ".json"));
            const CompositeMonodromy c = composite_monodromy(phi, run.tol());
            std::vector<GroupElement> gs;
            std::vector<Matrix> ms;
            for (const auto& loop : c.loops) {
                gs.emplace_back(loop.monodromy);
                ms.push_back(loop.monodromy);
            }
            const int n = phi.dimension();
            return std::abs(static_cast<double>(joint_commutant(gs, n).size()) - commutant_dimension(ms, n));
        });
    }
    run.check("commutant", "elementary_cases", 0.0, [&] {
        Matrix d(2, 2), swap(2, 2);
        d << 1.0, 0.0, 0.0, 2.0;
        swap << 0.0, 1.0, 1.0, 0.0;
        const std::vector<GroupElement> one = {GroupElement(d)}, two = {GroupElement(d), GroupElement(swap)};
        return std::abs(static_cast<double>(joint_commutant(one).size()) - 2.0) +
               std::abs(static_cast<double>(joint_commutant(two).size()) - 1.0) +
               std::abs(static_cast<double>(joint_commutant(std::vector<GroupElement>{GroupElement::identity(3)}).size()) - 9.0);
    });
}

}  // namespace

const std::vector<std::string>& verify_suites() {
    static const std::vector<std::string> suites = {"transport", "monodromy",   "regint",   "homology",
                                                    "deformation", "envelope", "commutant"};
    return suites;
}

std::vector<PropertyResult> run_verify(const VerifyConfig& config) {
    static const std::map<std::string, void (*)(Runner&)> table = {
        {"transport", transport_suite},     {"monodromy", monodromy_suite}, {"regint", regint_suite},
        {"homology", homology_suite},       {"deformation", deformation_suite},
        {"envelope", envelope_suite},       {"commutant", commutant_suite}};
    if (config.suite != "all" && !table.contains(config.suite))
        throw ValidationError("suite: unknown suite \"" + config.suite + "\"");
    if (!(config.tol > 0.0)) throw ValidationError("tol: must be positive");
    std::vector<PropertyResult> out;
    Runner run(config, out);
    for (const auto& name : verify_suites())
        if (config.suite == "all" || config.suite == name) table.at(name)(run);
    return out;
}

}  // namespace qgeom
