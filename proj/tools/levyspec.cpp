// levyspec: evaluate characteristic exponents, classify generator
// spectra, evolve grid data under the semigroup, apply resolvents, run
// the dense eigenvalue cross-check, and verify sampled laws against
// the symbol.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "levyspec/levyspec.hpp"

namespace {

using namespace levyspec;

constexpr int kExitOk = 0;
constexpr int kExitModel = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitInconclusive = 4;
constexpr int kExitStatistical = 5;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(out_path);
    if (!os) throw Error("cannot open " + out_path + " for writing");
    os << text;
}

struct CommonOpts {
    std::string model_path;
    std::string out_path;
    int grid_n = 0;
    double grid_L = 0.0;

    ModelFile load() const {
        ModelFile m = load_model(model_path);
        if (grid_n > 0 || grid_L > 0.0)
            m.grid = PeriodicGrid::make(m.dimension,
                                        grid_n > 0 ? grid_n : m.grid.n,
                                        grid_L > 0.0 ? grid_L : m.grid.L);
        return m;
    }
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--model", o.model_path, "model file (JSON)")->required();
    cmd->add_option("--out", o.out_path, "output path (default stdout)");
    cmd->add_option("--grid-n", o.grid_n, "override grid points per axis");
    cmd->add_option("--grid-L", o.grid_L, "override grid period");
}

GridFunction initial_data(const ModelFile& m, const std::string& spec,
                          PeriodicGrid& grid) {
    if (spec.empty() || spec == "gaussian")
        return sample(grid, [](const Vec& x) {
            return std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1]));
        });
    GridFunction f = load_csv(spec);
    if (f.grid.d != m.dimension)
        throw MismatchedModel("initial data dimension does not match model");
    grid = f.grid;
    return f;
}

int cmd_symbol(const CommonOpts& o, double u_min, double u_max, int count) {
    ModelFile m = o.load();
    if (count < 2) throw MismatchedModel("need at least 2 sample points");
    std::ostringstream os;
    os << "u,eta\n";
    for (int i = 0; i < count; ++i) {
        double u = u_min + (u_max - u_min) * i / (count - 1);
        Vec uu = m.dimension == 1 ? vec1(u) : vec2(u, 0.0);
        os << fmt17(u) << "," << fmt17(m.symbol(uu)) << "\n";
    }
    write_output(os.str(), o.out_path);
    return kExitOk;
}

int cmd_spectrum(const CommonOpts& o, bool verify) {
    ModelFile m = o.load();
    SpectrumReport rep = classify_spectrum(m.symbol);
    json j = to_json(rep);
    if (verify) {
        if (!m.has_triplet || (!m.nu.is_atoms() && !m.nu.is_zero()))
            throw BadParameter(
                "--verify needs an atom (or zero) measure triplet");
        int n = std::min(m.grid.n, m.dimension == 1 ? 256 : 32);
        auto g = PeriodicGrid::make(m.dimension, std::max(n, 8), m.grid.L);
        j["oracle"] = to_json(eigen_oracle(m.triplet(), g));
    }
    write_output(j.dump(2) + "\n", o.out_path);
    return rep.conclusive() ? kExitOk : kExitInconclusive;
}

int cmd_evolve(const CommonOpts& o, double t_final, int steps,
               const std::string& initial) {
    ModelFile m = o.load();
    PeriodicGrid grid = m.grid;
    GridFunction f0 = initial_data(m, initial, grid);
    auto G = make_generator(m.symbol, grid);

    std::ostringstream os;
    os << "{\"L\":" << fmt17(grid.L) << ",\"d\":" << grid.d
       << ",\"n\":" << grid.n << ",\"steps\":" << steps
       << ",\"t_final\":" << fmt17(t_final) << "}\n";
    os << (grid.d == 1 ? "step,t,norm2,i0,x0,re,im"
                       : "step,t,norm2,i0,i1,x0,x1,re,im")
       << "\n";
    for (int k = 0; k <= steps; ++k) {
        double t = steps == 0 ? t_final : t_final * k / steps;
        GridFunction ft = apply_semigroup(G, t, f0);
        std::string norm2 = fmt17(l2_norm(ft));
        for (std::size_t i = 0; i < ft.values.size(); ++i) {
            Vec x = grid.point(i);
            os << k << "," << fmt17(t) << "," << norm2 << ",";
            if (grid.d == 1)
                os << i << "," << fmt17(x[0]);
            else
                os << i / grid.n << "," << i % grid.n << "," << fmt17(x[0])
                   << "," << fmt17(x[1]);
            os << "," << fmt17(ft.values[i].real()) << ","
               << fmt17(ft.values[i].imag()) << "\n";
        }
    }
    write_output(os.str(), o.out_path);
    return kExitOk;
}

int cmd_resolvent(const CommonOpts& o, double lambda,
                  const std::string& initial, const std::string& data_out) {
    ModelFile m = o.load();
    PeriodicGrid grid = m.grid;
    GridFunction g0 = initial_data(m, initial, grid);
    auto G = make_generator(m.symbol, grid);
    GridFunction r = apply_resolvent(G, lambda, g0);

    // residual ||(lambda - A) R g - g|| / ||g||
    GridFunction Ar = apply_generator(G, r);
    GridFunction res = g0;
    for (std::size_t i = 0; i < res.values.size(); ++i)
        res.values[i] = lambda * r.values[i] - Ar.values[i] - g0.values[i];
    double rel_residual = l2_norm(res) / l2_norm(g0);

    if (!data_out.empty()) save_csv(r, data_out);
    json j{{"lambda", lambda},
           {"residual", rel_residual},
           {"pass", rel_residual <= 1e-10}};
    write_output(j.dump(2) + "\n", o.out_path);
    return rel_residual <= 1e-10 ? kExitOk : kExitNumeric;
}

int cmd_eigencheck(const CommonOpts& o) {
    ModelFile m = o.load();
    auto rep = eigen_oracle(m.triplet(), m.grid);
    json j = to_json(rep);
    j["pass"] = rep.max_mismatch <= 1e-10;
    write_output(j.dump(2) + "\n", o.out_path);
    return rep.max_mismatch <= 1e-10 ? kExitOk : kExitNumeric;
}

int cmd_mc_verify(const CommonOpts& o, double t, long samples, long seed) {
    if (samples < 100)
        throw BadParameter("mc-verify needs at least 100 samples");
    ModelFile m = o.load();
    SamplerSpec spec = sampler_from_model(m, t, static_cast<std::size_t>(samples),
                                          static_cast<std::uint64_t>(seed));

    std::vector<Vec> u_list;
    for (double u : {0.3, 0.7, 1.2, 2.0, pi})
        u_list.push_back(m.dimension == 1 ? vec1(u) : vec2(u, 0.0));
    CfReport cf = verify_characteristic_function(spec, u_list);

    std::unique_ptr<McSemigroupReport> sg;
    auto G = make_generator(m.symbol, m.grid);
    GridFunction f = sample(m.grid, [](const Vec& x) {
        return std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1]));
    });
    std::vector<Vec> x_list;
    for (int k = 1; k <= 5; ++k)
        x_list.push_back(m.grid.point(k * m.grid.size() / 7));
    sg = std::make_unique<McSemigroupReport>(
        verify_semigroup_mc(spec, G, f, x_list));

    json j = to_json(spec, cf, sg.get());
    write_output(j.dump(2) + "\n", o.out_path);
    return j["pass"].get<bool>() ? kExitOk : kExitStatistical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral toolkit for symmetric Levy generators"};
    app.require_subcommand(1);

    CommonOpts sym_o, spec_o, evo_o, res_o, eig_o, mc_o;

    auto* sym = app.add_subcommand("symbol", "tabulate eta(u) as CSV");
    add_common(sym, sym_o);
    double u_min = -8.0, u_max = 8.0;
    int count = 257;
    sym->add_option("--u-min", u_min, "range start");
    sym->add_option("--u-max", u_max, "range end");
    sym->add_option("--count", count, "sample count");

    auto* spc = app.add_subcommand("spectrum", "classify sigma(A) as JSON");
    add_common(spc, spec_o);
    bool verify = false;
    spc->add_flag("--verify", verify, "attach the dense eigenvalue oracle");

    auto* evo = app.add_subcommand("evolve", "semigroup time series as CSV");
    add_common(evo, evo_o);
    double t_final = 1.0;
    int steps = 4;
    std::string evo_initial;
    evo->add_option("--t", t_final, "final time")->required();
    evo->add_option("--steps", steps, "number of output steps");
    evo->add_option("--initial", evo_initial,
                    "'gaussian' (default) or a grid-function CSV path");

    auto* res = app.add_subcommand("resolvent",
                                   "apply (lambda I - A)^{-1} and report");
    add_common(res, res_o);
    double lambda = 1.0;
    std::string res_initial, res_data;
    res->add_option("--lambda", lambda, "resolvent parameter")->required();
    res->add_option("--initial", res_initial,
                    "'gaussian' (default) or a grid-function CSV path");
    res->add_option("--data-out", res_data, "also write the result CSV here");

    auto* eig = app.add_subcommand("eigencheck",
                                   "dense eigenvalues vs -eta on the lattice");
    add_common(eig, eig_o);

    auto* mc = app.add_subcommand("mc-verify",
                                  "Monte Carlo law and semigroup checks");
    add_common(mc, mc_o);
    double mc_t = 1.0;
    long mc_samples = 100000, mc_seed = 42;
    mc->add_option("--t", mc_t, "sampling time");
    mc->add_option("--samples", mc_samples, "sample count (>= 100)");
    mc->add_option("--seed", mc_seed, "RNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sym->parsed()) return cmd_symbol(sym_o, u_min, u_max, count);
        if (spc->parsed()) return cmd_spectrum(spec_o, verify);
        if (evo->parsed()) return cmd_evolve(evo_o, t_final, steps, evo_initial);
        if (res->parsed())
            return cmd_resolvent(res_o, lambda, res_initial, res_data);
        if (eig->parsed()) return cmd_eigencheck(eig_o);
        if (mc->parsed()) return cmd_mc_verify(mc_o, mc_t, mc_samples, mc_seed);
    } catch (const MismatchedModel& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return kExitModel;
    } catch (const BadParameter& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return kExitModel;
    } catch (const OriginAtom& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return kExitModel;
    } catch (const AtomOffGrid& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return kExitModel;
    } catch (const NotFinite& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return kExitModel;
    } catch (const UnsupportedMeasure& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return kExitModel;
    } catch (const Error& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitModel;
}
