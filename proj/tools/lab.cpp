#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lab/chaos.hpp"
#include "lab/expcli.hpp"
#include "lab/generators.hpp"
#include "lab/orlicz.hpp"
#include "lab/sidon.hpp"
#include "lab/tensornorms.hpp"

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string dec(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (!in.good() && !in.eof()) throw IoError("read failed for '" + path + "'");
    return ss.str();
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "'");
    out << body;
    out.flush();
    if (!out) throw IoError("write failed for '" + path + "'");
}

int run(int argc, char** argv) {
    CLI::App app{"numerical laboratory for interpolation constants of bounded "
                 "orthonormal systems"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a function system as JSON");
    std::string family, genOut;
    std::vector<int> exponents = {1, 2, 4, 8};
    std::size_t gridM = 64, walshBits = 4, genDim = 4, genSamples = 256;
    std::uint64_t genSeed = 1;
    gen->add_option("family", family, "lacunary | walsh | haar")->required();
    gen->add_option("--out", genOut, "output path")->required();
    gen->add_option("--exponents", exponents, "lacunary character exponents");
    gen->add_option("--grid", gridM, "circle grid size");
    gen->add_option("--bits", walshBits, "Walsh cube bit count (singleton characters)");
    gen->add_option("--dim", genDim, "unitary dimension");
    gen->add_option("--samples", genSamples, "sample-space size");
    gen->add_option("--seed", genSeed, "random seed");

    // psi2
    auto* psi2 = app.add_subcommand("psi2", "subGaussian constant of a stored system");
    std::string psi2In;
    std::size_t psi2Restarts = 8;
    std::uint64_t psi2Seed = 1;
    psi2->add_option("input", psi2In, "system JSON path")->required();
    psi2->add_option("--restarts", psi2Restarts, "ascent restarts");
    psi2->add_option("--seed", psi2Seed, "random seed");

    // sidon
    auto* sidon = app.add_subcommand("sidon", "interpolation-constant bracket");
    std::string sidonIn, sidonMode = "sampled";
    std::size_t tensorK = 1;
    std::uint64_t sidonSeed = 1;
    sidon->add_option("input", sidonIn, "system JSON path")->required();
    sidon->add_option("--tensor", tensorK, "tensor power k");
    sidon->add_option("--mode", sidonMode, "exact | sampled")
        ->check(CLI::IsMember({"exact", "sampled"}));
    sidon->add_option("--seed", sidonSeed, "random seed");

    // random-sidon
    auto* rs = app.add_subcommand("random-sidon", "randomly-Sidon lower-bound search");
    std::string rsIn;
    std::size_t rsSamples = 1000, rsRestarts = 2;
    std::uint64_t rsSeed = 1;
    rs->add_option("input", rsIn, "system JSON path")->required();
    rs->add_option("--samples", rsSamples, "Monte Carlo samples")->required();
    rs->add_option("--restarts", rsRestarts, "search restarts");
    rs->add_option("--seed", rsSeed, "random seed");

    // decompose
    auto* dc = app.add_subcommand("decompose", "damped kernel decomposition s = t + r");
    double dcDelta = 0.3;
    std::size_t dcVars = 4, dcSamples = 300;
    std::uint64_t dcSeed = 1;
    dc->add_option("--delta", dcDelta, "damping parameter in (0, 1)")->required();
    dc->add_option("--nvars", dcVars, "Gaussian variable count")->required();
    dc->add_option("--samples", dcSamples, "evaluation grid size");
    dc->add_option("--seed", dcSeed, "random seed");

    // mela
    auto* me = app.add_subcommand("mela", "damping measure LP");
    double meDelta = 0.25;
    std::size_t meGrid = 192;
    int meNmax = 15;
    me->add_option("--delta", meDelta, "odd-moment bound in (0, 1)")->required();
    me->add_option("--grid", meGrid, "support grid size");
    me->add_option("--nmax", meNmax, "largest constrained odd moment");

    // exp
    auto* ex = app.add_subcommand("exp", "run a registered experiment preset");
    lab::ExperimentConfig cfg;
    bool csv = false;
    std::string presets;
    for (const std::string& p : lab::preset_names()) presets += (presets.empty() ? "" : " ") + p;
    ex->add_option("preset", cfg.name, "one of: " + presets)->required();
    ex->add_option("--seed", cfg.seed, "random seed");
    ex->add_option("--out", cfg.outPath, "report path (stdout when omitted)");
    ex->add_flag("--csv", csv, "emit CSV instead of JSON");
    ex->add_option("--grid", cfg.gridM, "grid size");
    ex->add_option("--samples", cfg.samples, "Monte Carlo samples");
    ex->add_option("--restarts", cfg.restarts, "search restarts");
    ex->add_option("--delta", cfg.delta, "damping parameter");
    ex->add_option("--chi", cfg.chi, "operator-norm cutoff");
    ex->add_option("--dims", cfg.dims, "matrix dimension");
    ex->add_option("--nindices", cfg.nIndices, "system / variable count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (gen->parsed()) {
        if (family == "lacunary") {
            write_file(genOut, lab::to_json(lab::make_lacunary(exponents, gridM)));
        } else if (family == "walsh") {
            std::vector<std::vector<std::size_t>> subsets;
            for (std::size_t i = 0; i < walshBits; ++i) subsets.push_back({i});
            write_file(genOut, lab::to_json(lab::make_walsh(walshBits, subsets)));
        } else if (family == "haar") {
            write_file(genOut,
                       lab::to_json(lab::make_haar_unitary_system(genDim, genSamples, genSeed)));
        } else {
            throw std::invalid_argument("unknown family '" + family +
                                        "' (expected lacunary, walsh, or haar)");
        }
        std::cout << "wrote " << genOut << "\n";
    } else if (psi2->parsed()) {
        std::string text = read_file(psi2In);
        lab::SubGaussianReport r;
        if (lab::json_is_matricial(text)) {
            r = lab::subgaussian_constant(lab::matricial_system_from_json(text), psi2Restarts, 60,
                                          lab::RngStream(psi2Seed));
        } else {
            r = lab::subgaussian_constant(lab::function_system_from_json(text), psi2Restarts, 60,
                                          lab::RngStream(psi2Seed));
        }
        nlohmann::json j;
        j["constantC"] = dec(r.constantC);
        j["constantSigma"] = dec(r.constantSigma);
        j["restarts"] = r.restarts;
        std::cout << j.dump(2) << "\n";
    } else if (sidon->parsed()) {
        lab::FunctionSystem sys = lab::function_system_from_json(read_file(sidonIn));
        lab::SidonEstimate est;
        if (tensorK > 1) {
            est = lab::tensor_sidon_constant(sys, tensorK, std::size_t{1} << 20,
                                             lab::RngStream(sidonSeed));
        } else {
            lab::SidonMode mode =
                sidonMode == "exact" ? lab::SidonMode::Exact : lab::SidonMode::Sampled;
            est = lab::sidon_constant(sys, mode, 64, lab::RngStream(sidonSeed));
        }
        std::cout << lab::to_json(est) << "\n";
    } else if (rs->parsed()) {
        std::string text = read_file(rsIn);
        lab::RandomSidonEstimate est;
        if (lab::json_is_matricial(text)) {
            est = lab::randomly_sidon_constant(lab::matricial_system_from_json(text), rsSamples,
                                               rsRestarts, lab::RngStream(rsSeed));
        } else {
            est = lab::randomly_sidon_constant(lab::function_system_from_json(text), rsSamples,
                                               rsRestarts, lab::RngStream(rsSeed));
        }
        std::cout << lab::to_json(est) << "\n";
    } else if (dc->parsed()) {
        lab::RngStream rng(dcSeed);
        lab::ChaosGridMap u1 = lab::make_gaussian_evaluation_map(dcVars, 5, dcSamples,
                                                                 rng.derive(1));
        lab::ChaosGridMap u2 = lab::make_gaussian_evaluation_map(dcVars, 5, dcSamples,
                                                                 rng.derive(2));
        lab::Decomposition d = lab::decompose_t_r(u1, u2, dcDelta, rng.derive(3));
        nlohmann::json j;
        j["wedgeT"] = dec(d.wedgeT);
        j["veeR"] = dec(d.veeR);
        j["gamma2R"] = dec(d.gamma2R);
        j["analyticWedgeBound"] = dec(d.analyticWedgeBound);
        j["analyticVeeBound"] = dec(d.analyticVeeBound);
        j["analyticGamma2Bound"] = dec(d.analyticGamma2Bound);
        j["reconstructionError"] = dec(d.reconstructionError);
        std::cout << j.dump(2) << "\n";
    } else if (me->parsed()) {
        std::cout << lab::to_json(lab::mela_lp(meDelta, meGrid, meNmax)) << "\n";
    } else if (ex->parsed()) {
        lab::Report rep = lab::run_preset(cfg);
        if (cfg.outPath.empty()) {
            std::cout << (csv ? lab::report_to_csv(rep) : lab::report_to_json(rep));
        } else {
            try {
                lab::emit_report(rep, csv ? "csv" : "json", cfg.outPath);
            } catch (const std::runtime_error& e) {
                throw IoError(e.what());
            }
            std::cout << "wrote " << cfg.outPath << "\n";
        }
        for (const lab::CheckRecord& c : rep.checks)
            std::cout << (c.pass ? "pass " : "FAIL ") << c.name << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
