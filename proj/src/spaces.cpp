#include "lab/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "json.hpp"

namespace lab {

ProbabilitySpace::ProbabilitySpace(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw std::invalid_argument("ProbabilitySpace: needs at least one point");
    // compensated summation so large uniform grids stay inside the tolerance
    double sum = 0.0, comp = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0)) throw std::invalid_argument("ProbabilitySpace: negative weight");
        double y = w - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("ProbabilitySpace: weights must sum to 1");
}

ProbabilitySpace ProbabilitySpace::uniform(std::size_t m) {
    if (m == 0) throw std::invalid_argument("ProbabilitySpace: m must be positive");
    std::vector<double> w(m, 1.0 / static_cast<double>(m));
    // fix rounding so the sum is exactly representable as close to 1 as possible
    return ProbabilitySpace(std::move(w));
}

ProbabilitySpace ProbabilitySpace::product(const ProbabilitySpace& a, const ProbabilitySpace& b) {
    std::vector<double> w;
    w.reserve(a.size() * b.size());
    for (double wa : a.weights())
        for (double wb : b.weights()) w.push_back(wa * wb);
    // renormalize away accumulated rounding
    double sum = 0.0;
    for (double x : w) sum += x;
    for (double& x : w) x /= sum;
    return ProbabilitySpace(std::move(w));
}

bool ProbabilitySpace::same_as(const ProbabilitySpace& other) const {
    return weights_ == other.weights_;
}

FunctionSystem::FunctionSystem(ProbabilitySpace space, std::vector<std::vector<cplx>> values,
                               std::string label)
    : space_(std::move(space)), values_(std::move(values)), label_(std::move(label)) {
    if (values_.empty()) throw std::invalid_argument("FunctionSystem: N >= 1 required");
    for (const auto& row : values_) {
        if (row.size() != space_.size())
            throw std::invalid_argument("FunctionSystem: row length != number of points");
        for (const cplx& v : row)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw std::invalid_argument("FunctionSystem: non-finite entry");
    }
}

double FunctionSystem::sup_norm(std::size_t n) const {
    double m = 0.0;
    for (const cplx& v : values_[n]) m = std::max(m, std::abs(v));
    return m;
}

double FunctionSystem::max_sup_norm() const {
    double m = 0.0;
    for (std::size_t n = 0; n < size(); ++n) m = std::max(m, sup_norm(n));
    return m;
}

bool FunctionSystem::is_real() const {
    for (const auto& row : values_)
        for (const cplx& v : row)
            if (v.imag() != 0.0) return false;
    return true;
}

cplx FunctionSystem::combination_at(std::span<const cplx> coeffs, std::size_t i) const {
    cplx s = 0.0;
    for (std::size_t n = 0; n < values_.size(); ++n) s += coeffs[n] * values_[n][i];
    return s;
}

std::vector<cplx> FunctionSystem::combination(std::span<const cplx> coeffs) const {
    std::vector<cplx> out(points());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = combination_at(coeffs, i);
    return out;
}

MatricialSystem::MatricialSystem(ProbabilitySpace space, std::vector<std::size_t> dims,
                                 std::vector<std::vector<std::vector<cplx>>> blocks,
                                 std::string label)
    : space_(std::move(space)),
      dims_(std::move(dims)),
      blocks_(std::move(blocks)),
      label_(std::move(label)) {
    if (dims_.empty() || dims_.size() != blocks_.size())
        throw std::invalid_argument("MatricialSystem: dims/blocks mismatch");
    for (std::size_t n = 0; n < dims_.size(); ++n) {
        if (blocks_[n].size() != dims_[n] * dims_[n])
            throw std::invalid_argument("MatricialSystem: block entry count != d^2");
        for (const auto& entry : blocks_[n])
            if (entry.size() != space_.size())
                throw std::invalid_argument("MatricialSystem: entry length != number of points");
    }
}

Matrix MatricialSystem::matrix_at(std::size_t n, std::size_t s) const {
    std::size_t d = dims_[n];
    Matrix m(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) m(i, j) = value(n, i, j, s);
    return m;
}

double MatricialSystem::sup_operator_norm(std::size_t n) const {
    double m = 0.0;
    for (std::size_t s = 0; s < space_.size(); ++s)
        m = std::max(m, operator_norm(matrix_at(n, s)));
    return m;
}

FunctionSystem MatricialSystem::flatten() const {
    std::vector<std::vector<cplx>> rows;
    for (std::size_t n = 0; n < dims_.size(); ++n) {
        double scale = std::sqrt(static_cast<double>(dims_[n]));
        for (const auto& entry : blocks_[n]) {
            std::vector<cplx> row(entry.size());
            for (std::size_t s = 0; s < entry.size(); ++s) row[s] = scale * entry[s];
            rows.push_back(std::move(row));
        }
    }
    return FunctionSystem(space_, std::move(rows), label_ + ":flat");
}

cplx inner_product(std::span<const cplx> f, std::span<const cplx> g,
                   const ProbabilitySpace& space) {
    if (f.size() != space.size() || g.size() != space.size())
        throw std::invalid_argument("inner_product: row length mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += space.weight(i) * f[i] * std::conj(g[i]);
    return s;
}

cplx inner_product(const FunctionSystem& sysF, std::size_t n, const FunctionSystem& sysG,
                   std::size_t k) {
    if (!sysF.space().same_as(sysG.space()))
        throw std::invalid_argument("inner_product: incompatible systems (different spaces)");
    return inner_product(sysF.row(n), sysG.row(k), sysF.space());
}

GramReport biorthogonality_gram(const FunctionSystem& sysA, const FunctionSystem& sysB) {
    if (sysA.size() != sysB.size())
        throw std::invalid_argument("biorthogonality_gram: size mismatch");
    if (!sysA.space().same_as(sysB.space()))
        throw std::invalid_argument("biorthogonality_gram: incompatible spaces");
    const std::size_t n = sysA.size();
    GramReport rep;
    rep.gram = Matrix(n, n);
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q)
            rep.gram(p, q) = inner_product(sysA.row(p), sysB.row(q), sysA.space());
    Matrix dev = rep.gram;
    for (std::size_t i = 0; i < n; ++i) dev(i, i) -= 1.0;
    Svd devSvd = svd(dev);
    rep.deviation = devSvd.sigma.empty() ? 0.0 : devSvd.sigma.front();
    Svd gSvd = svd(rep.gram);
    double smin = gSvd.sigma.back();
    if (smin > 1e-12)
        rep.inverseNormBound = 1.0 / smin;
    return rep;
}

GramReport biorthogonality_gram(const MatricialSystem& sysA, const MatricialSystem& sysB) {
    if (sysA.dims() != sysB.dims())
        throw std::invalid_argument("biorthogonality_gram: size mismatch");
    return biorthogonality_gram(sysA.flatten(), sysB.flatten());
}

FunctionSystem tensor_product_system(const FunctionSystem& sys1, const FunctionSystem& sys2,
                                     std::size_t cap) {
    if (sys1.size() != sys2.size())
        throw std::invalid_argument("tensor_product_system: N mismatch");
    const std::size_t m1 = sys1.points(), m2 = sys2.points();
    if (m1 * m2 > cap)
        throw std::invalid_argument(
            "tensor_product_system: product grid exceeds cap; use sampled-grid (lazy) mode");
    ProbabilitySpace prod = ProbabilitySpace::product(sys1.space(), sys2.space());
    std::vector<std::vector<cplx>> rows(sys1.size());
    for (std::size_t n = 0; n < sys1.size(); ++n) {
        rows[n].resize(m1 * m2);
        for (std::size_t i = 0; i < m1; ++i)
            for (std::size_t j = 0; j < m2; ++j)
                rows[n][i * m2 + j] = sys1.row(n)[i] * sys2.row(n)[j];
    }
    return FunctionSystem(std::move(prod), std::move(rows),
                          sys1.label() + "x" + sys2.label());
}

MatricialSystem tensor_product_system(const MatricialSystem& sys1, const MatricialSystem& sys2,
                                      std::size_t cap) {
    if (sys1.dims() != sys2.dims())
        throw std::invalid_argument("tensor_product_system: dims mismatch");
    const std::size_t m1 = sys1.space().size(), m2 = sys2.space().size();
    if (m1 * m2 > cap)
        throw std::invalid_argument(
            "tensor_product_system: product grid exceeds cap; use sampled-grid (lazy) mode");
    ProbabilitySpace prod = ProbabilitySpace::product(sys1.space(), sys2.space());
    std::vector<std::vector<std::vector<cplx>>> blocks(sys1.size());
    for (std::size_t n = 0; n < sys1.size(); ++n) {
        std::size_t d = sys1.dim(n);
        blocks[n].assign(d * d, std::vector<cplx>(m1 * m2));
        for (std::size_t s1 = 0; s1 < m1; ++s1) {
            Matrix a = sys1.matrix_at(n, s1);
            for (std::size_t s2 = 0; s2 < m2; ++s2) {
                Matrix p = a * sys2.matrix_at(n, s2);
                for (std::size_t i = 0; i < d; ++i)
                    for (std::size_t j = 0; j < d; ++j)
                        blocks[n][i * d + j][s1 * m2 + s2] = p(i, j);
            }
        }
    }
    return MatricialSystem(std::move(prod), sys1.dims(), std::move(blocks),
                           sys1.label() + "x" + sys2.label());
}

LazyProductSystem::LazyProductSystem(const FunctionSystem& factor, std::size_t folds)
    : factor_(factor), k_(folds) {
    if (folds == 0) throw std::invalid_argument("LazyProductSystem: folds >= 1 required");
}

cplx LazyProductSystem::value(std::size_t n, std::span<const std::size_t> multiIndex) const {
    cplx v = 1.0;
    for (std::size_t q = 0; q < k_; ++q) v *= factor_.row(n)[multiIndex[q]];
    return v;
}

cplx LazyProductSystem::combination_at(std::span<const cplx> coeffs,
                                       std::span<const std::size_t> multiIndex) const {
    cplx s = 0.0;
    for (std::size_t n = 0; n < factor_.size(); ++n) s += coeffs[n] * value(n, multiIndex);
    return s;
}

namespace {

std::string double_to_decimal(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

nlohmann::json space_to_json(const ProbabilitySpace& sp) {
    nlohmann::json ws = nlohmann::json::array();
    for (double w : sp.weights()) ws.push_back(double_to_decimal(w));
    return nlohmann::json{{"weights", ws}};
}

ProbabilitySpace space_from_json(const nlohmann::json& j) {
    std::vector<double> w;
    for (const auto& s : j.at("weights")) w.push_back(std::strtod(s.get<std::string>().c_str(), nullptr));
    return ProbabilitySpace(std::move(w));
}

nlohmann::json values_row_to_json(const std::vector<cplx>& row) {
    nlohmann::json r = nlohmann::json::array();
    for (const cplx& v : row)
        r.push_back(nlohmann::json::array({double_to_decimal(v.real()), double_to_decimal(v.imag())}));
    return r;
}

std::vector<cplx> values_row_from_json(const nlohmann::json& j) {
    std::vector<cplx> row;
    for (const auto& p : j)
        row.emplace_back(std::strtod(p.at(0).get<std::string>().c_str(), nullptr),
                         std::strtod(p.at(1).get<std::string>().c_str(), nullptr));
    return row;
}

}  // namespace

std::string to_json(const FunctionSystem& sys) {
    nlohmann::json j;
    j["space"] = space_to_json(sys.space());
    j["N"] = sys.size();
    nlohmann::json vals = nlohmann::json::array();
    for (std::size_t n = 0; n < sys.size(); ++n) vals.push_back(values_row_to_json(sys.row(n)));
    j["values"] = vals;
    j["label"] = sys.label();
    return j.dump();
}

std::string to_json(const MatricialSystem& sys) {
    nlohmann::json j;
    j["space"] = space_to_json(sys.space());
    j["N"] = sys.size();
    j["dims"] = sys.dims();
    nlohmann::json vals = nlohmann::json::array();
    for (std::size_t n = 0; n < sys.size(); ++n) {
        nlohmann::json block = nlohmann::json::array();
        std::size_t d = sys.dim(n);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t jj = 0; jj < d; ++jj) {
                std::vector<cplx> entry(sys.space().size());
                for (std::size_t s = 0; s < entry.size(); ++s) entry[s] = sys.value(n, i, jj, s);
                block.push_back(values_row_to_json(entry));
            }
        vals.push_back(block);
    }
    j["values"] = vals;
    j["label"] = sys.label();
    return j.dump();
}

FunctionSystem function_system_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ProbabilitySpace sp = space_from_json(j.at("space"));
    std::vector<std::vector<cplx>> rows;
    for (const auto& r : j.at("values")) rows.push_back(values_row_from_json(r));
    return FunctionSystem(std::move(sp), std::move(rows), j.value("label", ""));
}

MatricialSystem matricial_system_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ProbabilitySpace sp = space_from_json(j.at("space"));
    std::vector<std::size_t> dims = j.at("dims").get<std::vector<std::size_t>>();
    std::vector<std::vector<std::vector<cplx>>> blocks;
    for (const auto& block : j.at("values")) {
        std::vector<std::vector<cplx>> entries;
        for (const auto& r : block) entries.push_back(values_row_from_json(r));
        blocks.push_back(std::move(entries));
    }
    return MatricialSystem(std::move(sp), std::move(dims), std::move(blocks),
                           j.value("label", ""));
}

bool json_is_matricial(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    return j.contains("dims");
}

}  // namespace lab
