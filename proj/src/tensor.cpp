#include "meig/tensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "meig/rng.hpp"

namespace meig {
namespace {

void require_dims(int m, int n) {
    if (m < 1 || n < 1) throw ConfigError("tensor dimensions must be positive");
}

std::size_t total_size(int m, int n) {
    return static_cast<std::size_t>(m) * n * m * n;
}

std::size_t flat_index(int m, int n, int i, int j, int k, int l) {
    (void)m;
    return ((static_cast<std::size_t>(i) * n + j) * m + k) * n + l;
}

// The symmetry orbit of (i,j,k,l): itself plus the three images under
// i<->k, j<->l, and both swaps. Orbits partition the index set.
std::array<std::size_t, 4> orbit(int m, int n, int i, int j, int k, int l) {
    return {flat_index(m, n, i, j, k, l), flat_index(m, n, k, j, i, l),
            flat_index(m, n, i, l, k, j), flat_index(m, n, k, l, i, j)};
}

void require_shape(int m, int n, std::span<const double> raw) {
    if (raw.size() != total_size(m, n))
        throw DimensionError("raw array has " + std::to_string(raw.size()) +
                             " entries, expected " + std::to_string(total_size(m, n)));
}

} // namespace

SymmetryCheck validate_symmetry(int m, int n, std::span<const double> raw, double tol) {
    require_dims(m, n);
    require_shape(m, n, raw);
    double worst = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < n; ++l) {
                    const auto o = orbit(m, n, i, j, k, l);
                    const double a = raw[o[0]];
                    for (int p = 1; p < 4; ++p)
                        worst = std::max(worst, std::abs(a - raw[o[p]]));
                }
    return SymmetryCheck{worst <= tol, worst};
}

std::vector<double> symmetrize_entries(int m, int n, std::span<const double> raw) {
    require_dims(m, n);
    require_shape(m, n, raw);
    if (!all_finite(raw)) throw ValueError("raw array contains non-finite entries");
    std::vector<double> out(raw.size());
    // One mean per orbit, summed in a fixed order and broadcast to all four
    // members, so the result passes validate_symmetry exactly (bitwise) and
    // re-application is an exact fixed point.
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < n; ++l) {
                    const auto o = orbit(m, n, i, j, k, l);
                    if (o[0] != *std::min_element(o.begin(), o.end())) continue;
                    const double mean = (raw[o[0]] + raw[o[1]] + raw[o[2]] + raw[o[3]]) / 4.0;
                    for (std::size_t pos : o) out[pos] = mean;
                }
    return out;
}

HierSymTensor HierSymTensor::from_entries(int m, int n, std::vector<double> entries, double tol) {
    require_dims(m, n);
    require_shape(m, n, entries);
    if (!all_finite(entries)) throw ValueError("tensor entries must be finite");
    const SymmetryCheck check = validate_symmetry(m, n, entries, tol);
    if (!check.ok)
        throw ValueError("entries violate hierarchical symmetry by " +
                         std::to_string(check.max_violation));
    return HierSymTensor(m, n, std::move(entries));
}

HierSymTensor HierSymTensor::symmetrized(int m, int n, std::vector<double> entries) {
    return HierSymTensor(m, n, symmetrize_entries(m, n, entries));
}

HierSymTensor HierSymTensor::zero(int m, int n) {
    require_dims(m, n);
    return HierSymTensor(m, n, std::vector<double>(total_size(m, n), 0.0));
}

Vec contract_x(const HierSymTensor& t, std::span<const double> x, std::span<const double> y) {
    const int m = t.m(), n = t.n();
    if (x.size() != static_cast<std::size_t>(m) || y.size() != static_cast<std::size_t>(n))
        throw DimensionError("contract_x: vector sizes do not match tensor dimensions");
    const double* a = t.entries().data();
    Vec out(m, 0.0);
    for (int i = 0; i < m; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const double yj = y[j];
            if (yj == 0.0) {
                a += static_cast<std::size_t>(m) * n;
                continue;
            }
            for (int k = 0; k < m; ++k) {
                double s = 0.0;
                for (int l = 0; l < n; ++l) s += a[l] * y[l];
                acc += yj * x[k] * s;
                a += n;
            }
        }
        out[i] = acc;
    }
    return out;
}

Vec contract_y(const HierSymTensor& t, std::span<const double> x, std::span<const double> y) {
    const int m = t.m(), n = t.n();
    if (x.size() != static_cast<std::size_t>(m) || y.size() != static_cast<std::size_t>(n))
        throw DimensionError("contract_y: vector sizes do not match tensor dimensions");
    const double* a = t.entries().data();
    Vec out(n, 0.0);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            const double c = x[i] * y[j];
            if (c == 0.0) {
                a += static_cast<std::size_t>(m) * n;
                continue;
            }
            for (int k = 0; k < m; ++k) {
                const double w = c * x[k];
                for (int l = 0; l < n; ++l) out[l] += w * a[l];
                a += n;
            }
        }
    }
    return out;
}

double contract_scalar(const HierSymTensor& t, std::span<const double> x,
                       std::span<const double> y) {
    const Vec cx = contract_x(t, x, y);
    return dot(x, cx);
}

HierSymTensor negated(const HierSymTensor& t) { return scaled(t, -1.0); }

HierSymTensor scaled(const HierSymTensor& t, double c) {
    std::vector<double> e = t.entries();
    for (double& v : e) v *= c;
    // Re-project: tensors validated within tolerance (rather than exactly
    // symmetric) could otherwise drift past the constructor check for |c| > 1.
    return HierSymTensor::symmetrized(t.m(), t.n(), std::move(e));
}

double abs_entry_sum(const HierSymTensor& t) {
    double s = 0.0;
    for (double v : t.entries()) s += std::abs(v);
    return s;
}

double max_abs_entry(const HierSymTensor& t) {
    double m = 0.0;
    for (double v : t.entries()) m = std::max(m, std::abs(v));
    return m;
}

// ---------------------------------------------------------------------------
// Spec realization
// ---------------------------------------------------------------------------

HierSymTensor realize(const TensorSpec& spec) {
    require_dims(spec.m, spec.n);
    const int m = spec.m, n = spec.n;

    if (const auto* dense = std::get_if<DenseSource>(&spec.source)) {
        // Text-format round-off tolerance.
        return HierSymTensor::from_entries(m, n, dense->entries, 1e-9);
    }

    if (const auto* sparse = std::get_if<SparseSource>(&spec.source)) {
        std::vector<double> raw(total_size(m, n), 0.0);
        std::size_t idx = 0;
        for (const SparseEntry& e : sparse->entries) {
            if (e.i < 1 || e.i > m || e.j < 1 || e.j > n || e.k < 1 || e.k > m || e.l < 1 ||
                e.l > n)
                throw ParseError("sparse entry " + std::to_string(idx) +
                                 ": index out of range (indices are 1-based)");
            if (!std::isfinite(e.value))
                throw ValueError("sparse entry " + std::to_string(idx) + ": non-finite value");
            for (std::size_t pos : orbit(m, n, e.i - 1, e.j - 1, e.k - 1, e.l - 1))
                raw[pos] = e.value;
            ++idx;
        }
        return HierSymTensor::symmetrized(m, n, std::move(raw));
    }

    const auto& gen = std::get<GeneratorSource>(spec.source);
    if (!(gen.low < gen.high)) throw ConfigError("generator bounds require low < high");
    Rng rng(gen.seed);
    std::vector<double> raw(total_size(m, n));
    for (double& v : raw) v = rng.uniform(gen.low, gen.high);
    return HierSymTensor::symmetrized(m, n, std::move(raw));
}

HierSymTensor generate_random(int m, int n, double low, double high, std::uint64_t seed) {
    return realize(TensorSpec{m, n, GeneratorSource{low, high, seed}});
}

// ---------------------------------------------------------------------------
// File I/O
// ---------------------------------------------------------------------------

namespace {

void append_double(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

} // namespace

void store_tensor(const HierSymTensor& t, const std::string& path) {
    const int m = t.m(), n = t.n();
    std::string out;
    out.reserve(t.entries().size() * 12 + 64);
    out += "{\"m\": " + std::to_string(m) + ", \"n\": " + std::to_string(n) + ", \"dense\": [";
    for (int i = 0; i < m; ++i) {
        out += i ? ",[" : "[";
        for (int j = 0; j < n; ++j) {
            out += j ? ",[" : "[";
            for (int k = 0; k < m; ++k) {
                out += k ? ",[" : "[";
                for (int l = 0; l < n; ++l) {
                    if (l) out += ',';
                    append_double(out, t.at(i, j, k, l));
                }
                out += ']';
            }
            out += ']';
        }
        out += ']';
    }
    out += "]}\n";
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path + " for writing");
    f << out;
    if (!f) throw Error("write failed: " + path);
}

namespace {

using nlohmann::json;

int field_int(const json& j, const char* name) {
    if (!j.contains(name) || !j[name].is_number_integer())
        throw ParseError(std::string("field \"") + name + "\" missing or not an integer");
    return j[name].get<int>();
}

std::vector<double> parse_dense(const json& dense, int m, int n) {
    std::vector<double> raw;
    raw.reserve(total_size(m, n));
    const auto bad = [](const std::string& where) {
        return ParseError("field \"dense\": malformed nesting at " + where);
    };
    if (!dense.is_array() || dense.size() != static_cast<std::size_t>(m)) throw bad("top level");
    for (int i = 0; i < m; ++i) {
        const auto& di = dense[i];
        if (!di.is_array() || di.size() != static_cast<std::size_t>(n))
            throw bad("i=" + std::to_string(i + 1));
        for (int j = 0; j < n; ++j) {
            const auto& dj = di[j];
            if (!dj.is_array() || dj.size() != static_cast<std::size_t>(m))
                throw bad("i=" + std::to_string(i + 1) + ",j=" + std::to_string(j + 1));
            for (int k = 0; k < m; ++k) {
                const auto& dk = dj[k];
                if (!dk.is_array() || dk.size() != static_cast<std::size_t>(n))
                    throw bad("i=" + std::to_string(i + 1) + ",j=" + std::to_string(j + 1) +
                              ",k=" + std::to_string(k + 1));
                for (int l = 0; l < n; ++l) {
                    if (!dk[l].is_number())
                        throw bad("i=" + std::to_string(i + 1) + ",j=" + std::to_string(j + 1) +
                                  ",k=" + std::to_string(k + 1) + ",l=" + std::to_string(l + 1));
                    raw.push_back(dk[l].get<double>());
                }
            }
        }
    }
    return raw;
}

std::vector<SparseEntry> parse_sparse(const json& sparse) {
    if (!sparse.is_array()) throw ParseError("field \"sparse\" must be an array");
    std::vector<SparseEntry> entries;
    entries.reserve(sparse.size());
    for (std::size_t idx = 0; idx < sparse.size(); ++idx) {
        const auto& e = sparse[idx];
        if (!e.is_array() || e.size() != 5)
            throw ParseError("sparse entry " + std::to_string(idx) +
                             ": expected [i,j,k,l,value]");
        for (int p = 0; p < 4; ++p)
            if (!e[p].is_number_integer())
                throw ParseError("sparse entry " + std::to_string(idx) +
                                 ": indices must be integers");
        if (!e[4].is_number())
            throw ParseError("sparse entry " + std::to_string(idx) + ": value must be a number");
        entries.push_back(SparseEntry{e[0].get<int>(), e[1].get<int>(), e[2].get<int>(),
                                      e[3].get<int>(), e[4].get<double>()});
    }
    return entries;
}

} // namespace

HierSymTensor load_tensor(const std::string& path, double* pre_symmetrization_violation) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (!j.is_object()) throw ParseError(path + ": top level must be an object");

    const int m = field_int(j, "m");
    const int n = field_int(j, "n");
    if (m < 1 || n < 1) throw ParseError(path + ": m and n must be positive");

    const bool has_dense = j.contains("dense");
    const bool has_sparse = j.contains("sparse");
    if (has_dense == has_sparse)
        throw ParseError(path + ": exactly one of \"dense\" or \"sparse\" is required");

    if (has_dense) {
        std::vector<double> raw = parse_dense(j["dense"], m, n);
        if (!all_finite(raw)) throw ValueError(path + ": non-finite entry");
        const SymmetryCheck check = validate_symmetry(m, n, raw, 1e-9);
        if (pre_symmetrization_violation) *pre_symmetrization_violation = check.max_violation;
        if (!check.ok)
            throw ValueError(path + ": dense entries violate hierarchical symmetry by " +
                             std::to_string(check.max_violation) + " (tolerance 1e-9)");
        return HierSymTensor::from_entries(m, n, std::move(raw), 1e-9);
    }

    TensorSpec spec{m, n, SparseSource{parse_sparse(j["sparse"])}};
    // Orbit expansion makes the raw array exactly symmetric, so the recorded
    // violation is the post-expansion residue (zero unless entries conflict).
    HierSymTensor t = realize(spec);
    if (pre_symmetrization_violation) *pre_symmetrization_violation = 0.0;
    return t;
}

// ---------------------------------------------------------------------------
// Built-in fixtures
// ---------------------------------------------------------------------------

namespace {

struct Assign {
    int i, j, k, l; // 1-based
    double value;
};

// Applies 1-based single-position assignments in listed order (later writes
// override earlier ones), then projects onto the symmetry class.
HierSymTensor from_assignments(int m, int n, std::span<const Assign> assigns) {
    std::vector<double> raw(total_size(m, n), 0.0);
    for (const Assign& a : assigns)
        raw[flat_index(m, n, a.i - 1, a.j - 1, a.k - 1, a.l - 1)] = a.value;
    return HierSymTensor::symmetrized(m, n, std::move(raw));
}

HierSymTensor make_ex41() {
    std::vector<double> raw(total_size(2, 2), 0.0);
    const Assign entries[] = {
        {1, 1, 1, 1, 2},  {1, 2, 1, 1, 3},  {2, 1, 1, 1, 6},
        {1, 1, 2, 1, 6},  {1, 1, 1, 2, 3},  {1, 2, 1, 2, 2},
        {2, 2, 1, 2, 10}, {1, 2, 2, 2, 10}, {2, 2, 2, 2, 5},
    };
    for (const Assign& a : entries)
        raw[flat_index(2, 2, a.i - 1, a.j - 1, a.k - 1, a.l - 1)] = a.value;
    return HierSymTensor::from_entries(2, 2, std::move(raw), 0.0);
}

HierSymTensor make_ex42() {
    // The published entry list assigns a few positions more than once with
    // differing values (a_2233, a_2323, a_1331). Resolution: apply the
    // assignments in listed order, last write wins, then symmetrize.
    const Assign assigns[] = {
        {2, 2, 2, 2, 196.6},  {1, 1, 1, 1, 196.6},
        {3, 3, 1, 1, 83.2},   {2, 2, 3, 3, 83.2},
        {2, 3, 2, 3, 54.7},   {2, 3, 2, 2, 54.7},
        {3, 1, 3, 1, 54.7},   {1, 3, 3, 1, 54.7},
        {2, 2, 3, 3, -31.7},  {2, 3, 2, 3, -31.7},
        {1, 2, 1, 3, 31.7},   {2, 1, 3, 1, 31.7},
        {3, 3, 3, 3, 110.0},  {2, 1, 2, 1, 64.4},
        {2, 1, 2, 1, 64.4},   {2, 3, 2, 1, -25.3},
        {1, 2, 3, 2, -25.3},  {1, 3, 3, 1, 25.3},
        {1, 3, 3, 1, 25.3},   {3, 1, 1, 2, 44.8},
        {1, 3, 2, 1, 44.8},   {2, 1, 3, 2, -35.84},
        {1, 2, 2, 3, -35.84}, {1, 1, 2, 2, 132.2},
    };
    return from_assignments(3, 3, assigns);
}

HierSymTensor make_ex43() {
    // Nine 3x3 slices, slice (k,l) holding entries a_{ijkl} at row i, col j.
    static const double slices[3][3][9] = {
        {
            // l = 1
            {-0.9727, 0.3169, -0.3437, -0.6332, -0.7866, 0.4257, -0.3350, -0.9896, -0.4323},
            // l = 2
            {0.3169, 0.6158, -0.0184, -0.7866, 0.0160, 0.0085, -0.9896, -0.6663, 0.2559},
            // l = 3
            {-0.3437, -0.0184, 0.5649, 0.4257, 0.0085, -0.1439, -0.4323, 0.2559, 0.6162},
        },
        {
            {-0.6332, -0.7866, 0.4257, 0.7387, 0.6873, -0.3248, -0.7986, -0.5988, -0.9485},
            {-0.7866, 0.0160, 0.0085, 0.6873, 0.5160, -0.0216, -0.5988, 0.0411, 0.9857},
            {0.4257, 0.0085, -0.1439, -0.3248, -0.0216, -0.0037, -0.9485, 0.9857, -0.7734},
        },
        {
            {-0.3350, -0.9896, -0.4323, -0.7986, -0.5988, -0.9485, 0.5853, 0.5921, 0.6301},
            {-0.9896, -0.6663, 0.2559, -0.5988, 0.0411, 0.9857, 0.5921, -0.2907, -0.3881},
            {-0.4323, 0.2559, 0.6162, -0.9485, 0.9857, -0.7734, 0.6301, -0.3881, -0.8526},
        },
    };
    std::vector<double> raw(total_size(3, 3), 0.0);
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    raw[flat_index(3, 3, i, j, k, l)] = slices[k][l][i * 3 + j];

    const SymmetryCheck check = validate_symmetry(3, 3, raw, 1e-12);
    if (check.ok) return HierSymTensor::from_entries(3, 3, std::move(raw), 1e-12);
    if (check.max_violation <= 1e-3) return HierSymTensor::symmetrized(3, 3, std::move(raw));
    throw ValueError("ex43 table violates symmetry by " + std::to_string(check.max_violation));
}

HierSymTensor make_rank_one_neg() {
    std::vector<double> raw(total_size(2, 2), 0.0);
    raw[flat_index(2, 2, 0, 0, 0, 0)] = -1.0;
    return HierSymTensor::from_entries(2, 2, std::move(raw), 0.0);
}

} // namespace

HierSymTensor fixture(const std::string& name) {
    if (name == "ex41") return make_ex41();
    if (name == "ex42") return make_ex42();
    if (name == "ex43") return make_ex43();
    if (name == "rank_one_neg") return make_rank_one_neg();
    throw ConfigError("unknown fixture \"" + name +
                      "\" (known: ex41, ex42, ex43, rank_one_neg)");
}

} // namespace meig
