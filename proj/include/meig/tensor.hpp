#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "meig/errors.hpp"
#include "meig/vec.hpp"

namespace meig {

/// Result of a symmetry scan over a raw 4-way array.
struct SymmetryCheck {
    bool ok = false;
    double max_violation = 0.0;
};

/// Fourth-order tensor over R^{m x n x m x n} with the hierarchical symmetry
///   a_{ijkl} = a_{kjil} = a_{ilkj} = a_{klij},
/// the symmetry class of elasticity stiffness tensors. Storage is dense
/// row-major over (i, j, k, l), 0-based internally. Instances are immutable
/// after construction and safe to share across threads.
class HierSymTensor {
public:
    /// Validating constructor: requires the raw entries to satisfy the
    /// symmetry within `tol` (absolute) and to be finite.
    static HierSymTensor from_entries(int m, int n, std::vector<double> entries,
                                      double tol = 1e-12);

    /// Projecting constructor: replaces each entry by the mean over its
    /// 4-element symmetry orbit. The result is exactly symmetric.
    static HierSymTensor symmetrized(int m, int n, std::vector<double> entries);

    static HierSymTensor zero(int m, int n);

    int m() const { return m_; }
    int n() const { return n_; }

    double at(int i, int j, int k, int l) const {
        return entries_[index(i, j, k, l)];
    }

    const std::vector<double>& entries() const { return entries_; }

    std::size_t index(int i, int j, int k, int l) const {
        return ((static_cast<std::size_t>(i) * n_ + j) * m_ + k) * n_ + l;
    }

    bool operator==(const HierSymTensor& other) const = default;

private:
    HierSymTensor(int m, int n, std::vector<double> entries)
        : m_(m), n_(n), entries_(std::move(entries)) {}

    int m_ = 0;
    int n_ = 0;
    std::vector<double> entries_;
};

/// Scans a raw array of shape m x n x m x n for violations of the
/// hierarchical symmetry. Returns ok iff every orbit is uniform within
/// `tol` (absolute), along with the largest deviation found.
SymmetryCheck validate_symmetry(int m, int n, std::span<const double> raw,
                                double tol = 1e-12);

/// Orbit-mean projection onto the symmetry class. Idempotent and linear.
std::vector<double> symmetrize_entries(int m, int n, std::span<const double> raw);

/// (A.yxy)_i = sum_{j,k,l} a_{ijkl} y_j x_k y_l,  a vector in R^m.
Vec contract_x(const HierSymTensor& t, std::span<const double> x, std::span<const double> y);

/// (Axyx.)_l = sum_{i,j,k} a_{ijkl} x_i y_j x_k,  a vector in R^n.
Vec contract_y(const HierSymTensor& t, std::span<const double> x, std::span<const double> y);

/// The biquadratic form Axyxy = x'(A.yxy) = y'(Axyx.).
double contract_scalar(const HierSymTensor& t, std::span<const double> x,
                       std::span<const double> y);

/// Elementwise negation / scaling; both preserve the symmetry class.
HierSymTensor negated(const HierSymTensor& t);
HierSymTensor scaled(const HierSymTensor& t, double c);

/// Sum of absolute entry values.
double abs_entry_sum(const HierSymTensor& t);

/// Largest absolute entry value.
double max_abs_entry(const HierSymTensor& t);

// ---------------------------------------------------------------------------
// Construction specs and file I/O
// ---------------------------------------------------------------------------

struct DenseSource {
    std::vector<double> entries; // row-major, m*n*m*n values
};

struct SparseEntry {
    int i, j, k, l; // 1-based, as in the file format
    double value;
};

struct SparseSource {
    std::vector<SparseEntry> entries;
};

struct GeneratorSource {
    double low;
    double high;
    std::uint64_t seed;
};

/// Declarative description of a tensor: dimensions plus one source.
struct TensorSpec {
    int m = 0;
    int n = 0;
    std::variant<DenseSource, SparseSource, GeneratorSource> source;
};

/// Builds the tensor a spec describes. Dense sources are validated
/// (tolerance 1e-9, text-format round-off); sparse entries are expanded over
/// their symmetry orbits and then symmetrized; generator sources draw i.i.d.
/// uniform(low, high) entries from a seeded stream and symmetrize. Identical
/// spec -> bit-identical tensor.
HierSymTensor realize(const TensorSpec& spec);

/// Uniform(low, high) random member of the symmetry class; shorthand for
/// realize with a GeneratorSource.
HierSymTensor generate_random(int m, int n, double low, double high, std::uint64_t seed);

/// JSON tensor file: {"m": .., "n": .., "dense": [[[[..]]]]} or
/// {"m": .., "n": .., "sparse": [[i,j,k,l,value], ..]} with 1-based sparse
/// indices. store() writes >= 17 significant digits so a round trip is exact.
void store_tensor(const HierSymTensor& t, const std::string& path);
HierSymTensor load_tensor(const std::string& path, double* pre_symmetrization_violation = nullptr);

/// Built-in reference tensors: "ex41", "ex42", "ex43" (small fixed instances
/// with known extreme M-eigenvalues) and "rank_one_neg" (a 2x2x2x2 tensor
/// with no positive M-eigenvalue, exercising the shifted solve path).
HierSymTensor fixture(const std::string& name);

} // namespace meig
