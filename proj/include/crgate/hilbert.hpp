// Truncated Hilbert space of n three-level systems coupled to one cavity mode,
// plus the elementary and collective operators every Hamiltonian is built from.
//
// Basis ordering is row-major: the qutrit digits of systems 0..n-1 form the most
// significant part of the index (system 0 first), the photon number is the
// least significant part.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace crgate {

using cplx = std::complex<double>;
using SparseMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<cplx>;

inline constexpr int kLevels = 3;
inline constexpr int kDefaultPhotonCutoff = 3;

class SpaceDescriptor {
public:
    SpaceDescriptor() = default;

    SpaceDescriptor(int n_systems, int photon_cutoff)
        : n_systems_(n_systems), photon_cutoff_(photon_cutoff) {
        if (n_systems < 2) {
            throw std::invalid_argument("build_space: n_systems must be >= 2 (one control plus the target)");
        }
        if (photon_cutoff < 2) {
            throw std::invalid_argument("build_space: photon_cutoff must be >= 2");
        }
        // 3^13 * cutoff already exceeds anything a dense step can handle.
        if (n_systems > 13) {
            throw std::invalid_argument("build_space: n_systems too large for this simulator");
        }
        qutrit_dim_ = 1;
        for (int s = 0; s < n_systems; ++s) qutrit_dim_ *= kLevels;
        dim_ = qutrit_dim_ * static_cast<std::size_t>(photon_cutoff);
    }

    int n_systems() const { return n_systems_; }
    int levels() const { return kLevels; }
    int photon_cutoff() const { return photon_cutoff_; }
    std::size_t dim() const { return dim_; }
    std::size_t qutrit_dim() const { return qutrit_dim_; }
    int n_controls() const { return n_systems_ - 1; }
    std::size_t target() const { return static_cast<std::size_t>(n_systems_ - 1); }

    std::size_t index(const std::vector<int>& digits, int photons) const {
        if (static_cast<int>(digits.size()) != n_systems_) {
            throw std::invalid_argument("SpaceDescriptor::index: expected " + std::to_string(n_systems_) +
                                        " digits, got " + std::to_string(digits.size()));
        }
        if (photons < 0 || photons >= photon_cutoff_) {
            throw std::invalid_argument("SpaceDescriptor::index: photon number " + std::to_string(photons) +
                                        " outside [0, " + std::to_string(photon_cutoff_) + ")");
        }
        std::size_t q = 0;
        for (int d : digits) {
            if (d < 0 || d >= kLevels) {
                throw std::invalid_argument("SpaceDescriptor::index: digit " + std::to_string(d) +
                                            " outside {0,1,2}");
            }
            q = q * kLevels + static_cast<std::size_t>(d);
        }
        return q * static_cast<std::size_t>(photon_cutoff_) + static_cast<std::size_t>(photons);
    }

    std::pair<std::vector<int>, int> decode(std::size_t idx) const {
        if (idx >= dim_) throw std::out_of_range("SpaceDescriptor::decode: index out of range");
        const int photons = static_cast<int>(idx % static_cast<std::size_t>(photon_cutoff_));
        std::size_t q = idx / static_cast<std::size_t>(photon_cutoff_);
        std::vector<int> digits(static_cast<std::size_t>(n_systems_));
        for (int s = n_systems_ - 1; s >= 0; --s) {
            digits[static_cast<std::size_t>(s)] = static_cast<int>(q % kLevels);
            q /= kLevels;
        }
        return {std::move(digits), photons};
    }

    int digit(std::size_t idx, std::size_t sys) const {
        std::size_t q = idx / static_cast<std::size_t>(photon_cutoff_);
        for (std::size_t s = static_cast<std::size_t>(n_systems_) - 1; s > sys; --s) q /= kLevels;
        return static_cast<int>(q % kLevels);
    }

    int photons(std::size_t idx) const { return static_cast<int>(idx % static_cast<std::size_t>(photon_cutoff_)); }

    // Stride of system `sys` in the flat index.
    std::size_t stride(std::size_t sys) const {
        std::size_t st = static_cast<std::size_t>(photon_cutoff_);
        for (std::size_t s = static_cast<std::size_t>(n_systems_) - 1; s > sys; --s) st *= kLevels;
        return st;
    }

    // Label such as "110|1|0c": control digits, target digit, photon count.
    std::string label(std::size_t idx) const {
        auto [digits, ph] = decode(idx);
        std::string out;
        for (std::size_t s = 0; s + 1 < digits.size(); ++s) out += static_cast<char>('0' + digits[s]);
        out += '|';
        out += static_cast<char>('0' + digits.back());
        out += '|';
        out += std::to_string(ph);
        out += 'c';
        return out;
    }

    friend bool operator==(const SpaceDescriptor& a, const SpaceDescriptor& b) {
        return a.n_systems_ == b.n_systems_ && a.photon_cutoff_ == b.photon_cutoff_;
    }

private:
    int n_systems_ = 0;
    int photon_cutoff_ = 0;
    std::size_t qutrit_dim_ = 0;
    std::size_t dim_ = 0;
};

inline SpaceDescriptor build_space(int n_systems, int photon_cutoff = kDefaultPhotonCutoff) {
    return SpaceDescriptor(n_systems, photon_cutoff);
}

inline void require_same_space(const SpaceDescriptor& a, const SpaceDescriptor& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": space mismatch");
}

struct KetState {
    SpaceDescriptor space;
    Eigen::VectorXcd amplitudes;

    KetState() = default;
    explicit KetState(const SpaceDescriptor& s) : space(s), amplitudes(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(s.dim()))) {}
    KetState(const SpaceDescriptor& s, Eigen::VectorXcd amps) : space(s), amplitudes(std::move(amps)) {
        if (static_cast<std::size_t>(amplitudes.size()) != space.dim()) {
            throw std::invalid_argument("KetState: amplitude length does not match space dimension");
        }
    }

    double norm() const { return amplitudes.norm(); }

    KetState& normalize() {
        const double nrm = norm();
        if (nrm == 0.0) throw std::domain_error("KetState::normalize: zero vector");
        amplitudes /= nrm;
        return *this;
    }

    cplx operator[](std::size_t idx) const { return amplitudes[static_cast<Eigen::Index>(idx)]; }

    KetState& operator+=(const KetState& o) {
        require_same_space(space, o.space, "KetState::operator+=");
        amplitudes += o.amplitudes;
        return *this;
    }
    KetState& operator-=(const KetState& o) {
        require_same_space(space, o.space, "KetState::operator-=");
        amplitudes -= o.amplitudes;
        return *this;
    }
    KetState& operator*=(cplx s) {
        amplitudes *= s;
        return *this;
    }
};

inline KetState operator+(KetState a, const KetState& b) { return a += b; }
inline KetState operator-(KetState a, const KetState& b) { return a -= b; }
inline KetState operator*(cplx s, KetState a) { return a *= s; }

inline cplx inner_product(const KetState& a, const KetState& b) {
    require_same_space(a.space, b.space, "inner_product");
    return a.amplitudes.dot(b.amplitudes);  // conjugates the first argument
}

inline double fidelity(const KetState& a, const KetState& b) { return std::norm(inner_product(a, b)); }

inline KetState basis_state(const SpaceDescriptor& space, const std::vector<int>& digits, int photons) {
    KetState k(space);
    k.amplitudes[static_cast<Eigen::Index>(space.index(digits, photons))] = 1.0;
    return k;
}

struct LinearOperator {
    SpaceDescriptor space;
    SparseMat matrix;

    LinearOperator() = default;
    explicit LinearOperator(const SpaceDescriptor& s)
        : space(s), matrix(static_cast<Eigen::Index>(s.dim()), static_cast<Eigen::Index>(s.dim())) {}
    LinearOperator(const SpaceDescriptor& s, SparseMat m) : space(s), matrix(std::move(m)) {
        if (static_cast<std::size_t>(matrix.rows()) != space.dim() ||
            static_cast<std::size_t>(matrix.cols()) != space.dim()) {
            throw std::invalid_argument("LinearOperator: matrix shape does not match space dimension");
        }
        matrix.makeCompressed();
    }

    Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(matrix); }

    LinearOperator adjoint() const { return {space, SparseMat(matrix.adjoint())}; }

    // Largest entry magnitude.
    double max_abs() const {
        double m = 0.0;
        for (Eigen::Index k = 0; k < matrix.outerSize(); ++k)
            for (SparseMat::InnerIterator it(matrix, k); it; ++it) m = std::max(m, std::abs(it.value()));
        return m;
    }

    // Induced 1-norm (max column sum).
    double norm1() const {
        Eigen::VectorXd col = Eigen::VectorXd::Zero(matrix.cols());
        for (Eigen::Index k = 0; k < matrix.outerSize(); ++k)
            for (SparseMat::InnerIterator it(matrix, k); it; ++it) col[it.col()] += std::abs(it.value());
        return matrix.cols() == 0 ? 0.0 : col.maxCoeff();
    }

    LinearOperator& operator+=(const LinearOperator& o) {
        require_same_space(space, o.space, "LinearOperator::operator+=");
        matrix += o.matrix;
        return *this;
    }
    LinearOperator& operator-=(const LinearOperator& o) {
        require_same_space(space, o.space, "LinearOperator::operator-=");
        matrix -= o.matrix;
        return *this;
    }
    LinearOperator& operator*=(cplx s) {
        matrix *= s;
        return *this;
    }
};

inline LinearOperator operator+(LinearOperator a, const LinearOperator& b) { return a += b; }
inline LinearOperator operator-(LinearOperator a, const LinearOperator& b) { return a -= b; }
inline LinearOperator operator*(cplx s, LinearOperator a) { return a *= s; }
inline LinearOperator operator*(double s, LinearOperator a) { return a *= cplx(s, 0.0); }

inline LinearOperator compose(const LinearOperator& a, const LinearOperator& b) {
    require_same_space(a.space, b.space, "compose");
    return {a.space, SparseMat(a.matrix * b.matrix)};
}
inline LinearOperator operator*(const LinearOperator& a, const LinearOperator& b) { return compose(a, b); }

inline LinearOperator commutator(const LinearOperator& a, const LinearOperator& b) { return a * b - b * a; }

inline KetState apply(const LinearOperator& op, const KetState& state) {
    require_same_space(op.space, state.space, "apply");
    return {state.space, op.matrix * state.amplitudes};
}

inline bool is_hermitian(const LinearOperator& op, double tol = 1e-12) {
    return (op - op.adjoint()).max_abs() < tol;
}

inline LinearOperator identity_op(const SpaceDescriptor& space) {
    SparseMat m(static_cast<Eigen::Index>(space.dim()), static_cast<Eigen::Index>(space.dim()));
    m.setIdentity();
    return {space, std::move(m)};
}

inline LinearOperator zero_op(const SpaceDescriptor& space) { return LinearOperator(space); }

// |i><j| on system `sys`, identity on every other system and on the cavity.
inline LinearOperator transition_op(const SpaceDescriptor& space, std::size_t sys, int i, int j) {
    if (sys >= static_cast<std::size_t>(space.n_systems())) {
        throw std::out_of_range("transition_op: system index " + std::to_string(sys) + " out of range");
    }
    if (i < 0 || i >= kLevels || j < 0 || j >= kLevels) {
        throw std::out_of_range("transition_op: level outside {0,1,2}");
    }
    const std::size_t st = space.stride(sys);
    std::vector<Triplet> trips;
    trips.reserve(space.dim() / kLevels);
    for (std::size_t col = 0; col < space.dim(); ++col) {
        if (space.digit(col, sys) != j) continue;
        const std::size_t row = col - static_cast<std::size_t>(j) * st + static_cast<std::size_t>(i) * st;
        trips.emplace_back(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col), 1.0);
    }
    SparseMat m(static_cast<Eigen::Index>(space.dim()), static_cast<Eigen::Index>(space.dim()));
    m.setFromTriplets(trips.begin(), trips.end());
    return {space, std::move(m)};
}

inline LinearOperator projector_op(const SpaceDescriptor& space, std::size_t sys, int level) {
    return transition_op(space, sys, level, level);
}

// a|m> = sqrt(m)|m-1> on the cavity factor.
inline LinearOperator annihilation_op(const SpaceDescriptor& space) {
    std::vector<Triplet> trips;
    for (std::size_t col = 0; col < space.dim(); ++col) {
        const int m = space.photons(col);
        if (m == 0) continue;
        trips.emplace_back(static_cast<Eigen::Index>(col - 1), static_cast<Eigen::Index>(col),
                           std::sqrt(static_cast<double>(m)));
    }
    SparseMat mat(static_cast<Eigen::Index>(space.dim()), static_cast<Eigen::Index>(space.dim()));
    mat.setFromTriplets(trips.begin(), trips.end());
    return {space, std::move(mat)};
}

// Truncated a+; annihilates the top Fock level.
inline LinearOperator creation_op(const SpaceDescriptor& space) { return annihilation_op(space).adjoint(); }

inline LinearOperator number_op(const SpaceDescriptor& space) {
    std::vector<Triplet> trips;
    for (std::size_t idx = 0; idx < space.dim(); ++idx) {
        const int m = space.photons(idx);
        if (m != 0) trips.emplace_back(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(idx), double(m));
    }
    SparseMat mat(static_cast<Eigen::Index>(space.dim()), static_cast<Eigen::Index>(space.dim()));
    mat.setFromTriplets(trips.begin(), trips.end());
    return {space, std::move(mat)};
}

struct CollectiveOps {
    LinearOperator splus;
    LinearOperator sminus;
    LinearOperator sz;
};

inline void check_subset(const SpaceDescriptor& space, const std::vector<std::size_t>& subset, const char* what) {
    if (subset.empty()) throw std::invalid_argument(std::string(what) + ": empty system subset");
    for (std::size_t s : subset) {
        if (s >= static_cast<std::size_t>(space.n_systems())) {
            throw std::out_of_range(std::string(what) + ": system index " + std::to_string(s) + " out of range");
        }
    }
    std::vector<std::size_t> sorted = subset;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw std::invalid_argument(std::string(what) + ": duplicate system index");
    }
}

// S+ = sum_j |2><1|_j, S- = (S+)^dagger, Sz = 1/2 sum_j (|2><2|_j - |1><1|_j).
inline CollectiveOps collective_ops(const SpaceDescriptor& space, const std::vector<std::size_t>& subset) {
    check_subset(space, subset, "collective_ops");
    LinearOperator sp(space), sz(space);
    for (std::size_t j : subset) {
        sp += transition_op(space, j, 2, 1);
        sz += 0.5 * (projector_op(space, j, 2) - projector_op(space, j, 1));
    }
    LinearOperator sm = sp.adjoint();
    return {std::move(sp), std::move(sm), std::move(sz)};
}

// Control systems are 0..n-2; the target is n-1.
inline std::vector<std::size_t> control_systems(const SpaceDescriptor& space) {
    std::vector<std::size_t> out(static_cast<std::size_t>(space.n_controls()));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
    return out;
}

// Embeds a state of the control register (dimension 3^(n-1), same digit
// ordering) with the target in `target_level` and `photons` in the cavity.
inline KetState embed_register_state(const SpaceDescriptor& space, const Eigen::VectorXcd& reg, int target_level,
                                     int photons) {
    const std::size_t reg_dim = space.qutrit_dim() / kLevels;
    if (static_cast<std::size_t>(reg.size()) != reg_dim) {
        throw std::invalid_argument("embed_register_state: register vector has wrong length");
    }
    if (target_level < 0 || target_level >= kLevels) throw std::invalid_argument("embed_register_state: bad target level");
    if (photons < 0 || photons >= space.photon_cutoff()) throw std::invalid_argument("embed_register_state: bad photon number");
    KetState out(space);
    const auto cutoff = static_cast<std::size_t>(space.photon_cutoff());
    for (std::size_t r = 0; r < reg_dim; ++r) {
        const std::size_t idx = (r * kLevels + static_cast<std::size_t>(target_level)) * cutoff + static_cast<std::size_t>(photons);
        out.amplitudes[static_cast<Eigen::Index>(idx)] = reg[static_cast<Eigen::Index>(r)];
    }
    return out;
}

// Lifts a control-register operator to the full space as reg_op (x) 1_target (x) 1_cavity.
inline LinearOperator embed_register_op(const SpaceDescriptor& space, const Eigen::MatrixXcd& reg_op) {
    const std::size_t reg_dim = space.qutrit_dim() / kLevels;
    if (static_cast<std::size_t>(reg_op.rows()) != reg_dim || static_cast<std::size_t>(reg_op.cols()) != reg_dim) {
        throw std::invalid_argument("embed_register_op: register operator has wrong shape");
    }
    const std::size_t rest = kLevels * static_cast<std::size_t>(space.photon_cutoff());
    std::vector<Triplet> trips;
    for (Eigen::Index r = 0; r < reg_op.rows(); ++r) {
        for (Eigen::Index c = 0; c < reg_op.cols(); ++c) {
            const cplx v = reg_op(r, c);
            if (v == cplx(0.0, 0.0)) continue;
            for (std::size_t k = 0; k < rest; ++k) {
                trips.emplace_back(static_cast<Eigen::Index>(static_cast<std::size_t>(r) * rest + k),
                                   static_cast<Eigen::Index>(static_cast<std::size_t>(c) * rest + k), v);
            }
        }
    }
    SparseMat m(static_cast<Eigen::Index>(space.dim()), static_cast<Eigen::Index>(space.dim()));
    m.setFromTriplets(trips.begin(), trips.end());
    return {space, std::move(m)};
}

}  // namespace crgate
