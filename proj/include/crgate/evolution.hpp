// Unitary time evolution U = exp(-i H t).
//
// Exact propagators are built by splitting H into its invariant blocks (the
// connected components of the sparsity graph) and diagonalising each block.
// Protocol Hamiltonians conserve excitation number and the |0> pattern of the
// controls, so the blocks stay small even when the full space is large.
// When a block is too large for dense diagonalisation, evolve() falls back to
// a truncated Taylor series applied to the state.

#pragma once

#include "crgate/hilbert.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace crgate {

inline constexpr std::size_t kMaxDenseBlock = 4096;

namespace detail {

inline std::size_t uf_find(std::vector<std::size_t>& parent, std::size_t x) {
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

}  // namespace detail

// Index sets of the connected components of H's nonzero pattern, each sorted,
// ordered by smallest index.
inline std::vector<std::vector<Eigen::Index>> invariant_blocks(const SparseMat& h) {
    const auto n = static_cast<std::size_t>(h.rows());
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    for (Eigen::Index k = 0; k < h.outerSize(); ++k) {
        for (SparseMat::InnerIterator it(h, k); it; ++it) {
            if (it.value() == cplx(0.0, 0.0)) continue;
            const auto a = detail::uf_find(parent, static_cast<std::size_t>(it.row()));
            const auto b = detail::uf_find(parent, static_cast<std::size_t>(it.col()));
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    }
    std::vector<std::vector<Eigen::Index>> blocks;
    std::vector<std::size_t> slot(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = detail::uf_find(parent, i);
        if (slot[r] == n) {
            slot[r] = blocks.size();
            blocks.emplace_back();
        }
        blocks[slot[r]].push_back(static_cast<Eigen::Index>(i));
    }
    return blocks;
}

inline void require_hermitian(const LinearOperator& h, const char* what) {
    const double scale = std::max(1.0, h.max_abs());
    if ((h - h.adjoint()).max_abs() > 1e-10 * scale) {
        throw std::invalid_argument(std::string(what) + ": Hamiltonian is not Hermitian");
    }
}

class Propagator {
public:
    struct Block {
        std::vector<Eigen::Index> indices;
        Eigen::MatrixXcd unitary;
    };

    Propagator() = default;
    Propagator(SpaceDescriptor space, double duration, std::string tag, std::vector<Block> blocks)
        : space_(space), duration_(duration), tag_(std::move(tag)), blocks_(std::move(blocks)) {}

    const SpaceDescriptor& space() const { return space_; }
    double duration() const { return duration_; }
    const std::string& hamiltonian_tag() const { return tag_; }
    const std::vector<Block>& blocks() const { return blocks_; }

    // Columns of `states` are evolved independently.
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& states) const {
        if (static_cast<std::size_t>(states.rows()) != space_.dim()) {
            throw std::invalid_argument("Propagator::apply: row count does not match space dimension");
        }
        Eigen::MatrixXcd out(states.rows(), states.cols());
        for (const Block& b : blocks_) {
            const auto m = static_cast<Eigen::Index>(b.indices.size());
            if (m == 1) {
                out.row(b.indices[0]) = b.unitary(0, 0) * states.row(b.indices[0]);
                continue;
            }
            Eigen::MatrixXcd sub(m, states.cols());
            for (Eigen::Index i = 0; i < m; ++i) sub.row(i) = states.row(b.indices[static_cast<std::size_t>(i)]);
            const Eigen::MatrixXcd res = b.unitary * sub;
            for (Eigen::Index i = 0; i < m; ++i) out.row(b.indices[static_cast<std::size_t>(i)]) = res.row(i);
        }
        return out;
    }

    KetState apply(const KetState& state) const {
        require_same_space(space_, state.space, "Propagator::apply");
        return {state.space, Eigen::VectorXcd(apply(Eigen::MatrixXcd(state.amplitudes)))};
    }

    Eigen::MatrixXcd unitary() const {
        const auto n = static_cast<Eigen::Index>(space_.dim());
        Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(n, n);
        for (const Block& b : blocks_) {
            for (std::size_t i = 0; i < b.indices.size(); ++i)
                for (std::size_t j = 0; j < b.indices.size(); ++j)
                    u(b.indices[i], b.indices[j]) = b.unitary(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        return u;
    }

    // max |U+U - I| entry; blocks are orthogonal so the per-block maximum is exact.
    double unitarity_error() const {
        double err = 0.0;
        for (const Block& b : blocks_) {
            const auto m = b.unitary.rows();
            err = std::max(err, (b.unitary.adjoint() * b.unitary - Eigen::MatrixXcd::Identity(m, m)).cwiseAbs().maxCoeff());
        }
        return err;
    }

    std::size_t largest_block() const {
        std::size_t m = 0;
        for (const Block& b : blocks_) m = std::max(m, b.indices.size());
        return m;
    }

private:
    SpaceDescriptor space_;
    double duration_ = 0.0;
    std::string tag_;
    std::vector<Block> blocks_;
};

namespace detail {

inline Eigen::MatrixXcd dense_block(const SparseMat& h, const std::vector<Eigen::Index>& idx) {
    const auto m = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXcd sub = Eigen::MatrixXcd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (SparseMat::InnerIterator it(h, idx[static_cast<std::size_t>(i)]); it; ++it) {
            const auto pos = std::lower_bound(idx.begin(), idx.end(), it.col());
            sub(i, static_cast<Eigen::Index>(pos - idx.begin())) = it.value();
        }
    }
    return sub;
}

inline Eigen::MatrixXcd expm_hermitian(const Eigen::MatrixXcd& h, double t) {
    if (h.rows() == 1) return Eigen::MatrixXcd::Constant(1, 1, std::polar(1.0, -h(0, 0).real() * t));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success) throw std::runtime_error("expm: eigendecomposition failed");
    Eigen::VectorXcd phases(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phases.size(); ++i) phases[i] = std::polar(1.0, -es.eigenvalues()[i] * t);
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

inline Propagator expm_propagator(const LinearOperator& h, double t, std::string tag = {}) {
    require_hermitian(h, "expm_propagator");
    std::vector<Propagator::Block> blocks;
    for (auto& idx : invariant_blocks(h.matrix)) {
        if (idx.size() > kMaxDenseBlock) {
            throw std::invalid_argument("expm_propagator: invariant block of size " + std::to_string(idx.size()) +
                                        " exceeds the dense limit; use evolve()");
        }
        const auto m = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXcd u = t == 0.0 ? Eigen::MatrixXcd::Identity(m, m)
                                      : detail::expm_hermitian(detail::dense_block(h.matrix, idx), t);
        blocks.push_back({std::move(idx), std::move(u)});
    }
    return {h.space, t, std::move(tag), std::move(blocks)};
}

// exp(-i H t) X by a scaled truncated Taylor series.
inline Eigen::MatrixXcd expm_action(const LinearOperator& h, double t, Eigen::MatrixXcd x, double tol = 1e-15) {
    const double scale = h.norm1() * std::abs(t);
    const int substeps = std::max(1, static_cast<int>(std::ceil(scale)));
    const cplx factor(0.0, -t / substeps);
    for (int s = 0; s < substeps; ++s) {
        Eigen::MatrixXcd term = x;
        Eigen::MatrixXcd acc = x;
        const double ref = std::max(x.norm(), 1e-300);
        int small = 0;
        for (int m = 1; m <= 60; ++m) {
            term = (factor / static_cast<double>(m)) * (h.matrix * term);
            acc += term;
            if (term.norm() <= tol * ref) {
                if (++small == 2) break;
            } else {
                small = 0;
            }
        }
        x = std::move(acc);
    }
    return x;
}

inline KetState evolve(const KetState& state, const LinearOperator& h, double t) {
    require_same_space(state.space, h.space, "evolve");
    if (t == 0.0) return state;
    require_hermitian(h, "evolve");
    const auto blocks = invariant_blocks(h.matrix);
    std::size_t largest = 0;
    for (const auto& b : blocks) largest = std::max(largest, b.size());
    if (largest <= kMaxDenseBlock) return expm_propagator(h, t).apply(state);
    return {state.space, Eigen::VectorXcd(expm_action(h, t, Eigen::MatrixXcd(state.amplitudes)))};
}

using TimeDependentHamiltonian = std::function<LinearOperator(double)>;

// Piecewise-constant propagation with H sampled at each slice midpoint
// (exponential midpoint rule, second order in dt). Columns evolve together.
inline Eigen::MatrixXcd evolve_sampled(Eigen::MatrixXcd states, const TimeDependentHamiltonian& h_of_t,
                                       double t_total, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("evolve_sampled: dt must be positive");
    if (!(dt < t_total)) throw std::invalid_argument("evolve_sampled: dt must be smaller than the total time");
    const long steps = static_cast<long>(std::ceil(t_total / dt - 1e-12));
    const double h = t_total / static_cast<double>(steps);
    for (long s = 0; s < steps; ++s) {
        const LinearOperator hm = h_of_t((static_cast<double>(s) + 0.5) * h);
        if (static_cast<Eigen::Index>(hm.space.dim()) != states.rows()) {
            throw std::invalid_argument("evolve_sampled: space mismatch");
        }
        states = expm_action(hm, h, std::move(states));
    }
    return states;
}

inline KetState evolve_sampled(const KetState& state, const TimeDependentHamiltonian& h_of_t, double t_total,
                               double dt) {
    return {state.space, Eigen::VectorXcd(evolve_sampled(Eigen::MatrixXcd(state.amplitudes), h_of_t, t_total, dt))};
}

}  // namespace crgate
