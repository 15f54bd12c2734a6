// Copyright 2026 The QGK Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Gate alphabet, circuit IR, and a dense statevector simulator.
//
// Conventions, fixed project-wide:
//   - qubit 0 is the least-significant bit of the amplitude index;
//   - two-qubit matrices are indexed (control, target) with the control as
//     the high bit of the 4x4 index;
//   - ECR == (X (x) I - Y (x) X) / sqrt(2) in control (x) target order.
//     This matrix is Hermitian and self-inverse, and is locally equivalent
//     to CX (enforced by test);
//   - global phase is ignored everywhere.

#ifndef QGK_CIRCUIT_HPP
#define QGK_CIRCUIT_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qgk/common.hpp"

namespace qgk {

using cplx = std::complex<double>;

inline constexpr int kMaxSimQubits = 20;

enum class GateKind : int {
    I = 0,
    H,
    X,
    SX,
    RX,
    RY,
    RZ,
    CX,
    CZ,
    ECR,
    CRX,
    CRY,
    CRZ,
};

inline constexpr int kGateKindCount = 13;

constexpr bool is_parametric(GateKind k) {
    return k == GateKind::RX || k == GateKind::RY || k == GateKind::RZ ||
           k == GateKind::CRX || k == GateKind::CRY || k == GateKind::CRZ;
}

constexpr bool is_two_qubit(GateKind k) {
    return k == GateKind::CX || k == GateKind::CZ || k == GateKind::ECR ||
           k == GateKind::CRX || k == GateKind::CRY || k == GateKind::CRZ;
}

inline const char* gate_name(GateKind k) {
    switch (k) {
        case GateKind::I: return "I";
        case GateKind::H: return "H";
        case GateKind::X: return "X";
        case GateKind::SX: return "SX";
        case GateKind::RX: return "RX";
        case GateKind::RY: return "RY";
        case GateKind::RZ: return "RZ";
        case GateKind::CX: return "CX";
        case GateKind::CZ: return "CZ";
        case GateKind::ECR: return "ECR";
        case GateKind::CRX: return "CRX";
        case GateKind::CRY: return "CRY";
        case GateKind::CRZ: return "CRZ";
    }
    throw data_error("unknown gate kind");
}

inline GateKind gate_from_name(std::string_view name) {
    for (int i = 0; i < kGateKindCount; ++i) {
        auto k = static_cast<GateKind>(i);
        if (name == gate_name(k)) return k;
    }
    throw data_error("unknown gate name: " + std::string(name));
}

/// One gate applied to specific qubits. For two-qubit kinds, qubit0 is the
/// control and qubit1 the target; for single-qubit kinds qubit1 is -1.
/// The angle field is meaningful only for parametric kinds.
struct GateInstance {
    GateKind kind = GateKind::I;
    int qubit0 = 0;
    int qubit1 = -1;
    double angle = 0.0;

    bool operator==(const GateInstance& o) const {
        return kind == o.kind && qubit0 == o.qubit0 && qubit1 == o.qubit1 &&
               angle == o.angle;
    }
};

struct Circuit {
    int qubit_count = 0;
    std::vector<GateInstance> gates;
};

/// Row-major 2x2 (dim=2) or 4x4 (dim=4) complex matrix.
struct GateMatrix {
    int dim = 2;
    std::array<cplx, 16> a{};

    cplx& at(int r, int c) { return a[static_cast<std::size_t>(r * dim + c)]; }
    const cplx& at(int r, int c) const {
        return a[static_cast<std::size_t>(r * dim + c)];
    }

    GateMatrix dagger() const {
        GateMatrix out;
        out.dim = dim;
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) out.at(r, c) = std::conj(at(c, r));
        return out;
    }
};

inline GateMatrix gate_unitary(GateKind kind, std::optional<double> angle = {}) {
    if (is_parametric(kind) && !angle)
        throw data_error(std::string("missing angle for parametric gate ") +
                         gate_name(kind));
    if (!is_parametric(kind) && angle)
        throw data_error(std::string("angle given for non-parametric gate ") +
                         gate_name(kind));

    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    GateMatrix m;
    auto set2 = [&](cplx a00, cplx a01, cplx a10, cplx a11) {
        m.dim = 2;
        m.at(0, 0) = a00;
        m.at(0, 1) = a01;
        m.at(1, 0) = a10;
        m.at(1, 1) = a11;
    };
    const double t = angle.value_or(0.0);
    const double c = std::cos(t / 2.0);
    const double s = std::sin(t / 2.0);
    const cplx i1(0.0, 1.0);

    switch (kind) {
        case GateKind::I:
            set2(1, 0, 0, 1);
            return m;
        case GateKind::H:
            set2(inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2);
            return m;
        case GateKind::X:
            set2(0, 1, 1, 0);
            return m;
        case GateKind::SX:
            set2(cplx(0.5, 0.5), cplx(0.5, -0.5), cplx(0.5, -0.5), cplx(0.5, 0.5));
            return m;
        case GateKind::RX:
            set2(c, -i1 * s, -i1 * s, c);
            return m;
        case GateKind::RY:
            set2(c, -s, s, c);
            return m;
        case GateKind::RZ:
            set2(std::exp(-i1 * (t / 2.0)), 0, 0, std::exp(i1 * (t / 2.0)));
            return m;
        default:
            break;
    }

    // Two-qubit kinds. Control is the high bit of the 4x4 index.
    m.dim = 4;
    switch (kind) {
        case GateKind::CX:
            m.at(0, 0) = 1;
            m.at(1, 1) = 1;
            m.at(2, 3) = 1;
            m.at(3, 2) = 1;
            return m;
        case GateKind::CZ:
            m.at(0, 0) = 1;
            m.at(1, 1) = 1;
            m.at(2, 2) = 1;
            m.at(3, 3) = -1;
            return m;
        case GateKind::ECR:
            m.at(0, 2) = inv_sqrt2;
            m.at(0, 3) = i1 * inv_sqrt2;
            m.at(1, 2) = i1 * inv_sqrt2;
            m.at(1, 3) = inv_sqrt2;
            m.at(2, 0) = inv_sqrt2;
            m.at(2, 1) = -i1 * inv_sqrt2;
            m.at(3, 0) = -i1 * inv_sqrt2;
            m.at(3, 1) = inv_sqrt2;
            return m;
        case GateKind::CRX:
        case GateKind::CRY:
        case GateKind::CRZ: {
            GateKind base = kind == GateKind::CRX   ? GateKind::RX
                            : kind == GateKind::CRY ? GateKind::RY
                                                    : GateKind::RZ;
            GateMatrix r = gate_unitary(base, t);
            m.at(0, 0) = 1;
            m.at(1, 1) = 1;
            for (int rr = 0; rr < 2; ++rr)
                for (int cc = 0; cc < 2; ++cc) m.at(2 + rr, 2 + cc) = r.at(rr, cc);
            return m;
        }
        default:
            throw data_error("unhandled gate kind");
    }
}

struct Statevector {
    int qubit_count = 0;
    std::vector<cplx> amps;

    static Statevector zero(int qubits) { return basis(qubits, 0); }

    static Statevector basis(int qubits, std::uint64_t index) {
        if (qubits < 1 || qubits > kMaxSimQubits)
            throw data_error("qubit count out of simulator range");
        Statevector sv;
        sv.qubit_count = qubits;
        sv.amps.assign(std::size_t{1} << qubits, cplx(0.0, 0.0));
        sv.amps.at(index) = 1.0;
        return sv;
    }

    double norm() const {
        double n2 = 0.0;
        for (const cplx& a : amps) n2 += std::norm(a);
        return std::sqrt(n2);
    }
};

inline cplx inner_product(const Statevector& a, const Statevector& b) {
    if (a.amps.size() != b.amps.size())
        throw data_error("statevector dimension mismatch");
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < a.amps.size(); ++i)
        acc += std::conj(a.amps[i]) * b.amps[i];
    return acc;
}

inline void apply_1q(Statevector& sv, const GateMatrix& m, int qubit) {
    const std::uint64_t mask = std::uint64_t{1} << qubit;
    const std::uint64_t lo_mask = mask - 1;
    const std::uint64_t hi_mask = ~lo_mask;
    const std::uint64_t half = std::uint64_t{1} << (sv.qubit_count - 1);
    for (std::uint64_t i = 0; i < half; ++i) {
        const std::uint64_t i0 = ((i & hi_mask) << 1) | (i & lo_mask);
        const std::uint64_t i1 = i0 | mask;
        const cplx a0 = sv.amps[i0];
        const cplx a1 = sv.amps[i1];
        sv.amps[i0] = m.at(0, 0) * a0 + m.at(0, 1) * a1;
        sv.amps[i1] = m.at(1, 0) * a0 + m.at(1, 1) * a1;
    }
}

/// Applies a 4x4 matrix indexed (control, target) to the amplitude pairs
/// selected by the two qubit positions.
inline void apply_2q(Statevector& sv, const GateMatrix& m, int control, int target) {
    const int qa = control < target ? control : target;
    const int qb = control < target ? target : control;
    const std::uint64_t mc = std::uint64_t{1} << control;
    const std::uint64_t mt = std::uint64_t{1} << target;
    const std::uint64_t quarter = std::uint64_t{1} << (sv.qubit_count - 2);
    auto insert_zero = [](std::uint64_t v, int pos) {
        const std::uint64_t low = v & ((std::uint64_t{1} << pos) - 1);
        return ((v >> pos) << (pos + 1)) | low;
    };
    for (std::uint64_t i = 0; i < quarter; ++i) {
        const std::uint64_t base = insert_zero(insert_zero(i, qa), qb);
        const std::uint64_t idx[4] = {base, base | mt, base | mc, base | mc | mt};
        cplx in[4];
        for (int k = 0; k < 4; ++k) in[k] = sv.amps[idx[k]];
        for (int r = 0; r < 4; ++r) {
            cplx acc(0.0, 0.0);
            for (int cidx = 0; cidx < 4; ++cidx) acc += m.at(r, cidx) * in[cidx];
            sv.amps[idx[r]] = acc;
        }
    }
}

inline void apply_gate(Statevector& sv, const GateInstance& g) {
    if (g.qubit0 < 0 || g.qubit0 >= sv.qubit_count)
        throw data_error("gate qubit index out of range");
    std::optional<double> angle;
    if (is_parametric(g.kind)) angle = g.angle;
    const GateMatrix m = gate_unitary(g.kind, angle);
    if (is_two_qubit(g.kind)) {
        if (g.qubit1 < 0 || g.qubit1 >= sv.qubit_count || g.qubit1 == g.qubit0)
            throw data_error("gate qubit index out of range");
        apply_2q(sv, m, g.qubit0, g.qubit1);
    } else {
        apply_1q(sv, m, g.qubit0);
    }
}

/// Runs the circuit on |0...0>, applying gates in list order.
inline Statevector run_statevector(const Circuit& c) {
    if (c.qubit_count > kMaxSimQubits)
        throw data_error("qubit count exceeds simulator cap");
    Statevector sv = Statevector::zero(c.qubit_count);
    for (const GateInstance& g : c.gates) apply_gate(sv, g);
    return sv;
}

}  // namespace qgk

#endif  // QGK_CIRCUIT_HPP
