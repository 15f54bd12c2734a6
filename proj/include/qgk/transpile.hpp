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
// Rewrites circuits into a backend basis under a directed coupling map and
// computes the transpiled depth.
//
// Lowering strategy: every two-qubit gate is first expressed through CX plus
// local rotations, CX is then mapped onto the backend's native two-qubit
// gate (one ECR + locals, or CZ conjugated by Hadamards), and remaining
// single-qubit gates take the RZ-SX-RZ-SX-RZ Euler form. Routing inserts
// SWAPs (3 CX each) along shortest undirected paths and flips
// wrong-direction CX by Hadamard conjugation, so a direction mismatch still
// costs exactly one native two-qubit gate.

#ifndef QGK_TRANSPILE_HPP
#define QGK_TRANSPILE_HPP

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>
#include <vector>

#include "qgk/circuit.hpp"
#include "qgk/common.hpp"

namespace qgk {

struct BackendModel {
    std::string name;
    std::vector<GateKind> basis_gates;
    std::vector<std::pair<int, int>> edges;  // (control, target)
    int qubit_count = 0;
    bool directed = true;

    bool in_basis(GateKind k) const {
        return std::find(basis_gates.begin(), basis_gates.end(), k) !=
               basis_gates.end();
    }

    /// The native two-qubit gate (first two-qubit kind listed in the basis).
    GateKind two_qubit_gate() const {
        for (GateKind k : basis_gates)
            if (is_two_qubit(k)) return k;
        throw data_error("backend basis has no two-qubit gate");
    }

    bool has_edge(int a, int b) const {
        for (auto [c, t] : edges)
            if (c == a && t == b) return true;
        return false;
    }

    bool connected(int a, int b) const {
        return has_edge(a, b) || has_edge(b, a);
    }

    std::vector<std::vector<int>> undirected_adjacency() const {
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(qubit_count));
        for (auto [a, b] : edges) {
            adj[static_cast<std::size_t>(a)].push_back(b);
            adj[static_cast<std::size_t>(b)].push_back(a);
        }
        for (auto& v : adj) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        }
        return adj;
    }

    void validate() const {
        if (qubit_count < 1) throw data_error("backend: qubit count must be >= 1");
        if (!in_basis(GateKind::RZ) || !in_basis(GateKind::SX) || !in_basis(GateKind::X))
            throw data_error("backend basis must contain RZ, SX and X");
        two_qubit_gate();
        for (auto [a, b] : edges)
            if (a < 0 || b < 0 || a >= qubit_count || b >= qubit_count || a == b)
                throw data_error("backend: invalid coupling edge");
    }
};

struct TranspiledCircuit {
    Circuit circuit;
    Circuit source;
    // final_layout[q] = backend wire holding qubit q after routing, for every
    // backend wire (entries past the source qubit count track spectator wires
    // displaced by SWAPs). The initial placement is the identity.
    std::vector<int> final_layout;
};

namespace detail {

inline double wrap_angle(double t) {
    constexpr double two_pi = 2.0 * 3.14159265358979323846;
    t = std::fmod(t, two_pi);
    if (t > 3.14159265358979323846) t -= two_pi;
    if (t <= -3.14159265358979323846) t += two_pi;
    return t;
}

inline bool near_zero_angle(double t) { return std::abs(wrap_angle(t)) < 1e-12; }

inline void push_rz(std::vector<GateInstance>& out, int q, double angle) {
    if (near_zero_angle(angle)) return;
    out.push_back({GateKind::RZ, q, -1, wrap_angle(angle)});
}

/// ZYZ Euler angles: u ~ RZ(phi) RY(theta) RZ(lam) up to global phase.
inline void euler_zyz(const GateMatrix& u, double& theta, double& phi, double& lam) {
    const cplx det = u.at(0, 0) * u.at(1, 1) - u.at(0, 1) * u.at(1, 0);
    const cplx s = std::sqrt(det);
    const cplx v00 = u.at(0, 0) / s;
    const cplx v10 = u.at(1, 0) / s;
    const cplx v11 = u.at(1, 1) / s;
    theta = 2.0 * std::atan2(std::abs(v10), std::abs(v00));
    if (std::abs(v10) < 1e-12) {
        lam = 0.0;
        phi = 2.0 * std::arg(v11);
    } else if (std::abs(v00) < 1e-12) {
        lam = 0.0;
        phi = 2.0 * std::arg(v10);
    } else {
        const double sum = 2.0 * std::arg(v11);
        const double diff = 2.0 * std::arg(v10);
        phi = (sum + diff) / 2.0;
        lam = (sum - diff) / 2.0;
    }
}

/// Emits u on qubit q as RZ(lam), SX, RZ(theta+pi), SX, RZ(phi+pi), skipping
/// rotations that reduce to the identity.
inline void emit_euler_zsx(std::vector<GateInstance>& out, const GateMatrix& u, int q) {
    constexpr double pi = 3.14159265358979323846;
    double theta, phi, lam;
    euler_zyz(u, theta, phi, lam);
    if (near_zero_angle(theta)) {
        push_rz(out, q, phi + lam);
        return;
    }
    push_rz(out, q, lam);
    out.push_back({GateKind::SX, q, -1, 0.0});
    push_rz(out, q, theta + pi);
    out.push_back({GateKind::SX, q, -1, 0.0});
    push_rz(out, q, phi + pi);
}

inline void emit_1q(std::vector<GateInstance>& out, const GateInstance& g,
                    const BackendModel& backend) {
    constexpr double pi = 3.14159265358979323846;
    if (g.kind == GateKind::I) return;
    if (backend.in_basis(g.kind)) {
        out.push_back(g);
        return;
    }
    if (g.kind == GateKind::H) {
        push_rz(out, g.qubit0, pi / 2.0);
        out.push_back({GateKind::SX, g.qubit0, -1, 0.0});
        push_rz(out, g.qubit0, pi / 2.0);
        return;
    }
    std::optional<double> angle;
    if (is_parametric(g.kind)) angle = g.angle;
    emit_euler_zsx(out, gate_unitary(g.kind, angle), g.qubit0);
}

/// CX(c, t) on the native two-qubit gate, assuming (c, t) is the legal
/// orientation. Identities used (global phase dropped):
///   CX = (RZ(pi/2) (x) RX(pi/2)) . ECR . (X (x) I)
///   CX = (I (x) H) . CZ . (I (x) H)
inline void emit_cx_oriented(std::vector<GateInstance>& out, int c, int t,
                             const BackendModel& backend) {
    constexpr double pi = 3.14159265358979323846;
    const GateKind native = backend.two_qubit_gate();
    switch (native) {
        case GateKind::CX:
            out.push_back({GateKind::CX, c, t, 0.0});
            return;
        case GateKind::ECR:
            out.push_back({GateKind::X, c, -1, 0.0});
            out.push_back({GateKind::ECR, c, t, 0.0});
            push_rz(out, c, pi / 2.0);
            out.push_back({GateKind::SX, t, -1, 0.0});
            return;
        case GateKind::CZ:
            emit_1q(out, {GateKind::H, t, -1, 0.0}, backend);
            out.push_back({GateKind::CZ, c, t, 0.0});
            emit_1q(out, {GateKind::H, t, -1, 0.0}, backend);
            return;
        default:
            throw data_error("unsupported native two-qubit gate");
    }
}

/// CX(c, t) respecting edge direction; a wrong-direction pair is flipped by
/// Hadamard conjugation before lowering. `check_direction` is off for the
/// connectivity-free decomposition pass.
inline void emit_cx(std::vector<GateInstance>& out, int c, int t,
                    const BackendModel& backend, bool check_direction) {
    const GateKind native = backend.two_qubit_gate();
    const bool direction_bound =
        check_direction && backend.directed && native != GateKind::CZ;
    if (direction_bound && !backend.has_edge(c, t)) {
        if (!backend.has_edge(t, c))
            throw data_error("qubits " + std::to_string(c) + "," + std::to_string(t) +
                             " are not coupled");
        emit_1q(out, {GateKind::H, c, -1, 0.0}, backend);
        emit_1q(out, {GateKind::H, t, -1, 0.0}, backend);
        emit_cx_oriented(out, t, c, backend);
        emit_1q(out, {GateKind::H, c, -1, 0.0}, backend);
        emit_1q(out, {GateKind::H, t, -1, 0.0}, backend);
        return;
    }
    if (check_direction && native == GateKind::CZ &&
        !backend.has_edge(c, t) && backend.has_edge(t, c)) {
        // CZ is symmetric: emit on the listed edge orientation.
        emit_1q(out, {GateKind::H, t, -1, 0.0}, backend);
        out.push_back({GateKind::CZ, t, c, 0.0});
        emit_1q(out, {GateKind::H, t, -1, 0.0}, backend);
        return;
    }
    emit_cx_oriented(out, c, t, backend);
}

/// Any two-qubit source gate as CX plus local rotations (circuit order).
///   ECR = (RZ(-pi/2) (x) RX(-pi/2)) . CX . (X (x) I)
///   CR* via the standard two-CX conjugation identities.
inline void emit_2q(std::vector<GateInstance>& out, const GateInstance& g,
                    const BackendModel& backend, bool check_direction) {
    constexpr double pi = 3.14159265358979323846;
    const int c = g.qubit0;
    const int t = g.qubit1;
    const bool native_ok =
        backend.in_basis(g.kind) &&
        (!check_direction || !backend.directed || g.kind == GateKind::CZ ||
         backend.has_edge(c, t));
    if (native_ok) {
        out.push_back(g);
        return;
    }
    switch (g.kind) {
        case GateKind::CX:
            emit_cx(out, c, t, backend, check_direction);
            return;
        case GateKind::CZ:
            emit_1q(out, {GateKind::H, t, -1, 0.0}, backend);
            emit_cx(out, c, t, backend, check_direction);
            emit_1q(out, {GateKind::H, t, -1, 0.0}, backend);
            return;
        case GateKind::ECR:
            emit_1q(out, {GateKind::X, c, -1, 0.0}, backend);
            emit_cx(out, c, t, backend, check_direction);
            push_rz(out, c, -pi / 2.0);
            emit_1q(out, {GateKind::RX, t, -1, -pi / 2.0}, backend);
            return;
        case GateKind::CRZ:
            emit_1q(out, {GateKind::RZ, t, -1, g.angle / 2.0}, backend);
            emit_cx(out, c, t, backend, check_direction);
            emit_1q(out, {GateKind::RZ, t, -1, -g.angle / 2.0}, backend);
            emit_cx(out, c, t, backend, check_direction);
            return;
        case GateKind::CRY:
            emit_1q(out, {GateKind::RY, t, -1, g.angle / 2.0}, backend);
            emit_cx(out, c, t, backend, check_direction);
            emit_1q(out, {GateKind::RY, t, -1, -g.angle / 2.0}, backend);
            emit_cx(out, c, t, backend, check_direction);
            return;
        case GateKind::CRX:
            emit_1q(out, {GateKind::H, t, -1, 0.0}, backend);
            emit_1q(out, {GateKind::RZ, t, -1, g.angle / 2.0}, backend);
            emit_cx(out, c, t, backend, check_direction);
            emit_1q(out, {GateKind::RZ, t, -1, -g.angle / 2.0}, backend);
            emit_cx(out, c, t, backend, check_direction);
            emit_1q(out, {GateKind::H, t, -1, 0.0}, backend);
            return;
        default:
            throw data_error("unsupported two-qubit source gate");
    }
}

inline std::vector<int> bfs_path(const std::vector<std::vector<int>>& adj, int from,
                                 int to) {
    std::vector<int> prev(adj.size(), -1);
    std::deque<int> queue{from};
    prev[static_cast<std::size_t>(from)] = from;
    while (!queue.empty()) {
        const int cur = queue.front();
        queue.pop_front();
        if (cur == to) break;
        for (int nb : adj[static_cast<std::size_t>(cur)]) {
            if (prev[static_cast<std::size_t>(nb)] < 0) {
                prev[static_cast<std::size_t>(nb)] = cur;
                queue.push_back(nb);
            }
        }
    }
    if (prev[static_cast<std::size_t>(to)] < 0)
        throw data_error("qubits " + std::to_string(from) + " and " +
                         std::to_string(to) + " are not connected");
    std::vector<int> path{to};
    while (path.back() != from) path.push_back(prev[static_cast<std::size_t>(path.back())]);
    std::reverse(path.begin(), path.end());
    return path;
}

inline void emit_swap(std::vector<GateInstance>& out, int a, int b,
                      const BackendModel& backend) {
    emit_cx(out, a, b, backend, true);
    emit_cx(out, b, a, backend, true);
    emit_cx(out, a, b, backend, true);
}

}  // namespace detail

/// Basis rewrite without routing: connectivity is ignored and every emitted
/// two-qubit gate keeps the source orientation. Unitary-equivalent to the
/// input up to global phase.
inline Circuit decompose_to_basis(const Circuit& c, const BackendModel& backend) {
    backend.validate();
    Circuit out;
    out.qubit_count = c.qubit_count;
    for (const GateInstance& g : c.gates) {
        if (is_two_qubit(g.kind))
            detail::emit_2q(out.gates, g, backend, false);
        else
            detail::emit_1q(out.gates, g, backend);
    }
    return out;
}

/// Full transpilation: basis rewrite plus SWAP routing onto the coupling
/// map. The result is unitary-equivalent to the source up to global phase
/// and the returned final qubit relabeling.
inline TranspiledCircuit route(const Circuit& c, const BackendModel& backend) {
    backend.validate();
    if (c.qubit_count > backend.qubit_count)
        throw data_error("circuit does not fit on backend");
    const auto adj = backend.undirected_adjacency();

    TranspiledCircuit out;
    out.circuit.qubit_count = backend.qubit_count;
    out.source = c;
    std::vector<int> layout(static_cast<std::size_t>(backend.qubit_count));
    std::iota(layout.begin(), layout.end(), 0);
    std::vector<int> wire_to_logical = layout;

    for (const GateInstance& g : c.gates) {
        if (!is_two_qubit(g.kind)) {
            GateInstance mapped = g;
            mapped.qubit0 = layout[static_cast<std::size_t>(g.qubit0)];
            detail::emit_1q(out.circuit.gates, mapped, backend);
            continue;
        }
        const int pc = layout[static_cast<std::size_t>(g.qubit0)];
        const int pt = layout[static_cast<std::size_t>(g.qubit1)];
        if (!backend.connected(pc, pt)) {
            const std::vector<int> path = detail::bfs_path(adj, pc, pt);
            // Walk the control toward the target, one SWAP per hop.
            for (std::size_t s = 0; s + 2 < path.size(); ++s) {
                const int a = path[s];
                const int b = path[s + 1];
                detail::emit_swap(out.circuit.gates, a, b, backend);
                std::swap(wire_to_logical[static_cast<std::size_t>(a)],
                          wire_to_logical[static_cast<std::size_t>(b)]);
                layout[static_cast<std::size_t>(
                    wire_to_logical[static_cast<std::size_t>(a)])] = a;
                layout[static_cast<std::size_t>(
                    wire_to_logical[static_cast<std::size_t>(b)])] = b;
            }
        }
        GateInstance mapped = g;
        mapped.qubit0 = layout[static_cast<std::size_t>(g.qubit0)];
        mapped.qubit1 = layout[static_cast<std::size_t>(g.qubit1)];
        detail::emit_2q(out.circuit.gates, mapped, backend, true);
    }
    out.final_layout = std::move(layout);
    return out;
}

/// Longest path in the gate dependency DAG: gates sharing a qubit are
/// ordered by list position. The empty circuit has depth 0.
inline int depth(const Circuit& c) {
    std::vector<int> level(static_cast<std::size_t>(c.qubit_count), 0);
    int result = 0;
    for (const GateInstance& g : c.gates) {
        int d = level[static_cast<std::size_t>(g.qubit0)];
        if (g.qubit1 >= 0) d = std::max(d, level[static_cast<std::size_t>(g.qubit1)]);
        ++d;
        level[static_cast<std::size_t>(g.qubit0)] = d;
        if (g.qubit1 >= 0) level[static_cast<std::size_t>(g.qubit1)] = d;
        result = std::max(result, d);
    }
    return result;
}

}  // namespace qgk

#endif  // QGK_TRANSPILE_HPP
