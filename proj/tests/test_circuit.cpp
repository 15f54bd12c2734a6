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

#include <catch2/catch.hpp>

#include <random>

#include "qgk/circuit.hpp"
#include "qgk/rng.hpp"

using namespace qgk;

namespace {

GateMatrix matmul(const GateMatrix& a, const GateMatrix& b) {
    GateMatrix out;
    out.dim = a.dim;
    for (int r = 0; r < a.dim; ++r)
        for (int c = 0; c < a.dim; ++c) {
            cplx acc(0.0, 0.0);
            for (int k = 0; k < a.dim; ++k) acc += a.at(r, k) * b.at(k, c);
            out.at(r, c) = acc;
        }
    return out;
}

double max_abs_diff(const GateMatrix& a, const GateMatrix& b) {
    double worst = 0.0;
    for (int r = 0; r < a.dim; ++r)
        for (int c = 0; c < a.dim; ++c)
            worst = std::max(worst, std::abs(a.at(r, c) - b.at(r, c)));
    return worst;
}

GateMatrix identity(int dim) {
    GateMatrix m;
    m.dim = dim;
    for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
    return m;
}

Circuit random_circuit(int qubits, int gates, std::mt19937_64& rng) {
    static const GateKind kinds[] = {GateKind::H,   GateKind::X,   GateKind::SX,
                                     GateKind::RX,  GateKind::RY,  GateKind::RZ,
                                     GateKind::CX,  GateKind::CZ,  GateKind::ECR,
                                     GateKind::CRX, GateKind::CRY, GateKind::CRZ};
    std::uniform_int_distribution<int> pick(0, 11);
    std::uniform_int_distribution<int> qpick(0, qubits - 1);
    std::uniform_real_distribution<double> apick(-3.14, 3.14);
    Circuit c;
    c.qubit_count = qubits;
    for (int g = 0; g < gates; ++g) {
        GateInstance gi;
        gi.kind = kinds[pick(rng)];
        gi.qubit0 = qpick(rng);
        if (is_two_qubit(gi.kind)) {
            do {
                gi.qubit1 = qpick(rng);
            } while (gi.qubit1 == gi.qubit0);
        }
        if (is_parametric(gi.kind)) gi.angle = apick(rng);
        c.gates.push_back(gi);
    }
    return c;
}

}  // namespace

TEST_CASE("gate matrices are unitary") {
    for (int k = 0; k < kGateKindCount; ++k) {
        const auto kind = static_cast<GateKind>(k);
        std::optional<double> angle;
        if (is_parametric(kind)) angle = 0.918273;
        const GateMatrix u = gate_unitary(kind, angle);
        CHECK(max_abs_diff(matmul(u.dagger(), u), identity(u.dim)) < 1e-12);
    }
}

TEST_CASE("gate_unitary angle contract") {
    CHECK_THROWS_AS(gate_unitary(GateKind::X, 0.5), data_error);
    CHECK_THROWS_AS(gate_unitary(GateKind::RX), data_error);
    CHECK_THROWS_AS(gate_unitary(GateKind::CRZ), data_error);
}

TEST_CASE("X squares to identity, SX squares to X") {
    const GateMatrix x = gate_unitary(GateKind::X);
    const GateMatrix sx = gate_unitary(GateKind::SX);
    CHECK(max_abs_diff(matmul(x, x), identity(2)) < 1e-12);
    CHECK(max_abs_diff(matmul(sx, sx), x) < 1e-12);
}

TEST_CASE("ECR is Hermitian and self-inverse") {
    const GateMatrix e = gate_unitary(GateKind::ECR);
    CHECK(max_abs_diff(e.dagger(), e) < 1e-12);
    CHECK(max_abs_diff(matmul(e, e), identity(4)) < 1e-12);
}

TEST_CASE("single gates act on |0> as expected") {
    Statevector sv = Statevector::zero(1);
    apply_gate(sv, {GateKind::X, 0, -1, 0.0});
    CHECK(std::abs(sv.amps[0]) < 1e-15);
    CHECK(std::abs(sv.amps[1] - 1.0) < 1e-15);

    sv = Statevector::zero(1);
    apply_gate(sv, {GateKind::H, 0, -1, 0.0});
    CHECK(std::abs(sv.amps[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(sv.amps[1] - 1.0 / std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("CX with inactive control leaves the target alone") {
    Statevector sv = Statevector::zero(2);
    apply_gate(sv, {GateKind::CX, 0, 1, 0.0});
    CHECK(std::abs(sv.amps[0] - 1.0) < 1e-15);
}

TEST_CASE("Bell state from H + CX") {
    Circuit c;
    c.qubit_count = 2;
    c.gates = {{GateKind::H, 0, -1, 0.0}, {GateKind::CX, 0, 1, 0.0}};
    const Statevector sv = run_statevector(c);
    CHECK(std::abs(sv.amps[0] - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(sv.amps[3] - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(sv.amps[1]) < 1e-15);
    CHECK(std::abs(sv.amps[2]) < 1e-15);
}

TEST_CASE("empty circuit leaves |0...0>") {
    Circuit c;
    c.qubit_count = 3;
    const Statevector sv = run_statevector(c);
    CHECK(std::abs(sv.amps[0] - 1.0) < 1e-15);
    CHECK(sv.norm() == Approx(1.0).margin(1e-12));
}

TEST_CASE("norm preserved on random circuits") {
    std::mt19937_64 rng = make_stream(17);
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<int> qd(2, 4);
        std::uniform_int_distribution<int> gd(1, 20);
        const Circuit c = random_circuit(qd(rng), gd(rng), rng);
        const Statevector sv = run_statevector(c);
        CHECK(std::abs(sv.norm() - 1.0) < 1e-10);
    }
}

TEST_CASE("two-qubit application matches explicit Kronecker embedding") {
    // On Q=2, build the full 4x4 operator for both qubit orderings and check
    // amplitude-by-amplitude agreement on random states.
    std::mt19937_64 rng = make_stream(23);
    std::uniform_real_distribution<double> ad(-3.0, 3.0);
    for (GateKind kind : {GateKind::CX, GateKind::CZ, GateKind::ECR, GateKind::CRX,
                          GateKind::CRY, GateKind::CRZ}) {
        std::optional<double> angle;
        if (is_parametric(kind)) angle = ad(rng);
        const GateMatrix m = gate_unitary(kind, angle);
        for (auto [qc, qt] : {std::pair{0, 1}, std::pair{1, 0}}) {
            Statevector sv;
            sv.qubit_count = 2;
            sv.amps = {cplx(0.11, 0.2), cplx(-0.4, 0.33), cplx(0.52, -0.1),
                       cplx(0.3, 0.55)};
            Statevector expect = sv;
            // full[i][j] = m[(bit_qc(i)<<1)|bit_qt(i)][(bit_qc(j)<<1)|bit_qt(j)]
            std::vector<cplx> out(4, cplx(0.0, 0.0));
            for (int i = 0; i < 4; ++i) {
                const int ri = (((i >> qc) & 1) << 1) | ((i >> qt) & 1);
                for (int j = 0; j < 4; ++j) {
                    const int cj = (((j >> qc) & 1) << 1) | ((j >> qt) & 1);
                    out[static_cast<std::size_t>(i)] +=
                        m.at(ri, cj) * expect.amps[static_cast<std::size_t>(j)];
                }
            }
            GateInstance gi{kind, qc, qt, angle.value_or(0.0)};
            apply_gate(sv, gi);
            for (int i = 0; i < 4; ++i)
                CHECK(std::abs(sv.amps[static_cast<std::size_t>(i)] -
                               out[static_cast<std::size_t>(i)]) < 1e-12);
        }
    }
}

TEST_CASE("gate list order is respected") {
    Circuit hx;
    hx.qubit_count = 1;
    hx.gates = {{GateKind::H, 0, -1, 0.0}, {GateKind::X, 0, -1, 0.0}};
    Circuit xh;
    xh.qubit_count = 1;
    xh.gates = {{GateKind::X, 0, -1, 0.0}, {GateKind::H, 0, -1, 0.0}};
    const Statevector a = run_statevector(hx);
    const Statevector b = run_statevector(xh);
    // H then X: (|0>+|1>)/sqrt2 -> unchanged by X up to component swap;
    // X then H: |1> -> (|0>-|1>)/sqrt2. The sign difference is observable.
    CHECK(std::abs(a.amps[1] - b.amps[1]) > 0.5);
}

TEST_CASE("qubit cap enforced") {
    Circuit c;
    c.qubit_count = kMaxSimQubits + 1;
    CHECK_THROWS_AS(run_statevector(c), data_error);
}

TEST_CASE("out-of-range qubit index rejected") {
    Statevector sv = Statevector::zero(2);
    CHECK_THROWS_AS(apply_gate(sv, {GateKind::X, 5, -1, 0.0}), data_error);
    CHECK_THROWS_AS(apply_gate(sv, {GateKind::CX, 0, 0, 0.0}), data_error);
}
