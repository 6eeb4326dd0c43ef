#include "qgan/ansatz.hpp"

#include "doctest.h"

using namespace qgan;

namespace {

struct GateTally {
  int encoder = 0;
  int trainable = 0;
  int cx = 0;
};

GateTally tally(const CircuitSpec& c) {
  GateTally t;
  for (const GateOp& g : c.gates) {
    if (g.kind == GateKind::CX)
      ++t.cx;
    else if (g.param_slot >= 0)
      ++t.trainable;
    else if (g.encoder_slot >= 0)
      ++t.encoder;
  }
  return t;
}

}  // namespace

TEST_CASE("hardware-efficient circuit structure") {
  SUBCASE("full-scale shape: 7 qubits, 2 reps") {
    const CircuitSpec c = build_hw_efficient({7, 2});
    const GateTally t = tally(c);
    CHECK(t.trainable == 42);  // 336 / 8 QNNs
    CHECK(t.cx == 14);         // 112 / 8 QNNs
    CHECK(t.encoder == 7);
    CHECK(c.param_count == 42);
    CHECK(c.encoder_slots == 7);
  }
  SUBCASE("2 qubits, 1 rep") {
    const GateTally t = tally(build_hw_efficient({2, 1}));
    CHECK(t.trainable == 6);
    CHECK(t.cx == 2);
  }
  SUBCASE("gate-count formula holds across shapes") {
    for (int n = 1; n <= 5; ++n) {
      for (int reps = 1; reps <= 3; ++reps) {
        const GateTally t = tally(build_hw_efficient({n, reps}));
        CHECK(t.trainable == 3 * n * reps);
        CHECK(t.cx == (n >= 2 ? n * reps : 0));
        CHECK(t.encoder == n);
      }
    }
  }
  SUBCASE("identity at zero angles") {
    const CircuitSpec c = build_hw_efficient({3, 2});
    const std::vector<double> params(static_cast<std::size_t>(c.param_count), 0.0);
    const std::vector<double> inputs(3, 0.0);
    const std::vector<double> p = probabilities(run(c, params, inputs));
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-15));
    for (std::size_t k = 1; k < p.size(); ++k) CHECK(p[k] == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("invalid spec") {
    CHECK_THROWS_AS(build_hw_efficient({0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(build_hw_efficient({3, 0}), std::invalid_argument);
  }
}

TEST_CASE("resource accounting reproduces the published design costs") {
  const ResourceReport lstm = count_resources(Architecture::LstmQgan);
  CHECK(lstm.qubits_per_qnn == 7);
  CHECK(lstm.qnn_count == 8);
  CHECK(lstm.total_qubits == 56);
  CHECK(lstm.total_1qg == 336);
  CHECK(lstm.total_2qg == 112);

  const ResourceReport patch = count_resources(Architecture::PatchGan);
  CHECK(patch.qubits_per_qnn == 5);
  CHECK(patch.qnn_count == 56);
  CHECK(patch.total_qubits == 280);
  CHECK(patch.total_1qg == 1680);
  CHECK(patch.total_2qg == 1344);
}

TEST_CASE("lstm-qgan totals are derived from the constructed circuit") {
  SUBCASE("hypothetical single QNN") {
    const ResourceReport r = count_resources(Architecture::LstmQgan, {7, 2, 1});
    CHECK(r.total_qubits == 7);
    CHECK(r.total_1qg == 42);
    CHECK(r.total_2qg == 14);
  }
  SUBCASE("non-default shape still tracks the circuit") {
    const ResourceReport r = count_resources(Architecture::LstmQgan, {5, 3, 2});
    const GateTally t = tally(build_hw_efficient({5, 3}));
    CHECK(r.total_1qg == 2 * t.trainable);
    CHECK(r.total_2qg == 2 * t.cx);
    CHECK(r.total_qubits == 10);
  }
  SUBCASE("report invariant: totals scale with qnn_count") {
    const ResourceReport one = count_resources(Architecture::LstmQgan, {7, 2, 1});
    const ResourceReport eight = count_resources(Architecture::LstmQgan, {7, 2, 8});
    CHECK(eight.total_1qg == 8 * one.total_1qg);
    CHECK(eight.total_2qg == 8 * one.total_2qg);
    CHECK(eight.total_qubits == 8 * one.total_qubits);
  }
}
