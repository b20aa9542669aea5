#include <sstream>

#include "doctest.h"
#include "rescomm/error.hpp"
#include "rescomm/p1906.hpp"

using namespace rescomm;
using namespace rescomm::p1906;

TEST_CASE("both physical layers map onto the shared component vocabulary") {
  NeuronNodeParams a, b;
  a.id = "A";
  b.id = "B";
  const auto spike = describe(SynapseEdge{0, 1, SynapseKind::Excitatory, 1.0, 0.15, 150.0}, a, b);
  CHECK(spike.carrier == Carrier::ResistiveSpike);
  CHECK(spike.motion == Motion::CircuitConduction);
  CHECK(spike.perturbation.find("A") != std::string::npos);
  CHECK(spike.specificity.find("B") != std::string::npos);
  CHECK(spike.field.find("150") != std::string::npos);

  const auto molecule = describe(DiffusionParams{}, OokLinkParams{});
  CHECK(molecule.carrier == Carrier::Molecule);
  CHECK(molecule.motion == Motion::BrownianDiffusion);
  CHECK_FALSE(molecule.perturbation.empty());
  CHECK_FALSE(molecule.specificity.empty());
  CHECK(molecule.field.find("isotropic") != std::string::npos);
}

TEST_CASE("mismatched carrier and motion are rejected") {
  CHECK_THROWS_AS((NanoLinkDescriptor{Carrier::Molecule, Motion::CircuitConduction, "", ""}).validate(), InputError);
  CHECK_THROWS_AS((NanoLinkDescriptor{Carrier::ResistiveSpike, Motion::BrownianDiffusion, "", ""}).validate(),
                  InputError);
  CHECK_THROWS_AS(describe(DiffusionParams{1e4, -1.0, 1e-6}, OokLinkParams{}), InputError);
}

TEST_CASE("measure: perfect link") {
  const std::vector<double> sent{0.0, 1e-3, 2e-3};
  const std::vector<double> recv{0.5e-3, 1.5e-3, 2.5e-3};
  const auto m = measure(sent, recv);
  CHECK(m.sent == 3);
  CHECK(m.matched == 3);
  CHECK(m.delivery_ratio == 1.0);
  CHECK(m.latency_defined);
  CHECK(m.mean_latency == doctest::Approx(0.5e-3));
  CHECK(m.peak_rate == doctest::Approx(1000.0));
}

TEST_CASE("measure: losses, late arrivals and empty lists") {
  const std::vector<double> sent{0.0, 1e-3, 2e-3, 3e-3};
  const std::vector<double> recv{0.2e-3, 6e-3};
  const auto m = measure(sent, recv);
  CHECK(m.matched == 1);
  CHECK(m.delivery_ratio == 0.25);
  CHECK(m.mean_latency == doctest::Approx(0.2e-3));

  const auto none = measure(sent, {});
  CHECK(none.delivery_ratio == 0.0);
  CHECK_FALSE(none.latency_defined);
  CHECK(none.peak_rate == 0.0);

  const auto nothing_sent = measure({}, recv);
  CHECK(nothing_sent.sent == 0);
  CHECK(nothing_sent.delivery_ratio == 0.0);
}

TEST_CASE("measure: a received event is matched at most once") {
  const std::vector<double> sent{0.0, 0.1e-3};
  const std::vector<double> recv{0.5e-3};
  const auto m = measure(sent, recv);
  CHECK(m.matched == 1);
  CHECK(m.mean_latency == doctest::Approx(0.5e-3));
}

TEST_CASE("measure: widening the window never lowers the delivery ratio") {
  const std::vector<double> sent{0.0, 1e-3, 2e-3, 3e-3, 4e-3};
  const std::vector<double> recv{0.3e-3, 1.9e-3, 3.1e-3, 6.5e-3};
  double previous = -1.0;
  for (double w : {0.1e-3, 0.5e-3, 1e-3, 2e-3, 3e-3, 5e-3}) {
    const double ratio = measure(sent, recv, {w, 1e-3}).delivery_ratio;
    CHECK(ratio >= previous);
    previous = ratio;
  }
}

TEST_CASE("measure: shifting both lists leaves the metrics unchanged") {
  const std::vector<double> sent{0.0, 1e-3, 2.5e-3};
  const std::vector<double> recv{0.25e-3, 1.75e-3, 2.75e-3, 2.8e-3};
  const auto base = measure(sent, recv);
  auto s2 = sent, r2 = recv;
  for (auto& t : s2) t += 0.125;
  for (auto& t : r2) t += 0.125;
  const auto shifted = measure(s2, r2);
  CHECK(shifted.matched == base.matched);
  CHECK(shifted.mean_latency == doctest::Approx(base.mean_latency).epsilon(1e-9));
  CHECK(shifted.peak_rate == base.peak_rate);
}

TEST_CASE("measure: peak rate uses a half-open window of one symbol period") {
  const std::vector<double> recv{0.0, 0.25e-3, 0.5e-3, 1e-3};
  CHECK(measure({}, recv).peak_rate == doctest::Approx(3000.0));
  CHECK(measure({}, recv, {2e-3, 0.5e-3}).peak_rate == doctest::Approx(4000.0));
}

TEST_CASE("measure: rejects unordered input and non-positive options") {
  const std::vector<double> ok{0.0, 1.0};
  const std::vector<double> unordered{1.0, 0.0};
  CHECK_THROWS_AS(measure(unordered, ok), InputError);
  CHECK_THROWS_AS(measure(ok, unordered), InputError);
  CHECK_THROWS_AS(measure(ok, ok, {0.0, 1e-3}), InputError);
  CHECK_THROWS_AS(measure(ok, ok, {1e-3, -1.0}), InputError);
}

TEST_CASE("metrics text and JSON") {
  LinkMetrics m;
  m.sent = 2;
  m.matched = 1;
  m.delivery_ratio = 0.5;
  m.latency_defined = true;
  m.mean_latency = 0.001;
  m.peak_rate = 1000.0;
  std::ostringstream os;
  write_metrics_text(os, m, "A->B.");
  CHECK(os.str() ==
        "A->B.sent=2\nA->B.matched=1\nA->B.delivery_ratio=0.5\nA->B.mean_latency=0.001\nA->B.peak_rate=1000\n");
  CHECK(metrics_json(m) ==
        R"({"delivery_ratio":0.5,"mean_latency":0.001,"peak_rate":1000.0,"sent":2,"matched":1})");

  m.latency_defined = false;
  m.mean_latency = 0.0;
  std::ostringstream undefined;
  write_metrics_text(undefined, m);
  CHECK(undefined.str().find("mean_latency=undefined\n") != std::string::npos);
  CHECK(metrics_json(m).find(R"("mean_latency":null)") != std::string::npos);
}
