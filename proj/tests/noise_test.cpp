// Copyright 2026 The vqe-smo Authors
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

#include "vqesmo/noise.hpp"

#include "gtest/gtest.h"
#include "vqesmo/error.hpp"

using namespace vqesmo;

TEST(NoiseModel, validation) {
  EXPECT_NO_THROW(NoiseModel::none().validate());
  EXPECT_NO_THROW(NoiseModel::benchmark_preset().validate());
  NoiseModel bad;
  bad.p1 = 1.5;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = {};
  bad.readout_10 = -0.1;
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(NoiseModel, benchmark_preset_values) {
  const auto n = NoiseModel::benchmark_preset();
  EXPECT_EQ(n.p1, 0.001);
  EXPECT_EQ(n.p2, 0.01);
  EXPECT_EQ(n.readout_01, 0.02);
  EXPECT_EQ(n.readout_10, 0.02);
  EXPECT_EQ(n.global_depolarizing, 0.0);
  EXPECT_EQ(n.scale, 1.0);
}

TEST(Scaled, identity_and_multiplication) {
  const auto n = NoiseModel::benchmark_preset();
  EXPECT_EQ(scaled(n, 1.0), n);

  NoiseModel m;
  m.p1 = 0.01;
  m.readout_01 = 0.05;
  const auto s = scaled(m, 3.0);
  EXPECT_DOUBLE_EQ(s.p1, 0.03);
  EXPECT_EQ(s.readout_01, 0.05);
  EXPECT_EQ(s.scale, 3.0);
}

TEST(Scaled, out_of_range) {
  NoiseModel n;
  n.global_depolarizing = 0.4;
  EXPECT_THROW(scaled(n, 3.0), ValidationError);
  EXPECT_THROW(scaled(n, 0.5), ValidationError);
}

TEST(Scaled, composition) {
  NoiseModel n;
  n.p1 = 0.01;
  n.p2 = 0.02;
  n.global_depolarizing = 0.05;
  for (double a : {1.0, 1.5, 2.0})
    for (double b : {1.0, 2.0, 3.0}) {
      const auto lhs = scaled(scaled(n, a), b);
      const auto rhs = scaled(n, a * b);
      EXPECT_NEAR(lhs.p1, rhs.p1, 1e-15);
      EXPECT_NEAR(lhs.p2, rhs.p2, 1e-15);
      EXPECT_NEAR(lhs.global_depolarizing, rhs.global_depolarizing, 1e-15);
      EXPECT_NEAR(lhs.scale, rhs.scale, 1e-15);
    }
}

TEST(NoiseJson, round_trip_and_unknown_field) {
  const auto n = NoiseModel::benchmark_preset();
  const auto j = to_json(n);
  EXPECT_EQ(j, nlohmann::json::parse(R"({"p1":0.001,"p2":0.01,"readout01":0.02,"readout10":0.02,"global":0.0})"));
  EXPECT_EQ(noise_from_json(j), n);
  EXPECT_THROW(noise_from_json(nlohmann::json::parse(R"({"p3":0.1})")), ValidationError);
  EXPECT_THROW(noise_from_json(nlohmann::json::parse(R"({"p1":2})")), ValidationError);
}
