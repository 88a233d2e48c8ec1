// SPDX-License-Identifier: Apache-2.0
//
// rms-swipt: robust transceiver design for transmissive-metasurface SWIPT networks
// Copyright (C) 2026 The rms-swipt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <iostream>
#include <string>
#include <vector>

#include "rms_swipt/acceptance.hpp"

int main(int argc, char **argv) {
  rms_swipt::ScenarioConfig cfg;
  rms_swipt::AcceptanceOptions opt;
  bool verbose = false;
  for (int i = 1; i < argc; ++i) verbose = verbose || std::string(argv[i]) == "-v";
  if (verbose) opt.log = &std::cerr;
  int failed = 0;
  // Criteria 1-3 share the baseline runs; the others are printed as they finish.
  for (const std::vector<int> &group : {std::vector<int>{1, 2, 3}, {4}, {5}, {6}, {7}}) {
    for (const auto &c : rms_swipt::run_acceptance(cfg, opt, group)) {
      std::cout << rms_swipt::format_result(c) << '\n';
      for (const auto &n : c.notes) std::cout << "    " << n << '\n';
      std::cout << std::flush;
      failed += !c.passed;
    }
  }
  return failed == 0 ? 0 : 1;
}
