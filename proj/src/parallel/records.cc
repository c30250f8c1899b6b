/* Copyright 2026 The dpflow Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "dpflow/parallel/records.h"

#include <cstdio>
#include <ostream>

namespace dpflow::parallel {

void WriteStepCsv(std::ostream& out, std::span<const StepRecord> records) {
  out << "step,loss,wall_ms,msgs,bytes\n";
  char buf[160];
  for (const StepRecord& r : records) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.3f,%llu,%llu\n", r.step, r.loss, r.wall_ms,
                  static_cast<unsigned long long>(r.messages),
                  static_cast<unsigned long long>(r.bytes));
    out << buf;
  }
}

}  // namespace dpflow::parallel
