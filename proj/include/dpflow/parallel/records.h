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

#ifndef DPFLOW_PARALLEL_RECORDS_H_
#define DPFLOW_PARALLEL_RECORDS_H_

#include <iosfwd>
#include <span>

#include "dpflow/parallel/trainer.h"

namespace dpflow::parallel {

// CSV with header "step,loss,wall_ms,msgs,bytes"; loss uses 17 significant
// digits, LF line endings.
void WriteStepCsv(std::ostream& out, std::span<const StepRecord> records);

}  // namespace dpflow::parallel

#endif  // DPFLOW_PARALLEL_RECORDS_H_
