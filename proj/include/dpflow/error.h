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

#ifndef DPFLOW_ERROR_H_
#define DPFLOW_ERROR_H_

#include <stdexcept>
#include <string>

namespace dpflow {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Nonconforming shapes at graph construction or at a runtime boundary.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A NaN or Inf produced by an engine operation.
class NumericFault : public Error {
 public:
  using Error::Error;
};

// Collective misuse: mismatched lengths, dtypes, bad frames, timeouts.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Malformed input files (IDX, CSV, JSON descriptors).
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace dpflow

#endif  // DPFLOW_ERROR_H_
