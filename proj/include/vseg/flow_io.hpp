// Copyright 2026 The vseg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Middlebury .flo flow files: little-endian magic float 202021.25 ("PIEH"),
// int32 width, int32 height, then row-major interleaved float32 (dx, dy)
// pairs. write_flow ∘ read_flow is the identity, bit for bit.

#pragma once

#include <string>

#include "vseg/image.hpp"

namespace vseg::io {

FlowField read_flow(const std::string& path);
void write_flow(const FlowField& flow, const std::string& path);

}  // namespace vseg::io
