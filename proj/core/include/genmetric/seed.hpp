// Copyright 2026 The genmetric Authors
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

#pragma once

#include <cstdint>
#include <string_view>

namespace genmetric {

/// Stable per-purpose seed: FNV-1a(label) xor splitmix64(master), offset by
/// (index + 1) times the 64-bit golden ratio, then the splitmix64 finalizer.
/// For fixed master and label the map index -> seed is a bijection.
std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose,
                          std::uint64_t index = 0);

/// The splitmix64 output finalizer (a bijection on 64-bit words).
std::uint64_t splitmix64_mix(std::uint64_t x);

}  // namespace genmetric
