// Copyright 2026 The miqm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MIQM_CORE_SHA256_H_
#define MIQM_CORE_SHA256_H_

#include <cstddef>
#include <string>

namespace miqm {

std::string sha256_hex(const void* data, std::size_t n);
std::string sha256_file(const std::string& path);

}  // namespace miqm

#endif  // MIQM_CORE_SHA256_H_
