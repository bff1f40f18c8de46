/*
 * Copyright 2026 The ifair Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ifair/types.hpp"

namespace ifair {

const char* to_string(SplitPart part) {
  switch (part) {
    case SplitPart::train:
      return "train";
    case SplitPart::validation:
      return "validation";
    case SplitPart::test:
      return "test";
  }
  throw InternalError("unreachable split part");
}

SplitPart split_part_from_string(const std::string& name) {
  if (name == "train") return SplitPart::train;
  if (name == "validation") return SplitPart::validation;
  if (name == "test") return SplitPart::test;
  throw ValidationError("unknown split name: " + name);
}

}  // namespace ifair
