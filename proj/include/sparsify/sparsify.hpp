// Copyright 2026 The sparsify Authors
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

#include "sparsify/bounds.hpp"
#include "sparsify/errors.hpp"
#include "sparsify/generators.hpp"
#include "sparsify/harness.hpp"
#include "sparsify/instance.hpp"
#include "sparsify/matching.hpp"
#include "sparsify/nyc.hpp"
#include "sparsify/rng.hpp"
#include "sparsify/strategies.hpp"
#include "sparsify/varopt.hpp"
#include "sparsify/weights.hpp"
