// Copyright 2026 The vrseval Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include "vrseval/error.hpp"
#include "vrseval/parallel.hpp"
#include "vrseval/mask.hpp"
#include "vrseval/catalog.hpp"
#include "vrseval/dataset.hpp"
#include "vrseval/json_io.hpp"
#include "vrseval/adapters.hpp"
#include "vrseval/io.hpp"
#include "vrseval/ingest.hpp"
#include "vrseval/losses.hpp"
#include "vrseval/hungarian.hpp"
#include "vrseval/matching.hpp"
#include "vrseval/metrics.hpp"
#include "vrseval/splits.hpp"
#include "vrseval/retrieval.hpp"
#include "vrseval/cli.hpp"
