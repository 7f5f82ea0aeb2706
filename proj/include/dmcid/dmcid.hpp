/*
 * Copyright (C) 2026 The dmcid Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "dmcid/bounds.hpp"
#include "dmcid/capacity.hpp"
#include "dmcid/channel.hpp"
#include "dmcid/config.hpp"
#include "dmcid/error.hpp"
#include "dmcid/estimation.hpp"
#include "dmcid/experiments.hpp"
#include "dmcid/identify.hpp"
#include "dmcid/information.hpp"
#include "dmcid/io.hpp"
#include "dmcid/rng.hpp"
#include "dmcid/sensing.hpp"
