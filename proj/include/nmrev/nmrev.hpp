// Copyright 2026 The nmrev Authors
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

#include "nmrev/config.hpp"
#include "nmrev/controllability.hpp"
#include "nmrev/environment.hpp"
#include "nmrev/errors.hpp"
#include "nmrev/experiments.hpp"
#include "nmrev/integrator.hpp"
#include "nmrev/liouvillian.hpp"
#include "nmrev/reverse_engineering.hpp"
#include "nmrev/sampling.hpp"
#include "nmrev/schedule.hpp"
#include "nmrev/selfcheck.hpp"
#include "nmrev/simulator.hpp"
#include "nmrev/sun_algebra.hpp"
#include "nmrev/trajectories.hpp"
#include "nmrev/types.hpp"
