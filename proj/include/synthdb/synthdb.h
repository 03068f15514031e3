// Copyright 2026 The synthdb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SYNTHDB_SYNTHDB_H_
#define SYNTHDB_SYNTHDB_H_

#include "synthdb/basis.h"
#include "synthdb/core.h"
#include "synthdb/harness.h"
#include "synthdb/lp.h"
#include "synthdb/mechanism.h"
#include "synthdb/noise.h"
#include "synthdb/pca.h"
#include "synthdb/queries.h"
#include "synthdb/random.h"

#endif  // SYNTHDB_SYNTHDB_H_
