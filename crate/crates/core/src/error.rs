// Copyright 2026 The tbldt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("chunk tag `{0}` is not in the frozen tag inventory")]
    UnknownTag(String),

    #[error("POS tag `{0}` has no initial assignment")]
    MissingPos(String),

    #[error("length mismatch: {predicted} predicted vs {gold} gold")]
    LengthMismatch { predicted: usize, gold: usize },

    #[error("gold tag has zero probability at token {0}; the estimator must be smoothed")]
    ZeroProbability(usize),

    #[error("prediction for token {0} carries no class distribution")]
    MissingDistribution(usize),

    #[error("cannot estimate a distribution from an empty label multiset")]
    EmptyDistribution,

    #[error("rule list: {0}")]
    RuleFormat(String),

    #[error("tree: {0}")]
    TreeFormat(String),

    #[error("inventory mismatch: {0}")]
    Inventory(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
