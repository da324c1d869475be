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

//! Transformation-based chunking with probability estimates.
//!
//! A greedy transformation-based learner produces an ordered rule list for
//! BIO chunk tagging. The list is then converted into a decision tree whose
//! leaves hold the samples that the same rules fired on, which turns the
//! rule list into a classifier with smoothed class distributions. The tree
//! can keep growing by information gain, and the distributions drive
//! rejection curves, cross entropy and entropy-based active learning.
//!
//! ```
//! use tbldt::{corpus::Corpus, decoder::{DecodeOptions, Pipeline}};
//!
//! let train = Corpus::parse("the DT B-NP\ncat NN I-NP\nsat VBD B-VP\n\n").unwrap();
//! let model = Pipeline::default().fit(&train).unwrap();
//! let out = model.decode_corpus(&train, DecodeOptions::tree()).unwrap();
//! assert_eq!(out.state().accuracy(&train), 1.0);
//! ```

pub mod active_learning;
pub mod corpus;
pub mod decoder;
pub mod error;
pub mod features;
pub mod metrics;
pub mod prob_tree;
pub mod rules;
pub mod synth;
pub mod trainer;

pub use error::{Error, Result};
