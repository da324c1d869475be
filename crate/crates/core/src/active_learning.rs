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

//! Pool-based active learning with mean-token-entropy sentence selection.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{Corpus, Sentence};
use crate::decoder::{DecodeOptions, Model, Pipeline};
use crate::error::{Error, Result};
use crate::metrics::chunk_prf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMode {
    Entropy,
    Sequential,
}

impl SelectionMode {
    pub fn name(self) -> &'static str {
        match self {
            SelectionMode::Entropy => "entropy",
            SelectionMode::Sequential => "sequential",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Budget {
    Sentences(usize),
    Words(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ALConfig {
    /// Sentences labeled before the first round.
    pub initial: usize,
    /// Sentences added per round.
    pub batch: usize,
    pub budget: Budget,
    pub mode: SelectionMode,
    /// Shuffles the pool order once, before anything is labeled.
    pub seed: Option<u64>,
}

impl Default for ALConfig {
    fn default() -> Self {
        ALConfig { initial: 50, batch: 25, budget: Budget::Sentences(usize::MAX), mode: SelectionMode::Entropy, seed: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LearningCurvePoint {
    pub round: usize,
    pub labeled_sentences: usize,
    pub labeled_words: usize,
    pub f1: f64,
    pub accuracy: f64,
}

/// Mean per-token entropy of the model's distributions over `sentence`.
pub fn sentence_score(model: &Model, sentence: &Sentence) -> Result<f64> {
    let preds = model.decode_sentence(sentence, DecodeOptions::tree())?;
    if preds.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = preds
        .iter()
        .map(|p| p.distribution.as_ref().map(|d| d.entropy()).ok_or(Error::MissingDistribution(0)))
        .sum::<Result<f64>>()?;
    Ok(total / preds.len() as f64)
}

/// Positions of the `n` highest scores, ties to the lower position.
pub fn top_scoring(scores: &[f64], n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(n);
    order
}

/// Picks up to `n` sentences from `pool` (corpus indices, in pool order).
pub fn select_batch(model: &Model, corpus: &Corpus, pool: &[usize], n: usize, mode: SelectionMode) -> Result<Vec<usize>> {
    match mode {
        SelectionMode::Sequential => Ok(pool.iter().take(n).copied().collect()),
        SelectionMode::Entropy => {
            let scores = pool
                .par_iter()
                .map(|&i| sentence_score(model, &corpus.sentences()[i]))
                .collect::<Result<Vec<_>>>()?;
            Ok(top_scoring(&scores, n).into_iter().map(|p| pool[p]).collect())
        }
    }
}

fn words(corpus: &Corpus, indices: &[usize]) -> usize {
    indices.iter().map(|&i| corpus.sentences()[i].len()).sum()
}

/// Label, retrain, evaluate, select; until the budget or the pool runs out.
/// Gold tags of the selected sentences play the annotator.
pub fn run(train: &Corpus, test: &Corpus, pipeline: &Pipeline, config: &ALConfig) -> Result<Vec<LearningCurvePoint>> {
    if config.initial == 0 || config.batch == 0 {
        return Err(Error::InvalidArgument("initial and batch sizes must be at least 1".into()));
    }
    let mut pool: Vec<usize> = (0..train.len()).collect();
    if let Some(seed) = config.seed {
        pool.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let cap = match config.budget {
        Budget::Sentences(n) => n,
        Budget::Words(_) => usize::MAX,
    };
    let first = config.initial.min(cap).min(pool.len());
    let mut labeled: Vec<usize> = pool.drain(..first).collect();
    let mut points = Vec::new();
    for round in 0.. {
        let model = pipeline.fit(&train.select(labeled.iter().copied()))?;
        let decoded = model.decode_corpus(test, DecodeOptions::tree())?;
        let pred: Vec<_> = decoded
            .predictions
            .iter()
            .map(|s| s.iter().map(|p| test.tag(p.label).clone()).collect::<Vec<_>>())
            .collect();
        let gold: Vec<_> = (0..test.len()).map(|s| test.gold_tags(s)).collect();
        let report = chunk_prf(&pred, &gold, 1.0)?;
        let labeled_words = words(train, &labeled);
        points.push(LearningCurvePoint {
            round,
            labeled_sentences: labeled.len(),
            labeled_words,
            f1: report.overall.f,
            accuracy: report.token_accuracy,
        });
        let room = match config.budget {
            Budget::Sentences(n) => n.saturating_sub(labeled.len()),
            Budget::Words(w) if labeled_words >= w => 0,
            Budget::Words(_) => usize::MAX,
        };
        let n = config.batch.min(room);
        if n == 0 || pool.is_empty() {
            break;
        }
        let chosen = select_batch(&model, train, &pool, n, config.mode)?;
        pool.retain(|i| !chosen.contains(i));
        labeled.extend(chosen);
    }
    Ok(points)
}

/// `labeled_words,f1,accuracy,mode,round`.
pub fn curve_csv(points: &[LearningCurvePoint], mode: SelectionMode) -> String {
    let mut out = String::from("labeled_words,f1,accuracy,mode,round\n");
    for p in points {
        writeln!(out, "{},{},{},{},{}", p.labeled_words, p.f1, p.accuracy, mode.name(), p.round).unwrap();
    }
    out
}
