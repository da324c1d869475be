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

//! Tagging unseen text with a rule list or its tree.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{ChunkTag, Corpus, Sentence, TagId, TagInventory};
use crate::error::{Error, Result};
use crate::features::{
    replay_sentence, CompiledRule, EncodedSentence, Labels, SentenceHistory, Symbols,
};
use crate::prob_tree::{self, leaf_distribution, ClassDistribution, CompiledTree, GrowConfig, Node, ProbTree};
use crate::rules::{Field, TaggingState};
use crate::trainer::{self, RuleList, TrainConfig, TrainingLog};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DecodeMode {
    /// Whole-sentence rule-list replay; labels only.
    RuleList,
    /// Per-token tree traversal; labels and distributions.
    #[default]
    Tree,
}

/// Where tree traversal reads the chunk labels of the two tokens to the left.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LeftContext {
    /// The labels already decided for those tokens.
    #[default]
    Predicted,
    /// The rule-list replay labels, as seen during conversion.
    Replay,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DecodeOptions {
    pub mode: DecodeMode,
    pub left: LeftContext,
}

impl DecodeOptions {
    pub fn rule_list() -> Self {
        DecodeOptions { mode: DecodeMode::RuleList, ..Default::default() }
    }

    pub fn tree() -> Self {
        DecodeOptions::default()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TokenPrediction {
    pub label: TagId,
    pub distribution: Option<ClassDistribution>,
    /// Final rule hypothesis: the replay label, or the label carried to the leaf.
    pub hypothesis: TagId,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decoded {
    pub predictions: Vec<Vec<TokenPrediction>>,
}

impl Decoded {
    pub fn state(&self) -> TaggingState {
        TaggingState::new(self.predictions.iter().map(|s| s.iter().map(|p| p.label).collect()).collect())
    }

    pub fn hypotheses(&self) -> TaggingState {
        TaggingState::new(self.predictions.iter().map(|s| s.iter().map(|p| p.hypothesis).collect()).collect())
    }

    pub fn tokens(&self) -> impl Iterator<Item = &TokenPrediction> + '_ {
        self.predictions.iter().flatten()
    }
}

/// A rule list, optionally with its probabilistic tree, ready to tag.
#[derive(Clone, Debug)]
pub struct Model {
    rules: RuleList,
    tree: Option<ProbTree>,
    symbols: Symbols,
    compiled_rules: Vec<CompiledRule>,
    compiled_tree: Option<CompiledTree>,
}

struct FedForward<'a> {
    decided: &'a [TagId],
    history: &'a SentenceHistory,
}

impl Labels for FedForward<'_> {
    fn label_at(&self, token: usize, time: Option<usize>) -> TagId {
        match self.decided.get(token) {
            Some(&tag) => tag,
            None => self.history.label_at(token, time),
        }
    }
}

impl Model {
    pub fn new(rules: RuleList, tree: Option<ProbTree>) -> Result<Model> {
        if let Some(t) = &tree {
            if t.tags() != &rules.tags {
                return Err(Error::Inventory("tree and rule list use different tag inventories".into()));
            }
        }
        let mut symbols = Symbols::new();
        for r in &rules.rules {
            symbols.intern_predicate(&r.predicate);
        }
        if let Some(t) = &tree {
            t.intern_atoms(&mut symbols);
        }
        let compiled_rules = rules
            .rules
            .iter()
            .map(|r| CompiledRule::compile(r, &symbols, &rules.tags))
            .collect::<Result<Vec<_>>>()?;
        let compiled_tree = tree.as_ref().map(|t| t.compile(&symbols));
        Ok(Model { rules, tree, symbols, compiled_rules, compiled_tree })
    }

    pub fn rules(&self) -> &RuleList {
        &self.rules
    }

    pub fn tree(&self) -> Option<&ProbTree> {
        self.tree.as_ref()
    }

    pub fn tags(&self) -> &TagInventory {
        &self.rules.tags
    }

    fn encode(&self, sentence: &Sentence) -> EncodedSentence {
        EncodedSentence {
            words: sentence.tokens.iter().map(|t| self.symbols.lookup(Field::Word, &t.word)).collect(),
            pos: sentence.tokens.iter().map(|t| self.symbols.lookup(Field::Pos, &t.pos)).collect(),
            gold: sentence.tokens.iter().map(|t| t.chunk).collect(),
        }
    }

    /// Tags one sentence. Tokens are decided left to right; in tree mode the
    /// chunk labels to the right are read from the sentence's rule-list replay.
    pub fn decode_sentence(&self, sentence: &Sentence, options: DecodeOptions) -> Result<Vec<TokenPrediction>> {
        let encoded = self.encode(sentence);
        let initial: Vec<TagId> = sentence.tokens.iter().map(|t| self.rules.initial.label_for(&t.pos)).collect();
        let history = replay_sentence(&self.compiled_rules, &encoded, initial.clone());
        if options.mode == DecodeMode::RuleList {
            return Ok((0..sentence.len())
                .map(|i| {
                    let label = history.label_at(i, None);
                    TokenPrediction { label, distribution: None, hypothesis: label }
                })
                .collect());
        }
        let (Some(tree), Some(compiled)) = (&self.tree, &self.compiled_tree) else {
            return Err(Error::InvalidArgument("tree decoding needs a converted tree".into()));
        };
        let mut decided: Vec<TagId> = Vec::with_capacity(sentence.len());
        let mut out = Vec::with_capacity(sentence.len());
        for i in 0..sentence.len() {
            let reached = match options.left {
                LeftContext::Predicted => {
                    compiled.traverse(&encoded, i, initial[i], &FedForward { decided: &decided, history: &history })
                }
                LeftContext::Replay => compiled.traverse(&encoded, i, initial[i], &history),
            };
            let (distribution, hypothesis) = match reached {
                Some((leaf, hyp)) => match tree.node(leaf) {
                    Node::Leaf { distribution, .. } => (distribution.clone(), hyp),
                    Node::Internal { .. } => unreachable!("traversal ends at a leaf"),
                },
                // No training token started from this label: fall back to a
                // smoothed point mass on the initial label.
                None => {
                    let mut counts = vec![0; self.tags().len()];
                    counts[initial[i].index()] = 1;
                    (leaf_distribution(&counts, tree.epsilon())?, initial[i])
                }
            };
            let label = distribution.argmax();
            decided.push(label);
            out.push(TokenPrediction { label, distribution: Some(distribution), hypothesis });
        }
        Ok(out)
    }

    /// Tags every sentence of `corpus`, whose inventory must be the model's.
    pub fn decode_corpus(&self, corpus: &Corpus, options: DecodeOptions) -> Result<Decoded> {
        self.rules.check_inventory(corpus)?;
        let predictions = corpus
            .sentences()
            .par_iter()
            .map(|s| self.decode_sentence(s, options))
            .collect::<Result<Vec<_>>>()?;
        Ok(Decoded { predictions })
    }
}

/// Training, conversion and growth in one step.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub train: TrainConfig,
    pub k: usize,
    pub epsilon: f64,
    /// Minimum information gain for growth; `None` skips growth.
    pub grow: Option<f64>,
}

impl Default for Pipeline {
    fn default() -> Self {
        Pipeline {
            train: TrainConfig::default(),
            k: prob_tree::DEFAULT_K,
            epsilon: prob_tree::DEFAULT_EPSILON,
            grow: Some(0.0),
        }
    }
}

impl Pipeline {
    pub fn fit(&self, corpus: &Corpus) -> Result<Model> {
        Ok(self.fit_with_log(corpus)?.0)
    }

    pub fn fit_with_log(&self, corpus: &Corpus) -> Result<(Model, TrainingLog)> {
        let (rules, log) = trainer::train(corpus, &self.train)?;
        let mut tree = prob_tree::convert(&rules, corpus, self.k, self.epsilon)?;
        if let Some(min_gain) = self.grow {
            let config = GrowConfig { k: self.k, min_gain, lexicon_limit: self.train.lexicon_limit, max_splits: None };
            tree = prob_tree::grow(&tree, &rules, corpus, &config)?.0;
        }
        Ok((Model::new(rules, Some(tree))?, log))
    }
}

/// One token of a prediction file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictedToken {
    pub word: String,
    pub pos: String,
    pub gold: ChunkTag,
    pub pred: ChunkTag,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
}

/// Decoded corpus with gold tags.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictionFile {
    pub tags: TagInventory,
    pub sentences: Vec<Vec<PredictedToken>>,
}

const HEADER: &str = "#tags";

impl PredictionFile {
    pub fn new(corpus: &Corpus, decoded: &Decoded) -> Result<PredictionFile> {
        if decoded.predictions.len() != corpus.len() {
            return Err(Error::LengthMismatch { predicted: decoded.predictions.len(), gold: corpus.len() });
        }
        let tags = corpus.tags();
        let sentences = corpus
            .sentences()
            .iter()
            .zip(&decoded.predictions)
            .map(|(s, preds)| {
                if s.len() != preds.len() {
                    return Err(Error::LengthMismatch { predicted: preds.len(), gold: s.len() });
                }
                Ok(s.tokens
                    .iter()
                    .zip(preds)
                    .map(|(t, p)| PredictedToken {
                        word: t.word.clone(),
                        pos: t.pos.clone(),
                        gold: tags.tag(t.chunk).clone(),
                        pred: tags.tag(p.label).clone(),
                        probs: p.distribution.as_ref().map(|d| d.probs().to_vec()),
                    })
                    .collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PredictionFile { tags: tags.clone(), sentences })
    }

    /// Column format: a `#tags` header naming the distribution order, then
    /// `word pos gold pred [p(tag_1) .. p(tag_k)]` per token.
    pub fn to_columns(&self) -> String {
        let mut out = String::from(HEADER);
        for t in self.tags.iter() {
            write!(out, " {t}").unwrap();
        }
        out.push('\n');
        for s in &self.sentences {
            for t in s {
                write!(out, "{} {} {} {}", t.word, t.pos, t.gold, t.pred).unwrap();
                for p in t.probs.iter().flatten() {
                    write!(out, " {p}").unwrap();
                }
                out.push('\n');
            }
            out.push('\n');
        }
        out
    }

    /// One JSON object per sentence.
    pub fn to_json_lines(&self) -> Result<String> {
        let mut out = String::new();
        for s in &self.sentences {
            out.push_str(&serde_json::to_string(&serde_json::json!({ "tokens": s }))?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn parse_columns(text: &str) -> Result<PredictionFile> {
        let mut lines = text.lines().enumerate();
        let tags = match lines.next() {
            Some((_, h)) if h.starts_with(HEADER) => TagInventory::from_tags(
                h[HEADER.len()..]
                    .split_ascii_whitespace()
                    .map(|t| t.parse::<ChunkTag>().map_err(|message| Error::Parse { line: 1, message }))
                    .collect::<Result<Vec<_>>>()?,
            ),
            _ => return Err(Error::Parse { line: 1, message: format!("expected a `{HEADER}` header") }),
        };
        let k = tags.len();
        let mut sentences = Vec::new();
        let mut current = Vec::new();
        for (n, line) in lines {
            let err = |message: String| Error::Parse { line: n + 1, message };
            let cols: Vec<&str> = line.split_ascii_whitespace().collect();
            if cols.is_empty() {
                if !current.is_empty() {
                    sentences.push(std::mem::take(&mut current));
                }
                continue;
            }
            if cols.len() != 4 && cols.len() != 4 + k {
                return Err(err(format!("expected 4 or {} columns, got {}", 4 + k, cols.len())));
            }
            let tag = |s: &str| -> Result<ChunkTag> {
                let t: ChunkTag = s.parse().map_err(err)?;
                tags.id(&t).ok_or_else(|| err(format!("tag {t} not in the header")))?;
                Ok(t)
            };
            let probs = if cols.len() == 4 {
                None
            } else {
                let p = cols[4..]
                    .iter()
                    .map(|p| p.parse::<f64>().map_err(|e| err(e.to_string())))
                    .collect::<Result<Vec<_>>>()?;
                Some(p)
            };
            current.push(PredictedToken {
                word: cols[0].to_string(),
                pos: cols[1].to_string(),
                gold: tag(cols[2])?,
                pred: tag(cols[3])?,
                probs,
            });
        }
        if !current.is_empty() {
            sentences.push(current);
        }
        Ok(PredictionFile { tags, sentences })
    }

    pub fn gold_tags(&self) -> Vec<Vec<ChunkTag>> {
        self.sentences.iter().map(|s| s.iter().map(|t| t.gold.clone()).collect()).collect()
    }

    pub fn predicted_tags(&self) -> Vec<Vec<ChunkTag>> {
        self.sentences.iter().map(|s| s.iter().map(|t| t.pred.clone()).collect()).collect()
    }

    /// `(distribution, gold)` per token; the distribution is absent for
    /// label-only predictions.
    pub fn scored_tokens(&self) -> Result<Vec<(Option<ClassDistribution>, TagId)>> {
        self.sentences
            .iter()
            .flatten()
            .map(|t| {
                let gold = self.tags.require(&t.gold)?;
                let d = t.probs.clone().map(ClassDistribution::new).transpose()?;
                Ok((d, gold))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::token_accuracy;
    use crate::synth::SyntheticCorpus;

    fn fitted(n: usize, seed: u64) -> (Corpus, Model) {
        let c = SyntheticCorpus::new(seed).generate(n);
        let model = Pipeline::default().fit(&c).unwrap();
        (c, model)
    }

    #[test]
    fn rule_list_mode_reproduces_training_replay() {
        let c = SyntheticCorpus::new(31).generate(100);
        let (model, log) = Pipeline::default().fit_with_log(&c).unwrap();
        let decoded = model.decode_corpus(&c, DecodeOptions::rule_list()).unwrap();
        let replayed = model.rules().replay(&c).unwrap();
        assert_eq!(decoded.state(), replayed);
        let acc = replayed.correct_count(&c) as f64 / c.token_count() as f64;
        let last = log.iterations.last().map_or(log.initial_accuracy, |e| e.cumulative_accuracy);
        assert!((acc - last).abs() < 1e-12);
    }

    #[test]
    fn single_token_sentence() {
        let (c, model) = fitted(60, 32);
        let one = Corpus::parse("the DT B-NP\n").unwrap().with_inventory(c.tags()).unwrap();
        for opts in [DecodeOptions::tree(), DecodeOptions { left: LeftContext::Replay, ..DecodeOptions::tree() }] {
            let d = model.decode_corpus(&one, opts).unwrap();
            assert_eq!(d.predictions[0].len(), 1);
            let p = &d.predictions[0][0];
            assert_eq!(p.label, p.distribution.as_ref().unwrap().argmax());
        }
    }

    #[test]
    fn empty_rule_list_labels_by_pos_with_point_mass_leaves() {
        let c = SyntheticCorpus::new(33).generate(50);
        let p = Pipeline { train: TrainConfig { threshold: u64::MAX, ..TrainConfig::default() }, grow: None, ..Pipeline::default() };
        let model = p.fit(&c).unwrap();
        assert!(model.rules().rules.is_empty());
        let initial = model.rules().initial.state(&c, false).unwrap();
        let decoded = model.decode_corpus(&c, DecodeOptions::tree()).unwrap();
        assert_eq!(decoded.hypotheses(), initial);
        assert_eq!(decoded.state(), model.decode_corpus(&c, DecodeOptions::rule_list()).unwrap().state());
    }

    #[test]
    fn identical_sentences_decode_identically() {
        let (c, model) = fitted(60, 34);
        let s = &c.sentences()[3];
        let twice = c.select([3, 3]);
        let d = model.decode_corpus(&twice, DecodeOptions::tree()).unwrap();
        assert_eq!(d.predictions[0], d.predictions[1]);
        assert_eq!(d.predictions[0], model.decode_sentence(s, DecodeOptions::tree()).unwrap());
    }

    #[test]
    fn unseen_pos_uses_fallback_and_missing_root() {
        let (c, model) = fitted(60, 35);
        let odd = Corpus::parse("zzz NOPE B-NP\nqqq NOPE2 I-NP\n").unwrap().with_inventory(c.tags()).unwrap();
        let d = model.decode_corpus(&odd, DecodeOptions::tree()).unwrap();
        for p in &d.predictions[0] {
            let dist = p.distribution.as_ref().unwrap();
            assert!((dist.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn tree_decoding_needs_a_tree_and_matching_inventory() {
        let (c, model) = fitted(40, 36);
        let bare = Model::new(model.rules().clone(), None).unwrap();
        assert!(bare.decode_corpus(&c, DecodeOptions::tree()).is_err());
        assert!(bare.decode_corpus(&c, DecodeOptions::rule_list()).is_ok());
        let foreign = Corpus::parse("a DT O\n").unwrap();
        assert!(matches!(model.decode_corpus(&foreign, DecodeOptions::rule_list()), Err(Error::Inventory(_))));
    }

    #[test]
    fn prediction_columns_round_trip() {
        let all = SyntheticCorpus::new(37).generate(50);
        let model = Pipeline::default().fit(&all.select(0..40)).unwrap();
        let test = all.select(40..50);
        let decoded = model.decode_corpus(&test, DecodeOptions::tree()).unwrap();
        let file = PredictionFile::new(&test, &decoded).unwrap();
        let text = file.to_columns();
        let back = PredictionFile::parse_columns(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_columns(), text);
        let pred: Vec<TagId> = decoded.tokens().map(|p| p.label).collect();
        let gold: Vec<TagId> = test.sentences().iter().flat_map(|s| s.tokens.iter().map(|t| t.chunk)).collect();
        let acc = token_accuracy(&pred, &gold).unwrap();
        let a2 = token_accuracy(&back.predicted_tags().concat(), &back.gold_tags().concat()).unwrap();
        assert_eq!(acc, a2);
        assert_eq!(back.scored_tokens().unwrap().len(), test.token_count());
        assert_eq!(file.to_json_lines().unwrap().lines().count(), test.len());
    }

    #[test]
    fn malformed_prediction_files() {
        assert!(PredictionFile::parse_columns("a b B-NP B-NP\n").is_err());
        assert!(PredictionFile::parse_columns("#tags B-NP O\na b B-NP\n").is_err());
        assert!(PredictionFile::parse_columns("#tags B-NP O\na b B-NP B-VP\n").is_err());
        assert!(PredictionFile::parse_columns("#tags B-NP O\na b B-NP O 0.5 x\n").is_err());
        let ok = PredictionFile::parse_columns("#tags B-NP O\na b B-NP O 0.25 0.75\n\n").unwrap();
        assert_eq!(ok.sentences.len(), 1);
    }
}
