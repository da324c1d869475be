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

//! Greedy transformation-based learning.
//!
//! The production trainer keeps a table of `(template instance, current
//! label) -> gold label counts` over the whole training set. Under snapshot
//! semantics a rule's score is purely local (each rewritten token either
//! becomes right, becomes wrong, or stays wrong), so the score of every
//! candidate can be read off that table. After a rule is applied only the
//! tokens within the window of a rewritten token are re-counted.
//!
//! [`train_exhaustive`] is the slow reference: regenerate candidates and
//! re-score each one by a full pass, every iteration.

use std::cmp::Reverse;
use std::collections::BTreeSet;
use std::fmt::Write as _;

use indexmap::IndexMap;
use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, CONTROLS};
use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;
use smallvec::SmallVec;

use crate::corpus::{ChunkTag, Corpus, TagId, TagInventory};
use crate::error::{Error, Result};
use crate::features::{value_at, EncodedSentence, Sym, Symbols, BOUNDARY, BOUNDARY_TAG};
use crate::rules::{
    apply_rule_pass, default_templates, instantiate_candidates, most_ambiguous_words, Atom, FeatureRef, Field,
    Predicate, Rule, TaggingState, Template, CHUNK_BOUNDARY,
};

/// Largest template the indexed trainer accepts.
pub const MAX_TEMPLATE_ATOMS: usize = 4;

/// POS-based initial class assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialAssignment {
    by_pos: IndexMap<String, TagId>,
    fallback: TagId,
}

impl InitialAssignment {
    pub fn new(by_pos: IndexMap<String, TagId>, fallback: TagId) -> Self {
        InitialAssignment { by_pos, fallback }
    }

    pub fn get(&self, pos: &str) -> Option<TagId> {
        self.by_pos.get(pos).copied()
    }

    /// Label for `pos`, falling back to the corpus-wide majority tag.
    pub fn label_for(&self, pos: &str) -> TagId {
        self.get(pos).unwrap_or(self.fallback)
    }

    pub fn fallback(&self) -> TagId {
        self.fallback
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, TagId)> + '_ {
        self.by_pos.iter().map(|(p, &t)| (p.as_str(), t))
    }

    /// Initial state for a corpus sharing this assignment's inventory. With
    /// `strict`, an unknown POS is an error instead of taking the fallback.
    pub fn state(&self, corpus: &Corpus, strict: bool) -> Result<TaggingState> {
        let mut labels = Vec::with_capacity(corpus.len());
        for s in corpus.sentences() {
            let mut row = Vec::with_capacity(s.len());
            for t in &s.tokens {
                row.push(match self.get(&t.pos) {
                    Some(tag) => tag,
                    None if strict => return Err(Error::MissingPos(t.pos.clone())),
                    None => self.fallback,
                });
            }
            labels.push(row);
        }
        Ok(TaggingState::new(labels))
    }
}

fn argmax_first(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

/// Maps every POS to its most frequent gold tag (ties go to the earlier tag
/// in the inventory) and labels the corpus accordingly.
pub fn initial_assignment(corpus: &Corpus) -> Result<(InitialAssignment, TaggingState)> {
    if corpus.is_empty() {
        return Err(Error::InvalidArgument("cannot derive an initial assignment from an empty corpus".into()));
    }
    let k = corpus.tags().len();
    let mut per_pos: IndexMap<&str, Vec<usize>> = IndexMap::new();
    let mut global = vec![0usize; k];
    for t in corpus.sentences().iter().flat_map(|s| &s.tokens) {
        per_pos.entry(t.pos.as_str()).or_insert_with(|| vec![0; k])[t.chunk.index()] += 1;
        global[t.chunk.index()] += 1;
    }
    let by_pos = per_pos
        .into_iter()
        .map(|(p, counts)| (p.to_string(), TagId(argmax_first(&counts) as u16)))
        .collect();
    let assignment = InitialAssignment { by_pos, fallback: TagId(argmax_first(&global) as u16) };
    let state = assignment.state(corpus, true)?;
    Ok((assignment, state))
}

/// A learned transformation list together with what is needed to replay it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleList {
    pub tags: TagInventory,
    pub initial: InitialAssignment,
    pub rules: Vec<Rule>,
}

const POS_ESCAPED: &AsciiSet = &CONTROLS.add(b'%').add(b' ');

impl RuleList {
    /// Replays the list over `corpus` with whole-corpus snapshot passes.
    pub fn replay(&self, corpus: &Corpus) -> Result<TaggingState> {
        self.check_inventory(corpus)?;
        let mut state = self.initial.state(corpus, false)?;
        for rule in &self.rules {
            state = apply_rule_pass(rule, corpus, &state)?.0;
        }
        Ok(state)
    }

    pub fn check_inventory(&self, corpus: &Corpus) -> Result<()> {
        if corpus.tags() != &self.tags {
            return Err(Error::Inventory(
                "corpus tag inventory differs from the model's; re-index the corpus first".into(),
            ));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# tbldt rule list\n@tags");
        for t in self.tags.iter() {
            write!(out, "\t{t}").unwrap();
        }
        writeln!(out, "\n@fallback\t{}", self.tags.tag(self.initial.fallback)).unwrap();
        for (pos, tag) in self.initial.entries() {
            writeln!(out, "@initial\t{}\t{}", utf8_percent_encode(pos, POS_ESCAPED), self.tags.tag(tag)).unwrap();
        }
        for r in &self.rules {
            out.push_str(&r.to_line());
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<RuleList> {
        let mut tags: Option<TagInventory> = None;
        let mut fallback = None;
        let mut by_pos = IndexMap::new();
        let mut rules = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let err = |m: String| Error::RuleFormat(format!("line {}: {m}", n + 1));
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('@') {
                let cols: Vec<&str> = rest.split('\t').collect();
                let tag = |s: &str| -> Result<TagId> {
                    let inv = tags.as_ref().ok_or_else(|| err("@tags must come first".into()))?;
                    let t: ChunkTag = s.parse().map_err(err)?;
                    inv.id(&t).ok_or_else(|| err(format!("tag {t} not in @tags")))
                };
                match cols[..] {
                    ["tags", ref ts @ ..] => {
                        let parsed = ts.iter().map(|t| t.parse::<ChunkTag>()).collect::<std::result::Result<Vec<_>, _>>();
                        tags = Some(TagInventory::from_tags(parsed.map_err(err)?));
                    }
                    ["fallback", t] => fallback = Some(tag(t)?),
                    ["initial", pos, t] => {
                        let pos = percent_decode_str(pos).decode_utf8().map_err(|e| err(e.to_string()))?;
                        by_pos.insert(pos.into_owned(), tag(t)?);
                    }
                    _ => return Err(err(format!("unknown directive `{line}`"))),
                }
                continue;
            }
            let rule = Rule::parse_line(line).map_err(|e| err(e.to_string()))?;
            if rule.index != rules.len() {
                return Err(err(format!("rule index {} out of sequence", rule.index)));
            }
            let inv = tags.as_ref().ok_or_else(|| err("@tags must come first".into()))?;
            for t in [&rule.source, &rule.target] {
                inv.id(t).ok_or_else(|| err(format!("tag {t} not in @tags")))?;
            }
            rules.push(rule);
        }
        let tags = tags.ok_or_else(|| Error::RuleFormat("missing @tags".into()))?;
        let fallback = fallback.ok_or_else(|| Error::RuleFormat("missing @fallback".into()))?;
        Ok(RuleList { tags, initial: InitialAssignment { by_pos, fallback }, rules })
    }
}

#[derive(Clone, Debug)]
pub struct TrainConfig {
    /// Minimum net score a rule must reach to be learned; `u64::MAX` learns nothing.
    pub threshold: u64,
    pub templates: Vec<Template>,
    /// Restrict word atoms to this many most ambiguous training words.
    pub lexicon_limit: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { threshold: 2, templates: default_templates(), lexicon_limit: None }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if self.threshold == 0 {
            return Err(Error::InvalidArgument("threshold must be at least 1".into()));
        }
        if self.templates.is_empty() {
            return Err(Error::InvalidArgument("no templates".into()));
        }
        if let Some(t) = self.templates.iter().find(|t| t.features().len() > MAX_TEMPLATE_ATOMS) {
            return Err(Error::InvalidArgument(format!("template {t} exceeds {MAX_TEMPLATE_ATOMS} atoms")));
        }
        Ok(())
    }

    fn threshold_score(&self) -> i64 {
        self.threshold.min(i64::MAX as u64) as i64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogEntry {
    pub t: usize,
    pub rule: String,
    pub score: i64,
    pub cumulative_accuracy: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TrainingLog {
    pub initial_accuracy: f64,
    pub iterations: Vec<LogEntry>,
}

/// Net score of `rule` on `state`: tokens it makes correct minus tokens it
/// makes incorrect.
pub fn score_rule(rule: &Rule, state: &TaggingState, corpus: &Corpus) -> Result<i64> {
    let target = corpus.tags().require(&rule.target)?;
    let mut score = 0i64;
    for (s, sentence) in corpus.sentences().iter().enumerate() {
        for (i, tok) in sentence.tokens.iter().enumerate() {
            if rule.applies(corpus, state, s, i) {
                let was = state.get(s, i) == tok.chunk;
                let now = target == tok.chunk;
                score += now as i64 - was as i64;
            }
        }
    }
    Ok(score)
}

fn lexicon(corpus: &Corpus, config: &TrainConfig) -> Option<FxHashSet<String>> {
    config.lexicon_limit.map(|n| most_ambiguous_words(corpus, n))
}

/// Reference trainer: full candidate regeneration and full re-scoring each
/// iteration. Quadratic; meant for small corpora and as an oracle.
pub fn train_exhaustive(corpus: &Corpus, config: &TrainConfig) -> Result<RuleList> {
    config.validate()?;
    let (initial, mut state) = initial_assignment(corpus)?;
    let lex = lexicon(corpus, config);
    let threshold = config.threshold_score();
    let mut rules = Vec::new();
    loop {
        let mut best: Option<(i64, Reverse<usize>, Reverse<String>, Rule)> = None;
        for cand in instantiate_candidates(&config.templates, corpus, &state, lex.as_ref()) {
            let key = (score_rule(&cand, &state, corpus)?, Reverse(cand.predicate.atoms().len()), Reverse(cand.body()));
            if best.as_ref().is_none_or(|b| (&key.0, &key.1, &key.2) > (&b.0, &b.1, &b.2)) {
                best = Some((key.0, key.1, key.2, cand));
            }
        }
        let Some((score, _, _, mut rule)) = best else { break };
        if score < threshold {
            break;
        }
        rule.index = rules.len();
        state = apply_rule_pass(&rule, corpus, &state)?.0;
        rules.push(rule);
    }
    Ok(RuleList { tags: corpus.tags().clone(), initial, rules })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct CondKey {
    template: u16,
    source: u16,
    values: [Sym; MAX_TEMPLATE_ATOMS],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct RuleKey {
    cond: CondKey,
    target: u16,
}

/// Gold tag -> number of tokens.
type Counts = SmallVec<[(u16, u32); 2]>;

fn count_of(counts: &Counts, tag: u16) -> i64 {
    counts.iter().find(|(t, _)| *t == tag).map_or(0, |&(_, c)| c as i64)
}

struct IndexedTrainer<'a> {
    corpus: &'a Corpus,
    symbols: Symbols,
    templates: Vec<Vec<FeatureRef>>,
    sentences: Vec<EncodedSentence>,
    labels: Vec<Vec<TagId>>,
    allowed_words: Option<FxHashSet<Sym>>,
    table: FxHashMap<CondKey, Counts>,
    /// Rules scoring at least the threshold, best first.
    ranked: BTreeSet<(Reverse<i64>, u8, RuleKey)>,
    threshold: i64,
}

impl<'a> IndexedTrainer<'a> {
    fn key_at(&self, s: usize, q: usize, template: usize) -> Option<CondKey> {
        let sentence = &self.sentences[s];
        let labels = &self.labels[s];
        let own = labels[q];
        let mut values = [0; MAX_TEMPLATE_ATOMS];
        for (slot, f) in self.templates[template].iter().enumerate() {
            let v = value_at(sentence, q, f.offset, f.field, own, labels.as_slice(), None);
            if f.field == Field::Word && v != BOUNDARY {
                if let Some(allowed) = &self.allowed_words {
                    if !allowed.contains(&v) {
                        return None;
                    }
                }
            }
            values[slot] = v;
        }
        Some(CondKey { template: template as u16, source: own.0, values })
    }

    fn bump(&mut self, key: CondKey, gold: u16, delta: i32) {
        let counts = self.table.entry(key).or_default();
        match counts.iter_mut().find(|(t, _)| *t == gold) {
            Some(e) => e.1 = (e.1 as i64 + delta as i64) as u32,
            None => {
                debug_assert!(delta > 0);
                counts.push((gold, delta as u32));
            }
        }
        counts.retain(|e| e.1 > 0);
        if counts.is_empty() {
            self.table.remove(&key);
        }
    }

    fn rank_entries(&self, key: CondKey, counts: &Counts) -> impl Iterator<Item = (Reverse<i64>, u8, RuleKey)> + '_ {
        let bad = count_of(counts, key.source);
        let natoms = self.templates[key.template as usize].len() as u8;
        let threshold = self.threshold;
        counts
            .iter()
            .filter(move |(t, _)| *t != key.source)
            .map(move |&(t, good)| (good as i64 - bad, t))
            .filter(move |&(score, _)| score >= threshold)
            .map(move |(score, t)| (Reverse(score), natoms, RuleKey { cond: key, target: t }))
            .collect::<Vec<_>>()
            .into_iter()
    }

    fn build(&mut self) {
        for s in 0..self.sentences.len() {
            for q in 0..self.sentences[s].len() {
                let gold = self.sentences[s].gold[q].0;
                for t in 0..self.templates.len() {
                    if let Some(k) = self.key_at(s, q, t) {
                        self.bump(k, gold, 1);
                    }
                }
            }
        }
        let entries: Vec<_> = self.table.iter().flat_map(|(k, c)| self.rank_entries(*k, c)).collect();
        self.ranked.extend(entries);
    }

    fn to_rule(&self, key: &RuleKey) -> Rule {
        let tags = self.corpus.tags();
        let atoms = self.templates[key.cond.template as usize]
            .iter()
            .zip(key.cond.values)
            .map(|(&f, v)| {
                let value = match f.field {
                    Field::Chunk if v == BOUNDARY_TAG => CHUNK_BOUNDARY.to_string(),
                    Field::Chunk => tags.tag(TagId(v as u16)).to_string(),
                    field => self.symbols.resolve(field, v).to_string(),
                };
                Atom::new(f, value)
            })
            .collect();
        Rule {
            predicate: Predicate::new(atoms).expect("templates have distinct features"),
            source: tags.tag(TagId(key.cond.source)).clone(),
            target: tags.tag(TagId(key.target)).clone(),
            index: 0,
        }
    }

    /// Best rule under the tie-break: highest score, fewest atoms, smallest
    /// serialization.
    fn best(&self) -> Option<(i64, RuleKey, Rule)> {
        let &(Reverse(score), natoms, _) = self.ranked.iter().next()?;
        self.ranked
            .iter()
            .take_while(|(s, n, _)| s.0 == score && *n == natoms)
            .map(|(_, _, k)| (self.to_rule(k), *k))
            .min_by(|a, b| a.0.body().cmp(&b.0.body()))
            .map(|(rule, key)| (score, key, rule))
    }

    fn matches(&self, key: &RuleKey, s: usize, q: usize) -> bool {
        let labels = &self.labels[s];
        if labels[q].0 != key.cond.source {
            return false;
        }
        let sentence = &self.sentences[s];
        self.templates[key.cond.template as usize]
            .iter()
            .zip(key.cond.values)
            .all(|(f, v)| value_at(sentence, q, f.offset, f.field, labels[q], labels.as_slice(), None) == v)
    }

    /// Applies the rule, updates counts around every rewritten token and
    /// returns the number of rewrites.
    fn apply(&mut self, key: &RuleKey) -> usize {
        let mut changed = Vec::new();
        for s in 0..self.sentences.len() {
            for q in 0..self.sentences[s].len() {
                if self.matches(key, s, q) {
                    changed.push((s, q));
                }
            }
        }
        let mut affected: Vec<(usize, usize)> = Vec::new();
        let w = crate::rules::WINDOW as usize;
        for &(s, q) in &changed {
            let n = self.sentences[s].len();
            for r in q.saturating_sub(w)..(q + w + 1).min(n) {
                affected.push((s, r));
            }
        }
        affected.sort_unstable();
        affected.dedup();

        let mut before: FxHashMap<CondKey, Counts> = FxHashMap::default();
        for &(s, q) in &affected {
            let gold = self.sentences[s].gold[q].0;
            for t in 0..self.templates.len() {
                if let Some(k) = self.key_at(s, q, t) {
                    before.entry(k).or_insert_with(|| self.table.get(&k).cloned().unwrap_or_default());
                    self.bump(k, gold, -1);
                }
            }
        }
        let target = TagId(key.target);
        for &(s, q) in &changed {
            self.labels[s][q] = target;
        }
        for &(s, q) in &affected {
            let gold = self.sentences[s].gold[q].0;
            for t in 0..self.templates.len() {
                if let Some(k) = self.key_at(s, q, t) {
                    before.entry(k).or_insert_with(|| self.table.get(&k).cloned().unwrap_or_default());
                    self.bump(k, gold, 1);
                }
            }
        }
        for (k, old) in before {
            let stale: Vec<_> = self.rank_entries(k, &old).collect();
            for e in stale {
                self.ranked.remove(&e);
            }
            let fresh: Vec<_> = match self.table.get(&k) {
                Some(counts) => self.rank_entries(k, counts).collect(),
                None => Vec::new(),
            };
            self.ranked.extend(fresh);
        }
        changed.len()
    }
}

/// Learns a rule list. Candidate scores come from an incrementally
/// maintained count table; the result is identical to
/// [`train_exhaustive`].
pub fn train(corpus: &Corpus, config: &TrainConfig) -> Result<(RuleList, TrainingLog)> {
    config.validate()?;
    let (initial, state) = initial_assignment(corpus)?;
    let mut symbols = Symbols::new();
    symbols.intern_corpus(corpus);
    let allowed_words = lexicon(corpus, config)
        .map(|words| words.iter().map(|w| symbols.lookup(Field::Word, w)).collect());
    let mut trainer = IndexedTrainer {
        corpus,
        sentences: symbols.encode(corpus),
        symbols,
        templates: config.templates.iter().map(|t| t.features().to_vec()).collect(),
        labels: state.into_inner(),
        allowed_words,
        table: FxHashMap::default(),
        ranked: BTreeSet::new(),
        threshold: config.threshold_score(),
    };
    trainer.build();

    let total = corpus.token_count().max(1) as f64;
    let mut correct = TaggingState::new(trainer.labels.clone()).correct_count(corpus) as i64;
    let mut log = TrainingLog { initial_accuracy: correct as f64 / total, iterations: Vec::new() };
    let mut rules = Vec::new();
    while let Some((score, key, mut rule)) = trainer.best() {
        if score < trainer.threshold {
            break;
        }
        trainer.apply(&key);
        correct += score;
        rule.index = rules.len();
        log.iterations.push(LogEntry {
            t: rule.index,
            rule: rule.body(),
            score,
            cumulative_accuracy: correct as f64 / total,
        });
        rules.push(rule);
    }
    Ok((RuleList { tags: corpus.tags().clone(), initial, rules }, log))
}
