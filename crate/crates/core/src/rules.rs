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

//! Rule predicates over a five-token window, templates, and snapshot
//! application of rules to a tagging state.
//!
//! Everything in this module works directly on the strings of a [`Corpus`].
//! It is the reference semantics; the trainer, tree builder and decoder run
//! on the interned encoding in [`crate::features`] and are tested against it.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, CONTROLS};
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::corpus::{ChunkTag, Corpus, TagId};
use crate::error::{Error, Result};

/// Word value seen outside the sentence.
pub const WORD_BOUNDARY: &str = "<s:word>";
/// POS value seen outside the sentence.
pub const POS_BOUNDARY: &str = "<s:pos>";
/// Chunk value seen outside the sentence.
pub const CHUNK_BOUNDARY: &str = "<s:chunk>";

pub const WINDOW: i8 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Word,
    Pos,
    Chunk,
}

impl Field {
    pub const ALL: [Field; 3] = [Field::Word, Field::Pos, Field::Chunk];

    pub fn name(self) -> &'static str {
        match self {
            Field::Word => "word",
            Field::Pos => "pos",
            Field::Chunk => "chunk",
        }
    }

    pub fn boundary(self) -> &'static str {
        match self {
            Field::Word => WORD_BOUNDARY,
            Field::Pos => POS_BOUNDARY,
            Field::Chunk => CHUNK_BOUNDARY,
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "word" => Ok(Field::Word),
            "pos" => Ok(Field::Pos),
            "chunk" => Ok(Field::Chunk),
            _ => Err(Error::RuleFormat(format!("unknown field `{s}`"))),
        }
    }
}

/// A position relative to the target token plus the field read there.
/// Ordering is by offset, then field; predicates keep their atoms in this order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FeatureRef {
    pub offset: i8,
    pub field: Field,
}

impl FeatureRef {
    pub fn new(offset: i8, field: Field) -> Result<Self> {
        if !(-WINDOW..=WINDOW).contains(&offset) {
            return Err(Error::InvalidArgument(format!("offset {offset} outside the ±{WINDOW} window")));
        }
        Ok(FeatureRef { offset, field })
    }

    /// All 15 features of the window.
    pub fn all() -> Vec<FeatureRef> {
        let mut v = Vec::new();
        for offset in -WINDOW..=WINDOW {
            for field in Field::ALL {
                v.push(FeatureRef { offset, field });
            }
        }
        v
    }
}

impl fmt::Display for FeatureRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.offset > 0 {
            write!(f, "{}[+{}]", self.field.name(), self.offset)
        } else {
            write!(f, "{}[{}]", self.field.name(), self.offset)
        }
    }
}

impl FromStr for FeatureRef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::RuleFormat(format!("malformed feature `{s}`"));
        let (field, rest) = s.split_once('[').ok_or_else(bad)?;
        let offset = rest.strip_suffix(']').ok_or_else(bad)?;
        let offset: i8 = offset.trim_start_matches('+').parse().map_err(|_| bad())?;
        FeatureRef::new(offset, field.parse()?)
    }
}

/// One conjunct of a predicate: `feature == value`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Atom {
    pub feature: FeatureRef,
    pub value: String,
}

impl Atom {
    pub fn new(feature: FeatureRef, value: impl Into<String>) -> Self {
        Atom { feature, value: value.into() }
    }
}

const ESCAPED: &AsciiSet = &CONTROLS.add(b'%').add(b';').add(b'=').add(b' ');

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.feature, utf8_percent_encode(&self.value, ESCAPED))
    }
}

impl FromStr for Atom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (feature, value) = s
            .split_once('=')
            .ok_or_else(|| Error::RuleFormat(format!("malformed atom `{s}`")))?;
        let value = percent_decode_str(value)
            .decode_utf8()
            .map_err(|e| Error::RuleFormat(format!("atom `{s}`: {e}")))?;
        Ok(Atom { feature: feature.parse()?, value: value.into_owned() })
    }
}

/// A conjunction of atoms, at most one per feature, in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Predicate {
    atoms: Vec<Atom>,
}

impl Predicate {
    pub fn new(mut atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidArgument("predicate needs at least one atom".into()));
        }
        atoms.sort();
        if atoms.windows(2).any(|w| w[0].feature == w[1].feature) {
            return Err(Error::InvalidArgument("two atoms test the same feature".into()));
        }
        Ok(Predicate { atoms })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Evaluates the predicate at `(sentence, token)`; `chunk[0]` reads
    /// `own_label`, other chunk features read `state`.
    pub fn holds(&self, corpus: &Corpus, state: &TaggingState, sentence: usize, token: usize, own_label: &ChunkTag) -> bool {
        self.atoms.iter().all(|a| {
            let v = feature_value(corpus, state, sentence, token, a.feature, own_label);
            v == a.value
        })
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl FromStr for Predicate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let atoms = s.split(';').map(str::parse).collect::<Result<Vec<_>>>()?;
        Predicate::new(atoms).map_err(|e| Error::RuleFormat(e.to_string()))
    }
}

fn feature_value(
    corpus: &Corpus,
    state: &TaggingState,
    sentence: usize,
    token: usize,
    feature: FeatureRef,
    own_label: &ChunkTag,
) -> String {
    let tokens = &corpus.sentences()[sentence].tokens;
    let j = token as isize + feature.offset as isize;
    if j < 0 || j >= tokens.len() as isize {
        return feature.field.boundary().to_string();
    }
    let j = j as usize;
    match feature.field {
        Field::Word => tokens[j].word.clone(),
        Field::Pos => tokens[j].pos.clone(),
        Field::Chunk if feature.offset == 0 => own_label.to_string(),
        Field::Chunk => corpus.tag(state.get(sentence, j)).to_string(),
    }
}

/// `if predicate and label = source then label <- target`, learned at
/// position `index` of its list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    pub predicate: Predicate,
    pub source: ChunkTag,
    pub target: ChunkTag,
    pub index: usize,
}

impl Rule {
    pub fn new(predicate: Predicate, source: ChunkTag, target: ChunkTag, index: usize) -> Result<Self> {
        if source == target {
            return Err(Error::InvalidArgument(format!("rule rewrites {source} to itself")));
        }
        Ok(Rule { predicate, source, target, index })
    }

    /// Whether the rule fires at `(sentence, token)` of `state`.
    pub fn applies(&self, corpus: &Corpus, state: &TaggingState, sentence: usize, token: usize) -> bool {
        let current = corpus.tag(state.get(sentence, token));
        *current == self.source && self.predicate.holds(corpus, state, sentence, token, current)
    }

    /// Serialized form without the index; used for deterministic tie-breaks.
    pub fn body(&self) -> String {
        format!("{}\t{}\t{}", self.source, self.target, self.predicate)
    }

    /// `t<TAB>source<TAB>target<TAB>atom(;atom)*`
    pub fn to_line(&self) -> String {
        format!("{}\t{}", self.index, self.body())
    }

    pub fn parse_line(line: &str) -> Result<Rule> {
        let cols: Vec<&str> = line.split('\t').collect();
        let [t, source, target, atoms] = cols[..] else {
            return Err(Error::RuleFormat(format!("expected 4 tab-separated columns: `{line}`")));
        };
        let index = t.parse().map_err(|_| Error::RuleFormat(format!("bad rule index `{t}`")))?;
        let source: ChunkTag = source.parse().map_err(Error::RuleFormat)?;
        let target: ChunkTag = target.parse().map_err(Error::RuleFormat)?;
        Rule::new(atoms.parse()?, source, target, index).map_err(|e| Error::RuleFormat(e.to_string()))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "if {} and label={} then label<-{}", self.predicate, self.source, self.target)
    }
}

/// A set of features whose values are read off the data to form a predicate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Template {
    features: Vec<FeatureRef>,
}

impl Template {
    pub fn new(mut features: Vec<FeatureRef>) -> Result<Self> {
        features.sort();
        features.dedup();
        if features.is_empty() {
            return Err(Error::InvalidArgument("empty template".into()));
        }
        Ok(Template { features })
    }

    pub fn features(&self) -> &[FeatureRef] {
        &self.features
    }

    /// Reads the template at a position, giving the predicate a rule built
    /// from it there would carry.
    pub fn instantiate(&self, corpus: &Corpus, state: &TaggingState, sentence: usize, token: usize) -> Predicate {
        let own = corpus.tag(state.get(sentence, token));
        let atoms = self
            .features
            .iter()
            .map(|&f| Atom::new(f, feature_value(corpus, state, sentence, token, f, own)))
            .collect();
        Predicate { atoms }
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, feat) in self.features.iter().enumerate() {
            if i > 0 {
                f.write_str("&")?;
            }
            write!(f, "{feat}")?;
        }
        Ok(())
    }
}

impl FromStr for Template {
    type Err = Error;

    /// `pos[-1]&pos[0]`
    fn from_str(s: &str) -> Result<Self> {
        let features = s.split('&').map(|f| f.trim().parse()).collect::<Result<Vec<_>>>()?;
        Template::new(features)
    }
}

/// The stock template set: every single feature, same-field bigrams at
/// adjacent offsets, a few cross-field pairs, and the centred POS trigram.
pub fn default_templates() -> Vec<Template> {
    let f = |offset, field| FeatureRef { offset, field };
    let mut out: Vec<Template> = Vec::new();
    for feat in FeatureRef::all() {
        out.push(Template { features: vec![feat] });
    }
    for field in Field::ALL {
        for lo in -WINDOW..WINDOW {
            out.push(Template::new(vec![f(lo, field), f(lo + 1, field)]).unwrap());
        }
    }
    use Field::*;
    let pairs = [
        (f(0, Pos), f(-1, Pos)),
        (f(0, Pos), f(1, Pos)),
        (f(0, Word), f(0, Pos)),
        (f(-1, Chunk), f(0, Pos)),
        (f(-1, Chunk), f(0, Word)),
        (f(-1, Chunk), f(-2, Chunk)),
    ];
    for (a, b) in pairs {
        out.push(Template::new(vec![a, b]).unwrap());
    }
    out.push(Template::new(vec![f(-1, Pos), f(0, Pos), f(1, Pos)]).unwrap());
    let mut seen = FxHashSet::default();
    out.retain(|t| seen.insert(t.clone()));
    out
}

/// Parses a template list: one template per line or `,`-separated; `#`
/// starts a comment.
pub fn parse_templates(text: &str) -> Result<Vec<Template>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for t in line.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            out.push(t.parse()?);
        }
    }
    Ok(out)
}

/// The `n` most ambiguous words: ranked by the number of distinct gold chunk
/// tags, then by frequency, then lexicographically.
pub fn most_ambiguous_words(corpus: &Corpus, n: usize) -> FxHashSet<String> {
    let mut stats: FxHashMap<&str, (FxHashSet<TagId>, usize)> = FxHashMap::default();
    for t in corpus.sentences().iter().flat_map(|s| &s.tokens) {
        let e = stats.entry(t.word.as_str()).or_default();
        e.0.insert(t.chunk);
        e.1 += 1;
    }
    let mut ranked: Vec<(usize, usize, &str)> =
        stats.into_iter().map(|(w, (tags, freq))| (tags.len(), freq, w)).collect();
    ranked.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.cmp(&a.1)).then(a.2.cmp(b.2)));
    ranked.into_iter().take(n).map(|(_, _, w)| w.to_string()).collect()
}

/// Current hypothesis label of every token, aligned with a corpus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaggingState {
    labels: Vec<Vec<TagId>>,
}

impl TaggingState {
    pub fn new(labels: Vec<Vec<TagId>>) -> Self {
        TaggingState { labels }
    }

    /// The gold labels of a corpus.
    pub fn gold(corpus: &Corpus) -> Self {
        TaggingState {
            labels: corpus.sentences().iter().map(|s| s.tokens.iter().map(|t| t.chunk).collect()).collect(),
        }
    }

    pub fn get(&self, sentence: usize, token: usize) -> TagId {
        self.labels[sentence][token]
    }

    pub fn set(&mut self, sentence: usize, token: usize, tag: TagId) {
        self.labels[sentence][token] = tag;
    }

    pub fn sentence(&self, sentence: usize) -> &[TagId] {
        &self.labels[sentence]
    }

    pub fn sentences(&self) -> &[Vec<TagId>] {
        &self.labels
    }

    pub fn into_inner(self) -> Vec<Vec<TagId>> {
        self.labels
    }

    pub fn is_aligned(&self, corpus: &Corpus) -> bool {
        self.labels.len() == corpus.len()
            && self.labels.iter().zip(corpus.sentences()).all(|(l, s)| l.len() == s.len())
    }

    pub fn correct_count(&self, corpus: &Corpus) -> usize {
        corpus
            .sentences()
            .iter()
            .zip(&self.labels)
            .map(|(s, l)| s.tokens.iter().zip(l).filter(|(t, &l)| t.chunk == l).count())
            .sum()
    }

    pub fn accuracy(&self, corpus: &Corpus) -> f64 {
        let n = corpus.token_count();
        if n == 0 {
            return 0.0;
        }
        self.correct_count(corpus) as f64 / n as f64
    }
}

/// Applies `rule` everywhere at once: applicability is decided on the input
/// state, then all matches are rewritten. Returns the new state and the
/// number of rewritten tokens.
pub fn apply_rule_pass(rule: &Rule, corpus: &Corpus, state: &TaggingState) -> Result<(TaggingState, usize)> {
    let target = corpus.tags().require(&rule.target)?;
    let mut matched = Vec::new();
    for (s, sentence) in corpus.sentences().iter().enumerate() {
        for i in 0..sentence.len() {
            if rule.applies(corpus, state, s, i) {
                matched.push((s, i));
            }
        }
    }
    let mut next = state.clone();
    for &(s, i) in &matched {
        next.set(s, i, target);
    }
    Ok((next, matched.len()))
}

/// All error-driven candidate rules: for every template and every token
/// whose current label is wrong, the rule that would rewrite it to gold.
/// Returned rules carry index 0. With `lexicon`, word atoms are restricted
/// to the given words.
pub fn instantiate_candidates(
    templates: &[Template],
    corpus: &Corpus,
    state: &TaggingState,
    lexicon: Option<&FxHashSet<String>>,
) -> BTreeSet<Rule> {
    let mut out = BTreeSet::new();
    for (s, sentence) in corpus.sentences().iter().enumerate() {
        for (i, token) in sentence.tokens.iter().enumerate() {
            let current = state.get(s, i);
            if current == token.chunk {
                continue;
            }
            for template in templates {
                let predicate = template.instantiate(corpus, state, s, i);
                if !lexicon_allows(&predicate, lexicon) {
                    continue;
                }
                out.insert(Rule {
                    predicate,
                    source: corpus.tag(current).clone(),
                    target: corpus.tag(token.chunk).clone(),
                    index: 0,
                });
            }
        }
    }
    out
}

fn lexicon_allows(predicate: &Predicate, lexicon: Option<&FxHashSet<String>>) -> bool {
    let Some(lex) = lexicon else { return true };
    predicate
        .atoms()
        .iter()
        .filter(|a| a.feature.field == Field::Word)
        .all(|a| a.value == WORD_BOUNDARY || lex.contains(&a.value))
}
