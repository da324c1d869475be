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

//! Interned token encoding and compiled predicates.
//!
//! Words and POS tags are mapped to dense integer symbols, chunk tags to
//! their inventory index. Symbol 0 is the out-of-sentence sentinel for
//! every field.

use indexmap::IndexSet;
use rayon::prelude::*;
use smallvec::SmallVec;

use crate::corpus::{Corpus, TagId, TagInventory};
use crate::error::Result;
use crate::rules::{Field, Predicate, Rule, CHUNK_BOUNDARY, POS_BOUNDARY, WORD_BOUNDARY};

pub type Sym = u32;

pub const BOUNDARY: Sym = 0;
/// A token value the symbol table has never seen.
pub const UNSEEN: Sym = u32::MAX;
/// An atom value the symbol table has never seen; never equal to a token value.
pub const NO_MATCH: Sym = u32::MAX - 1;
/// Chunk value of out-of-sentence positions.
pub const BOUNDARY_TAG: Sym = u16::MAX as Sym;

#[derive(Clone, Debug)]
pub struct Symbols {
    words: IndexSet<String>,
    pos: IndexSet<String>,
}

impl Default for Symbols {
    fn default() -> Self {
        Self::new()
    }
}

impl Symbols {
    pub fn new() -> Self {
        let mut words = IndexSet::new();
        words.insert(WORD_BOUNDARY.to_string());
        let mut pos = IndexSet::new();
        pos.insert(POS_BOUNDARY.to_string());
        Symbols { words, pos }
    }

    fn table(&self, field: Field) -> &IndexSet<String> {
        match field {
            Field::Word => &self.words,
            Field::Pos => &self.pos,
            Field::Chunk => panic!("chunk values are tag ids, not symbols"),
        }
    }

    pub fn intern(&mut self, field: Field, value: &str) -> Sym {
        let table = match field {
            Field::Word => &mut self.words,
            Field::Pos => &mut self.pos,
            Field::Chunk => panic!("chunk values are tag ids, not symbols"),
        };
        if let Some(i) = table.get_index_of(value) {
            return i as Sym;
        }
        table.insert_full(value.to_string()).0 as Sym
    }

    pub fn lookup(&self, field: Field, value: &str) -> Sym {
        self.table(field).get_index_of(value).map_or(UNSEEN, |i| i as Sym)
    }

    pub fn resolve(&self, field: Field, sym: Sym) -> &str {
        &self.table(field)[sym as usize]
    }

    pub fn intern_corpus(&mut self, corpus: &Corpus) {
        for t in corpus.sentences().iter().flat_map(|s| &s.tokens) {
            self.intern(Field::Word, &t.word);
            self.intern(Field::Pos, &t.pos);
        }
    }

    pub fn intern_predicate(&mut self, predicate: &Predicate) {
        for a in predicate.atoms() {
            if a.feature.field != Field::Chunk {
                self.intern(a.feature.field, &a.value);
            }
        }
    }

    /// Encodes a corpus; gold tags keep the corpus's own indices.
    pub fn encode(&self, corpus: &Corpus) -> Vec<EncodedSentence> {
        corpus
            .sentences()
            .iter()
            .map(|s| EncodedSentence {
                words: s.tokens.iter().map(|t| self.lookup(Field::Word, &t.word)).collect(),
                pos: s.tokens.iter().map(|t| self.lookup(Field::Pos, &t.pos)).collect(),
                gold: s.tokens.iter().map(|t| t.chunk).collect(),
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct EncodedSentence {
    pub words: Vec<Sym>,
    pub pos: Vec<Sym>,
    pub gold: Vec<TagId>,
}

impl EncodedSentence {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Source of neighbour labels. `time = Some(t)` asks for the label a token
/// carried just before rule `t` of the list was applied; `None` for the
/// label after the whole list.
pub trait Labels {
    fn label_at(&self, token: usize, time: Option<usize>) -> TagId;
}

impl Labels for [TagId] {
    fn label_at(&self, token: usize, _time: Option<usize>) -> TagId {
        self[token]
    }
}

impl Labels for Vec<TagId> {
    fn label_at(&self, token: usize, _time: Option<usize>) -> TagId {
        self[token]
    }
}

/// Per-token label trajectory of one sentence under rule-list replay.
#[derive(Clone, Debug, Default)]
pub struct SentenceHistory {
    pub initial: Vec<TagId>,
    /// `(rule index, new label)` in increasing rule order.
    pub changes: Vec<SmallVec<[(u32, TagId); 2]>>,
}

impl SentenceHistory {
    pub fn final_labels(&self) -> Vec<TagId> {
        (0..self.initial.len()).map(|i| self.label_at(i, None)).collect()
    }

    /// Indices of the rules that fired on `token`.
    pub fn fired(&self, token: usize) -> Vec<usize> {
        self.changes[token].iter().map(|&(t, _)| t as usize).collect()
    }
}

impl Labels for SentenceHistory {
    fn label_at(&self, token: usize, time: Option<usize>) -> TagId {
        let changes = &self.changes[token];
        let last = match time {
            None => changes.last(),
            Some(t) => changes.iter().take_while(|&&(c, _)| (c as usize) < t).last(),
        };
        last.map_or(self.initial[token], |&(_, tag)| tag)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CompiledAtom {
    pub offset: i8,
    pub field: Field,
    pub value: Sym,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CompiledPredicate {
    pub atoms: SmallVec<[CompiledAtom; 3]>,
}

impl CompiledPredicate {
    pub fn compile(predicate: &Predicate, symbols: &Symbols, tags: &TagInventory) -> Self {
        let atoms = predicate
            .atoms()
            .iter()
            .map(|a| {
                let value = match a.feature.field {
                    Field::Chunk if a.value == CHUNK_BOUNDARY => BOUNDARY_TAG,
                    Field::Chunk => a
                        .value
                        .parse()
                        .ok()
                        .and_then(|t| tags.id(&t))
                        .map_or(NO_MATCH, |id| id.0 as Sym),
                    f => match symbols.lookup(f, &a.value) {
                        UNSEEN => NO_MATCH,
                        s => s,
                    },
                };
                CompiledAtom { offset: a.feature.offset, field: a.feature.field, value }
            })
            .collect();
        CompiledPredicate { atoms }
    }

    /// `hyp` is the target token's own label; neighbours come from `labels`.
    #[inline]
    pub fn matches<L: Labels + ?Sized>(
        &self,
        sentence: &EncodedSentence,
        token: usize,
        hyp: TagId,
        labels: &L,
        time: Option<usize>,
    ) -> bool {
        self.atoms.iter().all(|a| value_at(sentence, token, a.offset, a.field, hyp, labels, time) == a.value)
    }
}

#[inline]
pub fn value_at<L: Labels + ?Sized>(
    sentence: &EncodedSentence,
    token: usize,
    offset: i8,
    field: Field,
    hyp: TagId,
    labels: &L,
    time: Option<usize>,
) -> Sym {
    let j = token as isize + offset as isize;
    if j < 0 || j >= sentence.len() as isize {
        return if field == Field::Chunk { BOUNDARY_TAG } else { BOUNDARY };
    }
    let j = j as usize;
    match field {
        Field::Word => sentence.words[j],
        Field::Pos => sentence.pos[j],
        Field::Chunk if offset == 0 => hyp.0 as Sym,
        Field::Chunk => labels.label_at(j, time).0 as Sym,
    }
}

#[derive(Clone, Debug)]
pub struct CompiledRule {
    pub predicate: CompiledPredicate,
    pub source: TagId,
    pub target: TagId,
}

impl CompiledRule {
    pub fn compile(rule: &Rule, symbols: &Symbols, tags: &TagInventory) -> Result<Self> {
        Ok(CompiledRule {
            predicate: CompiledPredicate::compile(&rule.predicate, symbols, tags),
            source: tags.require(&rule.source)?,
            target: tags.require(&rule.target)?,
        })
    }
}

/// Replays a rule list over one sentence with snapshot semantics, recording
/// every label change.
pub fn replay_sentence(rules: &[CompiledRule], sentence: &EncodedSentence, initial: Vec<TagId>) -> SentenceHistory {
    let n = sentence.len();
    let mut labels = initial.clone();
    let mut changes = vec![SmallVec::new(); n];
    let mut matched = Vec::new();
    for (t, rule) in rules.iter().enumerate() {
        matched.clear();
        for i in 0..n {
            if labels[i] == rule.source && rule.predicate.matches(sentence, i, labels[i], &labels, None) {
                matched.push(i);
            }
        }
        for &i in &matched {
            labels[i] = rule.target;
            changes[i].push((t as u32, rule.target));
        }
    }
    SentenceHistory { initial, changes }
}

pub fn replay_corpus(
    rules: &[CompiledRule],
    sentences: &[EncodedSentence],
    initial: Vec<Vec<TagId>>,
) -> Vec<SentenceHistory> {
    sentences
        .par_iter()
        .zip(initial.into_par_iter())
        .map(|(s, init)| replay_sentence(rules, s, init))
        .collect()
}
