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

//! CoNLL-2000 column corpora and BIO chunk extraction.
//!
//! A corpus file holds one token per line (`word pos chunk`, extra columns
//! ignored) with blank lines between sentences. Chunk tags are interned into
//! a [`TagInventory`] so that class distributions have a fixed index space.

use std::fmt;
use std::io::Read;
use std::str::FromStr;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChunkKind {
    B,
    I,
    O,
}

/// A BIO chunk tag such as `B-NP`, `I-VP` or `O`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChunkTag {
    kind: ChunkKind,
    phrase: Option<String>,
}

impl ChunkTag {
    pub fn begin(phrase: impl Into<String>) -> Self {
        ChunkTag { kind: ChunkKind::B, phrase: Some(phrase.into()) }
    }

    pub fn inside(phrase: impl Into<String>) -> Self {
        ChunkTag { kind: ChunkKind::I, phrase: Some(phrase.into()) }
    }

    pub fn outside() -> Self {
        ChunkTag { kind: ChunkKind::O, phrase: None }
    }

    pub fn kind(&self) -> ChunkKind {
        self.kind
    }

    /// Phrase type (`NP`, `VP`, ...); `None` exactly for `O`.
    pub fn phrase_type(&self) -> Option<&str> {
        self.phrase.as_deref()
    }

    pub fn is_outside(&self) -> bool {
        self.kind == ChunkKind::O
    }
}

impl fmt::Display for ChunkTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.kind, &self.phrase) {
            (ChunkKind::O, _) => f.write_str("O"),
            (ChunkKind::B, Some(p)) => write!(f, "B-{p}"),
            (ChunkKind::I, Some(p)) => write!(f, "I-{p}"),
            _ => unreachable!("B/I tags always carry a phrase type"),
        }
    }
}

impl FromStr for ChunkTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "O" {
            return Ok(ChunkTag::outside());
        }
        let (kind, rest) = match s.split_once('-') {
            Some(("B", rest)) => (ChunkKind::B, rest),
            Some(("I", rest)) => (ChunkKind::I, rest),
            _ => return Err(format!("malformed chunk tag `{s}` (expected B-X, I-X or O)")),
        };
        if rest.is_empty() || rest.chars().any(char::is_whitespace) {
            return Err(format!("malformed chunk tag `{s}` (empty phrase type)"));
        }
        Ok(ChunkTag { kind, phrase: Some(rest.to_string()) })
    }
}

impl Serialize for ChunkTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ChunkTag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Index of a tag inside a [`TagInventory`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TagId(pub u16);

impl TagId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Ordered set of chunk tags; the order defines distribution indices and
/// every tie-break that falls back on "inventory order".
#[derive(Clone, Debug, Default)]
pub struct TagInventory {
    tags: IndexSet<ChunkTag>,
}

// IndexSet equality ignores order; inventories must not.
impl PartialEq for TagInventory {
    fn eq(&self, other: &Self) -> bool {
        self.tags.iter().eq(other.tags.iter())
    }
}

impl Eq for TagInventory {}

impl TagInventory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_tags<I: IntoIterator<Item = ChunkTag>>(tags: I) -> Self {
        TagInventory { tags: tags.into_iter().collect() }
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn id(&self, tag: &ChunkTag) -> Option<TagId> {
        self.tags.get_index_of(tag).map(|i| TagId(i as u16))
    }

    pub fn require(&self, tag: &ChunkTag) -> Result<TagId> {
        self.id(tag).ok_or_else(|| Error::UnknownTag(tag.to_string()))
    }

    /// Panics if `id` was not issued by this inventory.
    pub fn tag(&self, id: TagId) -> &ChunkTag {
        &self.tags[id.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &ChunkTag> + '_ {
        self.tags.iter()
    }

    pub fn ids(&self) -> impl Iterator<Item = TagId> {
        (0..self.tags.len()).map(|i| TagId(i as u16))
    }

    pub(crate) fn insert(&mut self, tag: ChunkTag) -> TagId {
        let (i, _) = self.tags.insert_full(tag);
        assert!(i < u16::MAX as usize, "tag inventory overflow");
        TagId(i as u16)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub word: String,
    pub pos: String,
    /// Gold chunk tag, indexed into the owning corpus's inventory.
    pub chunk: TagId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Corpus {
    sentences: Vec<Sentence>,
    tags: TagInventory,
    pos_tags: IndexSet<String>,
}

impl Corpus {
    /// Parses column text, building the tag inventory in first-occurrence order.
    pub fn parse(text: &str) -> Result<Corpus> {
        Self::parse_inner(text, None)
    }

    /// Parses column text against a frozen inventory; unknown tags are errors.
    pub fn parse_with_inventory(text: &str, tags: &TagInventory) -> Result<Corpus> {
        Self::parse_inner(text, Some(tags))
    }

    pub fn from_reader<R: Read>(mut reader: R) -> Result<Corpus> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        Self::parse(&text)
    }

    fn parse_inner(text: &str, frozen: Option<&TagInventory>) -> Result<Corpus> {
        let mut tags = frozen.cloned().unwrap_or_default();
        let mut pos_tags = IndexSet::new();
        let mut sentences = Vec::new();
        let mut current = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let mut cols = line.split_ascii_whitespace();
            let Some(word) = cols.next() else {
                if !current.is_empty() {
                    sentences.push(Sentence { tokens: std::mem::take(&mut current) });
                }
                continue;
            };
            let (Some(pos), Some(chunk)) = (cols.next(), cols.next()) else {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected 3 columns (word POS chunk), got `{line}`"),
                });
            };
            let tag: ChunkTag = chunk
                .parse()
                .map_err(|message| Error::Parse { line: line_no, message })?;
            let chunk = match frozen {
                Some(inv) => inv.id(&tag).ok_or_else(|| Error::Parse {
                    line: line_no,
                    message: format!("chunk tag `{tag}` is not in the frozen tag inventory"),
                })?,
                None => tags.insert(tag),
            };
            pos_tags.insert(pos.to_string());
            current.push(Token { word: word.to_string(), pos: pos.to_string(), chunk });
        }
        if !current.is_empty() {
            sentences.push(Sentence { tokens: current });
        }
        Ok(Corpus { sentences, tags, pos_tags })
    }

    /// Builds a corpus from `(word, pos, tag)` triples per sentence.
    pub fn from_sentences<S, T>(sentences: S) -> Result<Corpus>
    where
        S: IntoIterator<Item = T>,
        T: IntoIterator<Item = (String, String, ChunkTag)>,
    {
        let mut tags = TagInventory::new();
        let mut pos_tags = IndexSet::new();
        let mut out = Vec::new();
        for sentence in sentences {
            let mut tokens = Vec::new();
            for (word, pos, tag) in sentence {
                if word.is_empty() || pos.is_empty() {
                    return Err(Error::InvalidArgument("empty word or POS".into()));
                }
                pos_tags.insert(pos.clone());
                tokens.push(Token { word, pos, chunk: tags.insert(tag) });
            }
            if tokens.is_empty() {
                return Err(Error::InvalidArgument("empty sentence".into()));
            }
            out.push(Sentence { tokens });
        }
        Ok(Corpus { sentences: out, tags, pos_tags })
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn tags(&self) -> &TagInventory {
        &self.tags
    }

    pub fn pos_tags(&self) -> &IndexSet<String> {
        &self.pos_tags
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    pub fn tag(&self, id: TagId) -> &ChunkTag {
        self.tags.tag(id)
    }

    /// Gold tags of one sentence.
    pub fn gold_tags(&self, sentence: usize) -> Vec<ChunkTag> {
        self.sentences[sentence].tokens.iter().map(|t| self.tag(t.chunk).clone()).collect()
    }

    /// Sub-corpus of the given sentences. The tag inventory is kept as is so
    /// that the result stays index-compatible with `self`.
    pub fn select<I: IntoIterator<Item = usize>>(&self, indices: I) -> Corpus {
        let sentences: Vec<Sentence> =
            indices.into_iter().map(|i| self.sentences[i].clone()).collect();
        let pos_tags = sentences
            .iter()
            .flat_map(|s| s.tokens.iter().map(|t| t.pos.clone()))
            .collect();
        Corpus { sentences, tags: self.tags.clone(), pos_tags }
    }

    /// Re-indexes gold tags into `tags`; fails on a tag the inventory lacks.
    pub fn with_inventory(&self, tags: &TagInventory) -> Result<Corpus> {
        if &self.tags == tags {
            return Ok(self.clone());
        }
        let mut map = Vec::with_capacity(self.tags.len());
        for tag in self.tags.iter() {
            map.push(tags.id(tag));
        }
        let mut sentences = self.sentences.clone();
        for token in sentences.iter_mut().flat_map(|s| s.tokens.iter_mut()) {
            token.chunk = map[token.chunk.index()]
                .ok_or_else(|| Error::UnknownTag(self.tags.tag(token.chunk).to_string()))?;
        }
        Ok(Corpus { sentences, tags: tags.clone(), pos_tags: self.pos_tags.clone() })
    }

    /// Serializes back to the three-column format, one blank line after each
    /// sentence.
    pub fn to_conll(&self) -> String {
        let mut out = String::new();
        for sentence in &self.sentences {
            for t in &sentence.tokens {
                out.push_str(&t.word);
                out.push(' ');
                out.push_str(&t.pos);
                out.push(' ');
                out.push_str(&self.tag(t.chunk).to_string());
                out.push('\n');
            }
            out.push('\n');
        }
        out
    }
}

/// A typed phrase spanning tokens `start..end`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Chunk {
    pub phrase_type: String,
    pub start: usize,
    pub end: usize,
}

impl Chunk {
    fn new(phrase_type: &str, start: usize, end: usize) -> Self {
        Chunk { phrase_type: phrase_type.to_string(), start, end }
    }
}

/// Converts a BIO sequence into chunks.
///
/// `I-X` continues an open chunk of type X; after `O`, at sentence start, or
/// after a chunk of another type it opens a new chunk, as the CoNLL
/// evaluation script does.
pub fn extract_chunks<'a, I>(tags: I) -> Vec<Chunk>
where
    I: IntoIterator<Item = &'a ChunkTag>,
{
    let mut chunks = Vec::new();
    let mut open: Option<(&str, usize)> = None;
    let mut n = 0;
    for (i, tag) in tags.into_iter().enumerate() {
        n = i + 1;
        match (tag.kind(), tag.phrase_type()) {
            (ChunkKind::I, Some(p)) if matches!(open, Some((q, _)) if q == p) => {}
            (ChunkKind::B | ChunkKind::I, Some(p)) => {
                if let Some((q, s)) = open.take() {
                    chunks.push(Chunk::new(q, s, i));
                }
                open = Some((p, i));
            }
            _ => {
                if let Some((q, s)) = open.take() {
                    chunks.push(Chunk::new(q, s, i));
                }
            }
        }
    }
    if let Some((q, s)) = open {
        chunks.push(Chunk::new(q, s, n));
    }
    chunks
}
