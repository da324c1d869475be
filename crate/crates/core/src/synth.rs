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

//! Seeded generator of CoNLL-style chunked sentences.
//!
//! The grammar is small but keeps the ambiguities that make chunking
//! non-trivial: nouns that start or continue a noun phrase, adjectives
//! inside noun phrases or alone after a copula, prepositions that open a
//! clause, particles, possessives, coordination and adverbs inside verb
//! groups. Open-class words follow a Zipf distribution over generated
//! vocabularies, and a small share of POS tags is swapped for a
//! confusable one, as a tagger would.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::Corpus;

const SYLLABLES: [&str; 24] = [
    "ba", "ko", "ri", "ta", "mel", "dor", "sin", "ful", "ver", "lan", "pro", "cat", "mi", "ne", "sta", "gor", "pel",
    "tur", "ven", "xa", "lo", "qui", "bre", "dun",
];

struct Vocabulary {
    words: Vec<String>,
    weights: WeightedIndex<f64>,
}

impl Vocabulary {
    fn new(rng: &mut ChaCha8Rng, size: usize, suffix: &str, capitalize: bool) -> Self {
        let mut seen = std::collections::HashSet::new();
        let mut words = Vec::with_capacity(size);
        while words.len() < size {
            let n = rng.gen_range(2..=3);
            let mut w: String = (0..n).map(|_| SYLLABLES[rng.gen_range(0..SYLLABLES.len())]).collect();
            w.push_str(suffix);
            if capitalize {
                w[..1].make_ascii_uppercase();
            }
            if seen.insert(w.clone()) {
                words.push(w);
            }
        }
        let weights = WeightedIndex::new((0..size).map(|r| 1.0 / (r as f64 + 1.0).powf(1.05))).expect("weights");
        Vocabulary { words, weights }
    }

    /// Zipf draw; most draws are rotated by the document's topic so that
    /// documents favour different words.
    fn pick(&self, rng: &mut ChaCha8Rng, topic: usize) -> &str {
        let rank = self.weights.sample(rng);
        let shift = if rng.gen_bool(0.7) { topic } else { 0 };
        &self.words[(rank + shift) % self.words.len()]
    }
}

struct Lexicon {
    nouns: Vocabulary,
    verbs: Vocabulary,
    adjectives: Vocabulary,
    adverbs: Vocabulary,
    names: Vocabulary,
}

/// Deterministic corpus source: the same seed gives the same sentences.
/// Sentences come in documents of 10 to 40 that share a topic (a shifted
/// word distribution) and construction preferences.
pub struct SyntheticCorpus {
    seed: u64,
    noise: f64,
    label_noise: f64,
    lexicon: Lexicon,
}

const DETERMINERS: [&str; 11] = ["the", "a", "an", "this", "that", "these", "some", "any", "every", "no", "all"];
const POSSESSIVES: [&str; 7] = ["his", "her", "its", "their", "our", "my", "your"];
const PRONOUNS: [&str; 8] = ["he", "she", "it", "they", "we", "I", "you", "one"];
const OBJECT_PRONOUNS: [&str; 5] = ["them", "him", "us", "it", "her"];
const MODALS: [&str; 8] = ["will", "would", "could", "can", "may", "should", "might", "must"];
const PREPOSITIONS: [(&str, f64); 14] = [
    ("of", 10.0),
    ("in", 8.0),
    ("for", 5.0),
    ("on", 4.0),
    ("with", 4.0),
    ("at", 3.0),
    ("by", 3.0),
    ("from", 3.0),
    ("about", 2.0),
    ("into", 1.5),
    ("over", 1.0),
    ("after", 1.0),
    ("before", 1.0),
    ("under", 0.5),
];
const COMPLEMENTIZERS: [&str; 8] = ["that", "because", "although", "while", "if", "since", "after", "before"];
const PARTICLES: [&str; 5] = ["up", "out", "down", "off", "back"];
const SENTENCE_ADVERBS: [&str; 7] = ["however", "meanwhile", "still", "now", "also", "already", "then"];
const DEGREE_ADVERBS: [&str; 4] = ["very", "more", "most", "too"];
const COPULAS: [(&str, &str); 5] = [("is", "VBZ"), ("was", "VBD"), ("are", "VBP"), ("were", "VBD"), ("be", "VB")];

type Triple = (String, &'static str, &'static str);

/// Construction preferences of one document.
#[derive(Clone, Copy)]
enum Style {
    NounPhrase,
    VerbGroup,
    Attachment,
    Clause,
}

struct Builder<'a> {
    rng: ChaCha8Rng,
    lex: &'a Lexicon,
    out: Vec<Triple>,
    topic: usize,
    style: [f64; 4],
    /// Share of formulaic sentences in the current document.
    formulaic: f64,
}

impl Builder<'_> {
    fn p(&mut self, prob: f64) -> bool {
        self.rng.gen_bool(prob)
    }

    /// Like [`Builder::p`], scaled by the document's preference.
    fn ps(&mut self, prob: f64, style: Style) -> bool {
        let p = (prob * self.style[style as usize]).min(0.9);
        self.rng.gen_bool(p)
    }

    fn new_document(&mut self) {
        self.topic = self.rng.gen_range(0..10_000);
        for s in &mut self.style {
            *s = 2f64.powf(self.rng.gen_range(-1.5..1.0));
        }
        self.formulaic = self.rng.gen_range(0.0..0.5);
    }

    fn pick(&mut self, v: fn(&Lexicon) -> &Vocabulary) -> String {
        v(self.lex).pick(&mut self.rng, self.topic).to_string()
    }

    fn one<'b>(&mut self, xs: &[&'b str]) -> &'b str {
        xs[self.rng.gen_range(0..xs.len())]
    }

    fn push(&mut self, word: impl Into<String>, pos: &'static str, tag: &'static str) {
        self.out.push((word.into(), pos, tag));
    }

    fn noun(&mut self) -> String {
        self.pick(|l| &l.nouns)
    }

    fn verb(&mut self) -> String {
        self.pick(|l| &l.verbs)
    }

    /// Pushes a noun phrase, optionally followed by a possessive one.
    fn np(&mut self) {
        self.np_with(true)
    }

    fn np_with(&mut self, allow_possessive: bool) {
        let start = self.out.len();
        let r: f64 = self.rng.gen();
        if r < 0.12 {
            let w = self.one(&PRONOUNS);
            self.push(w, "PRP", "I-NP");
        } else if r < 0.22 {
            for _ in 0..self.rng.gen_range(1..=3) {
                let w = self.pick(|l| &l.names);
                self.push(w, "NNP", "I-NP");
            }
        } else if r < 0.28 {
            if self.p(0.4) {
                self.push("$", "$", "I-NP");
                let n = self.rng.gen_range(1..1000).to_string();
                self.push(n, "CD", "I-NP");
                let w = if self.p(0.5) { "million" } else { "billion" };
                self.push(w, "CD", "I-NP");
            } else {
                let n = self.rng.gen_range(2..500).to_string();
                self.push(n, "CD", "I-NP");
                let w = self.noun() + "s";
                self.push(w, "NNS", "I-NP");
            }
        } else {
            let d: f64 = self.rng.gen();
            if d < 0.6 {
                let w = self.one(&DETERMINERS);
                self.push(w, "DT", "I-NP");
            } else if d < 0.7 {
                let w = self.one(&POSSESSIVES);
                self.push(w, "PRP$", "I-NP");
            }
            let adjectives = [0, 0, 0, 1, 1, 2][self.rng.gen_range(0..6)];
            for _ in 0..adjectives {
                if self.ps(0.1, Style::NounPhrase) {
                    let w = self.one(&DEGREE_ADVERBS);
                    self.push(w, "RB", "I-NP");
                }
                let w = self.pick(|l| &l.adjectives);
                self.push(w, "JJ", "I-NP");
            }
            if self.ps(0.05, Style::NounPhrase) {
                let w = self.verb() + "ing";
                self.push(w, "VBG", "I-NP");
            }
            let nouns = [1, 1, 1, 1, 2, 2, 3][self.rng.gen_range(0..7)];
            for k in 0..nouns {
                let plural = k + 1 == nouns && self.p(0.3);
                let w = self.noun();
                if plural {
                    self.push(w + "s", "NNS", "I-NP");
                } else {
                    self.push(w, "NN", "I-NP");
                }
            }
            if self.ps(0.04, Style::NounPhrase) {
                self.push("and", "CC", "I-NP");
                let w = self.noun() + "s";
                self.push(w, "NNS", "I-NP");
            }
        }
        self.out[start].2 = "B-NP";
        if allow_possessive && self.ps(0.05, Style::NounPhrase) {
            self.push("'s", "POS", "B-NP");
            let w = self.noun();
            self.push(w, "NN", "I-NP");
        }
    }

    fn pp(&mut self) {
        let i = WeightedIndex::new(PREPOSITIONS.iter().map(|p| p.1)).expect("weights").sample(&mut self.rng);
        self.push(PREPOSITIONS[i].0, "IN", "B-PP");
        if self.p(0.05) {
            let w = self.one(&OBJECT_PRONOUNS);
            self.push(w, "PRP", "B-NP");
        } else {
            self.np();
        }
    }

    fn adjp(&mut self) {
        if self.p(0.3) {
            let w = self.one(&DEGREE_ADVERBS);
            self.push(w, "RB", "B-ADJP");
            let w = self.pick(|l| &l.adjectives);
            self.push(w, "JJ", "I-ADJP");
        } else {
            let w = self.pick(|l| &l.adjectives);
            self.push(w, "JJ", "B-ADJP");
        }
        if self.ps(0.15, Style::Attachment) {
            self.pp();
        }
    }

    fn advp(&mut self) {
        if self.p(0.5) {
            let w = self.pick(|l| &l.adverbs);
            self.push(w, "RB", "B-ADVP");
        } else {
            let w = self.one(&SENTENCE_ADVERBS);
            self.push(w, "RB", "B-ADVP");
        }
    }

    /// A verb group; returns whether it ended in a copula.
    fn vp(&mut self) -> bool {
        let r: f64 = self.rng.gen();
        let stem = self.verb();
        let mut copula = false;
        if r < 0.40 {
            let (w, pos) = match self.rng.gen_range(0..3) {
                0 => (stem.clone() + "ed", "VBD"),
                1 => (stem.clone() + "s", "VBZ"),
                _ => (stem.clone(), "VBP"),
            };
            self.push(w, pos, "B-VP");
        } else if r < 0.55 {
            let m = self.one(&MODALS);
            self.push(m, "MD", "B-VP");
            if self.ps(0.25, Style::VerbGroup) {
                let w = if self.p(0.5) { "not".to_string() } else { self.pick(|l| &l.adverbs) };
                self.push(w, "RB", "I-VP");
            }
            if self.ps(0.2, Style::VerbGroup) {
                self.push("be", "VB", "I-VP");
                copula = true;
            } else {
                self.push(stem.clone(), "VB", "I-VP");
            }
        } else if r < 0.67 {
            let (w, pos) = [("has", "VBZ"), ("have", "VBP"), ("had", "VBD")][self.rng.gen_range(0..3)];
            self.push(w, pos, "B-VP");
            if self.ps(0.15, Style::VerbGroup) {
                self.push("been", "VBN", "I-VP");
            }
            self.push(stem.clone() + "ed", "VBN", "I-VP");
        } else if r < 0.75 {
            let (w, pos) = COPULAS[self.rng.gen_range(0..4)];
            self.push(w, pos, "B-VP");
            self.push(stem.clone() + "ing", "VBG", "I-VP");
        } else if r < 0.83 {
            let (w, pos) = COPULAS[self.rng.gen_range(0..4)];
            self.push(w, pos, "B-VP");
            self.push(stem.clone() + "ed", "VBN", "I-VP");
        } else {
            let (w, pos) = COPULAS[self.rng.gen_range(0..4)];
            self.push(w, pos, "B-VP");
            if self.ps(0.15, Style::VerbGroup) {
                self.push("not", "RB", "I-VP");
            }
            copula = true;
        }
        if !copula && self.ps(0.1, Style::VerbGroup) {
            self.push("to", "TO", "I-VP");
            let w = self.verb();
            self.push(w, "VB", "I-VP");
        }
        copula
    }

    fn complement(&mut self, copula: bool, depth: usize) {
        if copula {
            match self.rng.gen_range(0..10) {
                0..=5 => self.adjp(),
                6..=8 => self.np(),
                _ => self.pp(),
            }
            return;
        }
        let r: f64 = self.rng.gen();
        if r < 0.45 {
            self.np();
        } else if r < 0.55 {
            let w = self.one(&PARTICLES);
            self.push(w, "RP", "B-PRT");
            self.np();
        } else if r < 0.62 {
            self.np();
            self.np();
        } else if r < 0.72 && depth < 2 {
            let w = self.one(&COMPLEMENTIZERS);
            self.push(w, "IN", "B-SBAR");
            self.clause(depth + 1);
        } else if r < 0.82 {
            self.pp();
        } else if r < 0.88 {
            self.advp();
        } else if r < 0.93 {
            self.push("to", "TO", "B-PP");
            self.np();
        }
        while self.ps(0.3, Style::Attachment) {
            self.pp();
        }
        if self.ps(0.08, Style::Attachment) {
            self.advp();
        }
    }

    fn subject(&mut self) {
        self.np();
        if self.ps(0.06, Style::Clause) {
            self.push(",", ",", "O");
            let (w, pos) = if self.p(0.5) { ("which", "WDT") } else { ("who", "WP") };
            self.push(w, pos, "B-NP");
            let copula = self.vp();
            self.complement(copula, 2);
            self.push(",", ",", "O");
        } else if self.ps(0.1, Style::Attachment) {
            self.pp();
        }
    }

    fn clause(&mut self, depth: usize) {
        self.subject();
        if self.ps(0.08, Style::Clause) {
            self.advp();
        }
        let copula = self.vp();
        self.complement(copula, depth);
    }

    /// Short stock sentences of the kind newswire repeats: attributions,
    /// price moves, refusals to comment.
    fn formula(&mut self) {
        match self.rng.gen_range(0..4) {
            0 => {
                self.np();
                self.push("said", "VBD", "B-VP");
            }
            1 => {
                let w = self.pick(|l| &l.names);
                self.push(w, "NNP", "B-NP");
                let w = self.noun() + "s";
                self.push(w, "NNS", "I-NP");
                let (w, pos) = [("rose", "VBD"), ("fell", "VBD"), ("closed", "VBD")][self.rng.gen_range(0..3)];
                self.push(w, pos, "B-VP");
                let n = self.rng.gen_range(1..90).to_string();
                self.push(n, "CD", "B-NP");
                self.push("%", "NN", "I-NP");
            }
            2 => {
                self.push("the", "DT", "B-NP");
                let w = self.noun();
                self.push(w, "NN", "I-NP");
                self.push("declined", "VBD", "B-VP");
                self.push("to", "TO", "I-VP");
                self.push("comment", "VB", "I-VP");
            }
            _ => {
                let w = self.pick(|l| &l.names);
                self.push(w, "NNP", "B-NP");
                self.push("is", "VBZ", "B-VP");
                let w = self.noun();
                self.push(w, "NN", "B-NP");
                self.push("of", "IN", "B-PP");
                let w = self.pick(|l| &l.names);
                self.push(w, "NNP", "B-NP");
            }
        }
        self.push(".", ".", "O");
    }

    fn sentence(&mut self) {
        if self.rng.gen_bool(self.formulaic) {
            self.formula();
            return;
        }
        if self.ps(0.12, Style::Clause) {
            self.advp();
            self.push(",", ",", "O");
        } else if self.ps(0.08, Style::Clause) {
            self.pp();
            self.push(",", ",", "O");
        }
        self.clause(0);
        if self.ps(0.2, Style::Clause) {
            if self.p(0.6) {
                self.push(",", ",", "O");
            }
            let w = self.one(&["and", "but", "or"]);
            self.push(w, "CC", "O");
            self.clause(1);
        } else if self.ps(0.03, Style::Clause) {
            self.push("as", "RB", "B-CONJP");
            self.push("well", "RB", "I-CONJP");
            self.push("as", "IN", "I-CONJP");
            self.np();
        }
        let w = if self.p(0.95) { "." } else { "?" };
        self.push(w, ".", "O");
    }
}

fn confusable(pos: &'static str) -> Option<&'static [&'static str]> {
    Some(match pos {
        "NN" => &["JJ", "VB", "NNP"],
        "NNS" => &["VBZ"],
        "JJ" => &["NN", "RB", "VBN"],
        "VBD" => &["VBN"],
        "VBN" => &["VBD", "JJ"],
        "VBG" => &["NN", "JJ"],
        "VBP" => &["VB", "NN"],
        "VBZ" => &["NNS"],
        "RB" => &["IN", "JJ"],
        "RP" => &["IN", "RB"],
        "IN" => &["RB", "RP"],
        "NNP" => &["NN"],
        _ => return None,
    })
}

impl SyntheticCorpus {
    /// The vocabulary is fixed; `seed` only drives sentence generation.
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(0x7462_6c64_7400_0001);
        let lexicon = Lexicon {
            nouns: Vocabulary::new(&mut rng, 3000, "", false),
            verbs: Vocabulary::new(&mut rng, 800, "ate", false),
            adjectives: Vocabulary::new(&mut rng, 800, "ous", false),
            adverbs: Vocabulary::new(&mut rng, 200, "ly", false),
            names: Vocabulary::new(&mut rng, 600, "", true),
        };
        SyntheticCorpus { seed, noise: 0.04, label_noise: 0.005, lexicon }
    }

    /// Share of tokens whose POS tag is replaced by a confusable one.
    pub fn with_noise(mut self, noise: f64) -> Self {
        self.noise = noise;
        self
    }

    /// Share of noun-phrase boundaries that are moved, merging two adjacent
    /// noun phrases or splitting one, as inconsistent annotation would.
    pub fn with_label_noise(mut self, noise: f64) -> Self {
        self.label_noise = noise;
        self
    }

    /// `n` sentences in three-column format.
    pub fn generate_text(&self, n: usize) -> String {
        let mut b = Builder {
            rng: ChaCha8Rng::seed_from_u64(self.seed),
            lex: &self.lexicon,
            out: Vec::new(),
            topic: 0,
            style: [1.0; 4],
            formulaic: 0.0,
        };
        let mut text = String::new();
        let mut left_in_document = 0;
        for _ in 0..n {
            if left_in_document == 0 {
                b.new_document();
                left_in_document = b.rng.gen_range(10..40);
            }
            left_in_document -= 1;
            b.out.clear();
            b.sentence();
            let mut sentence = std::mem::take(&mut b.out);
            for i in 1..sentence.len() {
                let prev_np = matches!(sentence[i - 1].2, "B-NP" | "I-NP");
                let flip = match sentence[i].2 {
                    "I-NP" => Some("B-NP"),
                    "B-NP" if prev_np => Some("I-NP"),
                    _ => None,
                };
                if let Some(tag) = flip {
                    if b.rng.gen_bool(self.label_noise) {
                        sentence[i].2 = tag;
                    }
                }
            }
            for (word, pos, tag) in sentence {
                let mut pos = pos;
                if let Some(alts) = confusable(pos) {
                    if b.rng.gen_bool(self.noise) {
                        pos = alts[b.rng.gen_range(0..alts.len())];
                    }
                }
                text.push_str(&word);
                text.push(' ');
                text.push_str(pos);
                text.push(' ');
                text.push_str(tag);
                text.push('\n');
            }
            text.push('\n');
        }
        text
    }

    pub fn generate(&self, n: usize) -> Corpus {
        Corpus::parse(&self.generate_text(n)).expect("generated text is well formed")
    }
}
