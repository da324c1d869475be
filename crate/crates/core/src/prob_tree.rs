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

//! Rule lists as probabilistic decision trees.
//!
//! Conversion follows the samples through the rule list one rule at a time.
//! Every sample is a token; its own label is the node hypothesis, which is
//! constant within a node, and its neighbours' labels are read from the
//! whole-sentence replay at the time the rule was applied. A node splits on
//! a rule when both sides are large enough, so every leaf holds one
//! equivalence class of "which rules fired" (modulo pruning).
//!
//! Growth then keeps splitting leaves on single atoms by information gain.

use std::fmt;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::corpus::{ChunkTag, Corpus, TagId, TagInventory};
use crate::error::{Error, Result};
use crate::features::{
    replay_corpus, value_at, CompiledPredicate, CompiledRule, EncodedSentence, Labels, SentenceHistory, Sym, Symbols,
    BOUNDARY,
};
use crate::rules::{most_ambiguous_words, Atom, FeatureRef, Field, Predicate, CHUNK_BOUNDARY};
use crate::trainer::RuleList;

pub const DEFAULT_K: usize = 5;
pub const DEFAULT_EPSILON: f64 = 0.001;

/// Probability vector over a tag inventory, index-aligned with it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassDistribution {
    probs: Vec<f64>,
}

impl ClassDistribution {
    /// Checks non-negativity and that the entries sum to one within 1e-9.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        let sum: f64 = probs.iter().sum();
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("not a probability distribution (sum {sum})")));
        }
        Ok(ClassDistribution { probs })
    }

    pub fn delta(len: usize, tag: TagId) -> Self {
        let mut probs = vec![0.0; len];
        probs[tag.index()] = 1.0;
        ClassDistribution { probs }
    }

    pub fn uniform(len: usize) -> Self {
        ClassDistribution { probs: vec![1.0 / len as f64; len] }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, tag: TagId) -> f64 {
        self.probs[tag.index()]
    }

    /// Most probable tag; ties go to the earlier tag in the inventory.
    pub fn argmax(&self) -> TagId {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = i;
            }
        }
        TagId(best as u16)
    }

    pub fn max_prob(&self) -> f64 {
        self.probs[self.argmax().index()]
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        -self.probs.iter().filter(|&&p| p > 0.0).map(|&p| p * p.log2()).sum::<f64>()
    }
}

/// Rounds to 12 significant digits so that the decimal form written to disk
/// reads back to the same value.
fn round12(x: f64) -> f64 {
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Interpolates the empirical distribution of `counts` with the uniform one:
/// `p(c) = (1 - epsilon) * count(c) / total + epsilon / |inventory|`.
pub fn leaf_distribution(counts: &[usize], epsilon: f64) -> Result<ClassDistribution> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let total: usize = counts.iter().sum();
    if total == 0 || counts.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let floor = epsilon / counts.len() as f64;
    let probs = counts
        .iter()
        .map(|&c| {
            let p = round12((1.0 - epsilon) * c as f64 / total as f64 + floor);
            if p < floor {
                round12(floor * (1.0 + 1e-11))
            } else {
                p
            }
        })
        .collect();
    Ok(ClassDistribution { probs })
}

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq)]
pub struct Question {
    pub predicate: Predicate,
    pub source: TagId,
    /// New hypothesis on a right move; equals `source` for growth questions.
    pub target: TagId,
    /// Index of the rule this question came from; `None` for growth questions.
    pub rule_index: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Internal { question: Question, left: NodeId, right: NodeId },
    Leaf { distribution: ClassDistribution, weight: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbTree {
    tags: TagInventory,
    epsilon: f64,
    roots: Vec<(TagId, NodeId)>,
    nodes: Vec<Node>,
}

/// Parameters of [`grow`].
#[derive(Clone, Debug)]
pub struct GrowConfig {
    pub k: usize,
    pub min_gain: f64,
    /// Restrict word atoms to the most ambiguous training words.
    pub lexicon_limit: Option<usize>,
    /// Stop after this many accepted splits.
    pub max_splits: Option<usize>,
}

impl Default for GrowConfig {
    fn default() -> Self {
        GrowConfig { k: DEFAULT_K, min_gain: 0.0, lexicon_limit: None, max_splits: None }
    }
}

/// Training-set mean `-log2 p(gold)` before growth and after every accepted split.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GrowthTrace {
    pub mean_log_loss: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
struct Sample {
    sentence: u32,
    token: u32,
}

/// Training corpus replayed under a rule list.
struct Replayed {
    symbols: Symbols,
    sentences: Vec<EncodedSentence>,
    rules: Vec<CompiledRule>,
    histories: Vec<SentenceHistory>,
}

impl Replayed {
    fn new(rule_list: &RuleList, corpus: &Corpus) -> Result<Self> {
        rule_list.check_inventory(corpus)?;
        let initial = rule_list.initial.state(corpus, true)?;
        let mut symbols = Symbols::new();
        symbols.intern_corpus(corpus);
        for r in &rule_list.rules {
            symbols.intern_predicate(&r.predicate);
        }
        let rules = rule_list
            .rules
            .iter()
            .map(|r| CompiledRule::compile(r, &symbols, &rule_list.tags))
            .collect::<Result<Vec<_>>>()?;
        let sentences = symbols.encode(corpus);
        let histories = replay_corpus(&rules, &sentences, initial.into_inner());
        Ok(Replayed { symbols, sentences, rules, histories })
    }

    fn samples(&self) -> impl Iterator<Item = Sample> + '_ {
        self.sentences.iter().enumerate().flat_map(|(s, sent)| {
            (0..sent.len()).map(move |i| Sample { sentence: s as u32, token: i as u32 })
        })
    }

    fn gold(&self, x: Sample) -> TagId {
        self.sentences[x.sentence as usize].gold[x.token as usize]
    }

    fn initial(&self, x: Sample) -> TagId {
        self.histories[x.sentence as usize].initial[x.token as usize]
    }

    fn value(&self, x: Sample, f: FeatureRef, hyp: TagId) -> Sym {
        let s = x.sentence as usize;
        value_at(&self.sentences[s], x.token as usize, f.offset, f.field, hyp, &self.histories[s], None)
    }

    fn counts(&self, population: &[Sample], n_tags: usize) -> Vec<usize> {
        let mut counts = vec![0; n_tags];
        for &x in population {
            counts[self.gold(x).index()] += 1;
        }
        counts
    }
}

impl ProbTree {
    pub fn tags(&self) -> &TagInventory {
        &self.tags
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn roots(&self) -> &[(TagId, NodeId)] {
        &self.roots
    }

    pub fn root(&self, label: TagId) -> Option<NodeId> {
        self.roots.iter().find(|(l, _)| *l == label).map(|&(_, n)| n)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    /// Leaves reachable from `node`, left to right.
    pub fn leaves_under(&self, node: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(n) = stack.pop() {
            match &self.nodes[n] {
                Node::Leaf { .. } => out.push(n),
                Node::Internal { left, right, .. } => {
                    stack.push(*right);
                    stack.push(*left);
                }
            }
        }
        out
    }

    fn push(&mut self, node: Node) -> NodeId {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    fn placeholder(&mut self) -> NodeId {
        self.push(Node::Leaf { distribution: ClassDistribution { probs: Vec::new() }, weight: 0 })
    }

    fn leaf(&self, counts: &[usize]) -> Result<Node> {
        Ok(Node::Leaf { distribution: leaf_distribution(counts, self.epsilon)?, weight: counts.iter().sum() })
    }

    /// Walks the tree for one sample. `features` supplies word and POS
    /// values and neighbour chunk labels; a neighbour label is requested at
    /// the time of the rule being tested, or `None` for growth questions.
    /// The sample's own chunk label is the running hypothesis.
    pub fn traverse<F>(&self, initial: TagId, features: F) -> Result<(&ClassDistribution, TagId)>
    where
        F: Fn(FeatureRef, Option<usize>) -> String,
    {
        let mut node = self
            .root(initial)
            .ok_or_else(|| Error::TreeFormat(format!("no root for label {}", self.tags.tag(initial))))?;
        let mut hyp = initial;
        loop {
            match &self.nodes[node] {
                Node::Leaf { distribution, .. } => return Ok((distribution, hyp)),
                Node::Internal { question, left, right } => {
                    let holds = hyp == question.source
                        && question.predicate.atoms().iter().all(|a| {
                            if a.feature.field == Field::Chunk && a.feature.offset == 0 {
                                a.value == self.tags.tag(hyp).to_string()
                            } else {
                                a.value == features(a.feature, question.rule_index)
                            }
                        });
                    if holds {
                        hyp = question.target;
                        node = *right;
                    } else {
                        node = *left;
                    }
                }
            }
        }
    }

    /// Compiles predicates against a symbol table for fast traversal.
    pub fn compile(&self, symbols: &Symbols) -> CompiledTree {
        let nodes = self
            .nodes
            .iter()
            .map(|n| match n {
                Node::Leaf { .. } => CompiledNode::Leaf,
                Node::Internal { question, left, right } => CompiledNode::Internal {
                    predicate: CompiledPredicate::compile(&question.predicate, symbols, &self.tags),
                    source: question.source,
                    target: question.target,
                    time: question.rule_index,
                    left: *left,
                    right: *right,
                },
            })
            .collect();
        let mut roots = vec![None; self.tags.len()];
        for &(label, node) in &self.roots {
            roots[label.index()] = Some(node);
        }
        CompiledTree { nodes, roots }
    }

    pub fn intern_atoms(&self, symbols: &mut Symbols) {
        for n in &self.nodes {
            if let Node::Internal { question, .. } = n {
                symbols.intern_predicate(&question.predicate);
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&TreeFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<ProbTree> {
        let file: TreeFile = serde_json::from_str(text)?;
        file.into_tree()
    }
}

#[derive(Clone, Debug)]
enum CompiledNode {
    Internal {
        predicate: CompiledPredicate,
        source: TagId,
        target: TagId,
        time: Option<usize>,
        left: NodeId,
        right: NodeId,
    },
    Leaf,
}

#[derive(Clone, Debug)]
pub struct CompiledTree {
    nodes: Vec<CompiledNode>,
    roots: Vec<Option<NodeId>>,
}

impl CompiledTree {
    /// Returns the reached leaf and the final hypothesis, or `None` when the
    /// tree has no root for `initial`.
    pub fn traverse<L: Labels + ?Sized>(
        &self,
        sentence: &EncodedSentence,
        token: usize,
        initial: TagId,
        labels: &L,
    ) -> Option<(NodeId, TagId)> {
        let mut node = (*self.roots.get(initial.index())?)?;
        let mut hyp = initial;
        loop {
            match &self.nodes[node] {
                CompiledNode::Leaf => return Some((node, hyp)),
                CompiledNode::Internal { predicate, source, target, time, left, right } => {
                    if hyp == *source && predicate.matches(sentence, token, hyp, labels, *time) {
                        hyp = *target;
                        node = *right;
                    } else {
                        node = *left;
                    }
                }
            }
        }
    }
}

struct Work {
    slot: NodeId,
    population: Vec<Sample>,
    hyp: TagId,
    next: usize,
}

/// Converts a rule list into a tree using `corpus` as the sample population.
/// A rule splits a node only when both sides hold more than `k` samples;
/// a rule that fires on the whole node still updates the hypothesis (the
/// node gets an empty left leaf carrying the node's distribution).
pub fn convert(rule_list: &RuleList, corpus: &Corpus, k: usize, epsilon: f64) -> Result<ProbTree> {
    leaf_distribution(&[1], epsilon)?;
    let ctx = Replayed::new(rule_list, corpus)?;
    let n_tags = rule_list.tags.len();
    let mut tree = ProbTree { tags: rule_list.tags.clone(), epsilon, roots: Vec::new(), nodes: Vec::new() };
    let mut by_label: Vec<Vec<Sample>> = vec![Vec::new(); n_tags];
    for x in ctx.samples() {
        by_label[ctx.initial(x).index()].push(x);
    }
    for (label, population) in by_label.into_iter().enumerate() {
        if population.is_empty() {
            continue;
        }
        let root = tree.placeholder();
        tree.roots.push((TagId(label as u16), root));
        let mut stack = vec![Work { slot: root, population, hyp: TagId(label as u16), next: 0 }];
        while let Some(w) = stack.pop() {
            let mut split = None;
            for j in w.next..ctx.rules.len() {
                let rule = &ctx.rules[j];
                if rule.source != w.hyp {
                    continue;
                }
                let (right, left): (Vec<Sample>, Vec<Sample>) = w.population.iter().partition(|x| {
                    let s = x.sentence as usize;
                    rule.predicate.matches(&ctx.sentences[s], x.token as usize, w.hyp, &ctx.histories[s], Some(j))
                });
                if right.is_empty() {
                    continue;
                }
                if left.is_empty() || (left.len() > k && right.len() > k) {
                    split = Some((j, left, right));
                    break;
                }
            }
            let Some((j, left, right)) = split else {
                tree.nodes[w.slot] = tree.leaf(&ctx.counts(&w.population, n_tags))?;
                continue;
            };
            let rule = &rule_list.rules[j];
            let (l, r) = (tree.placeholder(), tree.placeholder());
            let target = ctx.rules[j].target;
            tree.nodes[w.slot] = Node::Internal {
                question: Question { predicate: rule.predicate.clone(), source: w.hyp, target, rule_index: Some(j) },
                left: l,
                right: r,
            };
            if left.is_empty() {
                let distribution = leaf_distribution(&ctx.counts(&w.population, n_tags), epsilon)?;
                tree.nodes[l] = Node::Leaf { distribution, weight: 0 };
            } else {
                stack.push(Work { slot: l, population: left, hyp: w.hyp, next: j + 1 });
            }
            stack.push(Work { slot: r, population: right, hyp: target, next: j + 1 });
        }
    }
    Ok(tree)
}

fn entropy_of(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    -counts.iter().filter(|&&c| c > 0).map(|&c| (c as f64 / n) * (c as f64 / n).log2()).sum::<f64>()
}

/// Information gain in bits of splitting `parent` into `right` and the rest.
pub fn information_gain(parent: &[usize], right: &[usize]) -> f64 {
    let n: usize = parent.iter().sum();
    let nr: usize = right.iter().sum();
    let left: Vec<usize> = parent.iter().zip(right).map(|(p, r)| p - r).collect();
    let nl = n - nr;
    entropy_of(parent, n) - (nl as f64 / n as f64) * entropy_of(&left, nl) - (nr as f64 / n as f64) * entropy_of(right, nr)
}

/// Sum over samples of `-log2 p(gold)` under the smoothed leaf estimate.
fn log_loss(counts: &[usize], epsilon: f64) -> Result<f64> {
    let d = leaf_distribution(counts, epsilon)?;
    Ok(counts.iter().zip(d.probs()).filter(|(c, _)| **c > 0).map(|(&c, &p)| -(c as f64) * p.log2()).sum())
}

struct SplitChoice {
    atom: FeatureRef,
    value: Sym,
    gain: f64,
}

/// Best single-atom split of `population`, ties broken by the smallest atom text.
fn best_split(
    ctx: &Replayed,
    tags: &TagInventory,
    population: &[Sample],
    hyp: TagId,
    parent: &[usize],
    allowed_words: Option<&FxHashSet<Sym>>,
    k: usize,
) -> Option<SplitChoice> {
    let n_tags = parent.len();
    let mut best: Option<(SplitChoice, String)> = None;
    for f in FeatureRef::all() {
        if f.field == Field::Chunk && f.offset == 0 {
            continue;
        }
        let mut groups: FxHashMap<Sym, Vec<usize>> = FxHashMap::default();
        for &x in population {
            let v = ctx.value(x, f, hyp);
            groups.entry(v).or_insert_with(|| vec![0; n_tags])[ctx.gold(x).index()] += 1;
        }
        for (v, right) in groups {
            if f.field == Field::Word && v != BOUNDARY && allowed_words.is_some_and(|a| !a.contains(&v)) {
                continue;
            }
            let nr: usize = right.iter().sum();
            if nr <= k || population.len() - nr <= k {
                continue;
            }
            let gain = information_gain(parent, &right);
            let better = match &best {
                None => true,
                Some((b, _)) if gain > b.gain => true,
                Some((b, _)) if gain < b.gain => false,
                Some((_, text)) => atom_text(ctx, tags, f, v) < *text,
            };
            if better {
                best = Some((SplitChoice { atom: f, value: v, gain }, atom_text(ctx, tags, f, v)));
            }
        }
    }
    best.map(|(c, _)| c)
}

fn atom_value(ctx: &Replayed, tags: &TagInventory, f: FeatureRef, v: Sym) -> String {
    match f.field {
        Field::Chunk if v == crate::features::BOUNDARY_TAG => CHUNK_BOUNDARY.to_string(),
        Field::Chunk => tags.tag(TagId(v as u16)).to_string(),
        field => ctx.symbols.resolve(field, v).to_string(),
    }
}

fn atom_text(ctx: &Replayed, tags: &TagInventory, f: FeatureRef, v: Sym) -> String {
    Atom::new(f, atom_value(ctx, tags, f, v)).to_string()
}

/// Routes every corpus token to its leaf, using neighbour labels at rule
/// time for rule questions and final labels for growth questions.
fn route(tree: &ProbTree, compiled: &CompiledTree, ctx: &Replayed) -> Result<FxHashMap<NodeId, (TagId, Vec<Sample>)>> {
    let mut out: FxHashMap<NodeId, (TagId, Vec<Sample>)> = FxHashMap::default();
    for x in ctx.samples() {
        let s = x.sentence as usize;
        let (leaf, hyp) = compiled
            .traverse(&ctx.sentences[s], x.token as usize, ctx.initial(x), &ctx.histories[s])
            .ok_or_else(|| Error::TreeFormat(format!("no root for label {}", tree.tags.tag(ctx.initial(x)))))?;
        out.entry(leaf).or_insert_with(|| (hyp, Vec::new())).1.push(x);
    }
    Ok(out)
}

/// Continues splitting the leaves of a converted tree by information gain.
/// A split needs more than `k` samples on each side, positive impurity, a
/// gain above `min_gain`, and must not raise the training log-loss of the
/// smoothed leaves.
pub fn grow(tree: &ProbTree, rule_list: &RuleList, corpus: &Corpus, config: &GrowConfig) -> Result<(ProbTree, GrowthTrace)> {
    if tree.tags != rule_list.tags {
        return Err(Error::Inventory("tree and rule list use different tag inventories".into()));
    }
    let mut ctx = Replayed::new(rule_list, corpus)?;
    tree.intern_atoms(&mut ctx.symbols);
    let compiled = tree.compile(&ctx.symbols);
    let allowed_words: Option<FxHashSet<Sym>> = config.lexicon_limit.map(|n| {
        most_ambiguous_words(corpus, n).iter().map(|w| ctx.symbols.lookup(Field::Word, w)).collect()
    });
    let n_tags = tree.tags.len();
    let mut routed = route(tree, &compiled, &ctx)?;
    let mut out = tree.clone();
    let total_samples = ctx.samples().count().max(1) as f64;
    let mut loss = 0.0;
    let mut leaves: Vec<NodeId> = routed.keys().copied().collect();
    leaves.sort_unstable();
    for &leaf in &leaves {
        loss += log_loss(&ctx.counts(&routed[&leaf].1, n_tags), tree.epsilon)?;
    }
    let mut trace = GrowthTrace { mean_log_loss: vec![loss / total_samples] };
    let mut splits = 0usize;
    for leaf in leaves {
        let (hyp, population) = routed.remove(&leaf).expect("routed leaf");
        let mut stack = vec![(leaf, population)];
        while let Some((slot, population)) = stack.pop() {
            if config.max_splits.is_some_and(|m| splits >= m) {
                break;
            }
            let parent = ctx.counts(&population, n_tags);
            if entropy_of(&parent, population.len()) == 0.0 {
                continue;
            }
            let Some(choice) = best_split(&ctx, &out.tags, &population, hyp, &parent, allowed_words.as_ref(), config.k)
            else {
                continue;
            };
            if choice.gain <= config.min_gain {
                continue;
            }
            let (right, left): (Vec<Sample>, Vec<Sample>) =
                population.iter().partition(|&&x| ctx.value(x, choice.atom, hyp) == choice.value);
            let (lc, rc) = (ctx.counts(&left, n_tags), ctx.counts(&right, n_tags));
            let before = log_loss(&parent, out.epsilon)?;
            let after = log_loss(&lc, out.epsilon)? + log_loss(&rc, out.epsilon)?;
            if after > before {
                continue;
            }
            let atom = Atom::new(choice.atom, atom_value(&ctx, &out.tags, choice.atom, choice.value));
            let (l, r) = (out.placeholder(), out.placeholder());
            out.nodes[l] = out.leaf(&lc)?;
            out.nodes[r] = out.leaf(&rc)?;
            out.nodes[slot] = Node::Internal {
                question: Question {
                    predicate: Predicate::new(vec![atom])?,
                    source: hyp,
                    target: hyp,
                    rule_index: None,
                },
                left: l,
                right: r,
            };
            splits += 1;
            loss += after - before;
            trace.mean_log_loss.push(loss / total_samples);
            stack.push((r, right));
            stack.push((l, left));
        }
        if config.max_splits.is_some_and(|m| splits >= m) {
            break;
        }
    }
    Ok((out, trace))
}

/// Agreement between tree traversal and rule-list replay on one corpus.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub tokens: usize,
    pub agree: usize,
    /// `(sentence, token)` of the first few disagreements.
    pub mismatches: Vec<(usize, usize)>,
}

impl EquivalenceReport {
    pub fn holds(&self) -> bool {
        self.tokens == self.agree
    }
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} tokens agree", self.agree, self.tokens)
    }
}

/// Traverses every token of `corpus` with neighbour labels taken from the
/// rule-list replay and compares the final hypothesis with the replay label.
pub fn check_equivalence(tree: &ProbTree, rule_list: &RuleList, corpus: &Corpus) -> Result<EquivalenceReport> {
    let mut ctx = Replayed::new(rule_list, corpus)?;
    tree.intern_atoms(&mut ctx.symbols);
    let compiled = tree.compile(&ctx.symbols);
    let mut report = EquivalenceReport::default();
    for x in ctx.samples() {
        let (s, i) = (x.sentence as usize, x.token as usize);
        let history = &ctx.histories[s];
        let hyp = compiled.traverse(&ctx.sentences[s], i, ctx.initial(x), history).map(|(_, h)| h);
        report.tokens += 1;
        if hyp == Some(history.label_at(i, None)) {
            report.agree += 1;
        } else if report.mismatches.len() < 20 {
            report.mismatches.push((s, i));
        }
    }
    Ok(report)
}

#[derive(Serialize, Deserialize)]
struct TreeFile {
    tags: Vec<ChunkTag>,
    epsilon: f64,
    roots: Vec<RootRecord>,
    nodes: Vec<NodeRecord>,
}

#[derive(Serialize, Deserialize)]
struct RootRecord {
    label: ChunkTag,
    node: NodeId,
}

#[derive(Serialize, Deserialize)]
struct QuestionRecord {
    atoms: Vec<String>,
    source: ChunkTag,
    target: ChunkTag,
    rule_index: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum NodeRecord {
    Internal { id: NodeId, question: QuestionRecord, left: NodeId, right: NodeId },
    Leaf { id: NodeId, probs: Vec<f64>, weight: usize },
}

impl From<&ProbTree> for TreeFile {
    fn from(t: &ProbTree) -> Self {
        let tag = |id: TagId| t.tags.tag(id).clone();
        TreeFile {
            tags: t.tags.iter().cloned().collect(),
            epsilon: t.epsilon,
            roots: t.roots.iter().map(|&(label, node)| RootRecord { label: tag(label), node }).collect(),
            nodes: t
                .nodes
                .iter()
                .enumerate()
                .map(|(id, n)| match n {
                    Node::Leaf { distribution, weight } => {
                        NodeRecord::Leaf { id, probs: distribution.probs.clone(), weight: *weight }
                    }
                    Node::Internal { question, left, right } => NodeRecord::Internal {
                        id,
                        question: QuestionRecord {
                            atoms: question.predicate.atoms().iter().map(|a| a.to_string()).collect(),
                            source: tag(question.source),
                            target: tag(question.target),
                            rule_index: question.rule_index,
                        },
                        left: *left,
                        right: *right,
                    },
                })
                .collect(),
        }
    }
}

impl TreeFile {
    fn into_tree(self) -> Result<ProbTree> {
        let tags = TagInventory::from_tags(self.tags);
        let n = self.nodes.len();
        let id_of = |t: &ChunkTag| tags.id(t).ok_or_else(|| Error::TreeFormat(format!("tag {t} not in inventory")));
        let check = |id: NodeId| {
            if id < n {
                Ok(id)
            } else {
                Err(Error::TreeFormat(format!("node {id} out of range")))
            }
        };
        let mut nodes = Vec::with_capacity(n);
        for (pos, record) in self.nodes.into_iter().enumerate() {
            let node = match record {
                NodeRecord::Leaf { id, probs, weight } => {
                    if id != pos {
                        return Err(Error::TreeFormat(format!("node {id} listed at position {pos}")));
                    }
                    if probs.len() != tags.len() {
                        return Err(Error::TreeFormat(format!("leaf {id} has {} probabilities", probs.len())));
                    }
                    Node::Leaf { distribution: ClassDistribution::new(probs)?, weight }
                }
                NodeRecord::Internal { id, question, left, right } => {
                    if id != pos || left <= id || right <= id {
                        return Err(Error::TreeFormat(format!("node {id} is out of order")));
                    }
                    let atoms = question
                        .atoms
                        .iter()
                        .map(|a| a.parse::<Atom>())
                        .collect::<Result<Vec<_>>>()?;
                    Node::Internal {
                        question: Question {
                            predicate: Predicate::new(atoms)?,
                            source: id_of(&question.source)?,
                            target: id_of(&question.target)?,
                            rule_index: question.rule_index,
                        },
                        left: check(left)?,
                        right: check(right)?,
                    }
                }
            };
            nodes.push(node);
        }
        let roots = self
            .roots
            .iter()
            .map(|r| Ok((id_of(&r.label)?, check(r.node)?)))
            .collect::<Result<Vec<_>>>()?;
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::TreeFormat(format!("epsilon {} outside (0, 1)", self.epsilon)));
        }
        Ok(ProbTree { tags, epsilon: self.epsilon, roots, nodes })
    }
}
