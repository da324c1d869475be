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

//! Accuracy, chunk precision/recall/F, cross entropy and rejection curves.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::corpus::{extract_chunks, ChunkTag, TagId};
use crate::error::{Error, Result};
use crate::prob_tree::ClassDistribution;

/// Fraction of positions where `pred` equals `gold`; 0 for empty input.
pub fn token_accuracy<T: PartialEq>(pred: &[T], gold: &[T]) -> Result<f64> {
    if pred.len() != gold.len() {
        return Err(Error::LengthMismatch { predicted: pred.len(), gold: gold.len() });
    }
    if gold.is_empty() {
        return Ok(0.0);
    }
    Ok(pred.iter().zip(gold).filter(|(p, g)| p == g).count() as f64 / gold.len() as f64)
}

/// `(beta^2 + 1) P R / (beta^2 P + R)`, 0 when the denominator is 0.
pub fn f_beta(precision: f64, recall: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let denom = b2 * precision + recall;
    if denom == 0.0 {
        0.0
    } else {
        (b2 + 1.0) * precision * recall / denom
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ChunkScore {
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
    pub correct: usize,
    pub proposed: usize,
    pub gold: usize,
    /// No chunks proposed; precision reported as 0.
    pub precision_undefined: bool,
    /// No gold chunks; recall reported as 0.
    pub recall_undefined: bool,
}

impl ChunkScore {
    fn from_counts(correct: usize, proposed: usize, gold: usize, beta: f64) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(correct, proposed);
        let recall = ratio(correct, gold);
        ChunkScore {
            precision,
            recall,
            f: f_beta(precision, recall, beta),
            correct,
            proposed,
            gold,
            precision_undefined: proposed == 0,
            recall_undefined: gold == 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub beta: f64,
    pub tokens: usize,
    pub token_accuracy: f64,
    pub overall: ChunkScore,
    pub per_type: BTreeMap<String, ChunkScore>,
}

impl EvalReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Fixed-width table, percentages with two decimals; accuracy is only
    /// defined for the overall row.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let f_name = if self.beta == 1.0 { "F1".to_string() } else { format!("F({})", self.beta) };
        writeln!(out, "{:>10} {:>9} {:>10} {:>8} {:>7}", "Chunk Type", "Accuracy", "Precision", "Recall", f_name).unwrap();
        let row = |out: &mut String, name: &str, acc: Option<f64>, s: &ChunkScore| {
            let acc = acc.map_or("-".to_string(), |a| format!("{:.2}", 100.0 * a));
            writeln!(
                out,
                "{:>10} {:>9} {:>10.2} {:>8.2} {:>7.2}",
                name,
                acc,
                100.0 * s.precision,
                100.0 * s.recall,
                100.0 * s.f
            )
            .unwrap();
        };
        row(&mut out, "Overall", Some(self.token_accuracy), &self.overall);
        for (name, s) in &self.per_type {
            row(&mut out, name, None, s);
        }
        out
    }
}

/// Chunk-level evaluation of aligned tag sequences, one per sentence. A
/// proposed chunk is correct when type, start and end all match.
pub fn chunk_prf<S: AsRef<[ChunkTag]>>(pred: &[S], gold: &[S], beta: f64) -> Result<EvalReport> {
    if pred.len() != gold.len() {
        return Err(Error::LengthMismatch { predicted: pred.len(), gold: gold.len() });
    }
    let mut counts: BTreeMap<String, [usize; 3]> = BTreeMap::new();
    let (mut tokens, mut right) = (0usize, 0usize);
    for (p, g) in pred.iter().zip(gold) {
        let (p, g) = (p.as_ref(), g.as_ref());
        if p.len() != g.len() {
            return Err(Error::LengthMismatch { predicted: p.len(), gold: g.len() });
        }
        tokens += g.len();
        right += p.iter().zip(g).filter(|(a, b)| a == b).count();
        let pc = extract_chunks(p);
        let gc = extract_chunks(g);
        let gold_set: HashSet<_> = gc.iter().collect();
        for c in &pc {
            let e = counts.entry(c.phrase_type.clone()).or_default();
            e[1] += 1;
            if gold_set.contains(c) {
                e[0] += 1;
            }
        }
        for c in &gc {
            counts.entry(c.phrase_type.clone()).or_default()[2] += 1;
        }
    }
    let total = counts.values().fold([0; 3], |a, c| [a[0] + c[0], a[1] + c[1], a[2] + c[2]]);
    Ok(EvalReport {
        beta,
        tokens,
        token_accuracy: if tokens == 0 { 0.0 } else { right as f64 / tokens as f64 },
        overall: ChunkScore::from_counts(total[0], total[1], total[2], beta),
        per_type: counts
            .into_iter()
            .map(|(k, c)| (k, ChunkScore::from_counts(c[0], c[1], c[2], beta)))
            .collect(),
    })
}

/// Entropy of a distribution in bits.
pub fn entropy(d: &ClassDistribution) -> f64 {
    d.entropy()
}

/// Mean `-log2 p(gold)` over tokens. Every token needs a distribution that
/// gives its gold tag non-zero probability.
pub fn cross_entropy<'a, I>(tokens: I) -> Result<f64>
where
    I: IntoIterator<Item = (Option<&'a ClassDistribution>, TagId)>,
{
    let (mut sum, mut n) = (0.0, 0usize);
    for (i, (d, gold)) in tokens.into_iter().enumerate() {
        let d = d.ok_or(Error::MissingDistribution(i))?;
        let p = d.get(gold);
        if p <= 0.0 {
            return Err(Error::ZeroProbability(i));
        }
        sum -= p.log2();
        n += 1;
    }
    if n == 0 {
        return Err(Error::InvalidArgument("cross entropy of zero tokens".into()));
    }
    Ok(sum / n as f64)
}

/// `2^h`.
pub fn perplexity(h: f64) -> f64 {
    h.exp2()
}

/// What the rejection curves need to know about one prediction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Outcome {
    pub entropy: f64,
    pub max_prob: f64,
    pub correct: bool,
}

impl Outcome {
    pub fn new(d: &ClassDistribution, predicted: TagId, gold: TagId) -> Self {
        Outcome { entropy: d.entropy(), max_prob: d.max_prob(), correct: predicted == gold }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RejectionPoint {
    /// Rejected percentage (batch) or probability threshold (online).
    pub x: f64,
    /// Accuracy on the kept tokens; `None` when nothing is kept.
    pub accuracy: Option<f64>,
    pub kept: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RejectionCurve {
    pub points: Vec<RejectionPoint>,
}

impl RejectionCurve {
    /// `x,accuracy,kept`; points with nothing kept are left out.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,accuracy,kept\n");
        for p in &self.points {
            if let Some(a) = p.accuracy {
                writeln!(out, "{},{},{}", p.x, a, p.kept).unwrap();
            }
        }
        out
    }
}

fn accuracy_of<'a>(kept: impl Iterator<Item = &'a Outcome>) -> (Option<f64>, usize) {
    let (mut n, mut right) = (0usize, 0usize);
    for o in kept {
        n += 1;
        right += o.correct as usize;
    }
    ((n > 0).then(|| right as f64 / n as f64), n)
}

/// Rejection percentages 0, 5, ..., 95.
pub fn default_rejection_grid() -> Vec<f64> {
    (0..20).map(|i| 5.0 * i as f64).collect()
}

/// Probability thresholds 0, 0.05, ..., 1.
pub fn default_thresholds() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

/// For each percentage, rejects that share of tokens (rounded down),
/// highest entropy first, and reports accuracy on the rest. Equal entropies
/// are rejected in input order.
pub fn rejection_batch(outcomes: &[Outcome], percentages: &[f64]) -> Result<RejectionCurve> {
    if let Some(p) = percentages.iter().find(|p| !(0.0..=100.0).contains(*p)) {
        return Err(Error::InvalidArgument(format!("rejection percentage {p} outside [0, 100]")));
    }
    let mut order: Vec<usize> = (0..outcomes.len()).collect();
    order.sort_by(|&a, &b| outcomes[b].entropy.total_cmp(&outcomes[a].entropy));
    let points = percentages
        .iter()
        .map(|&pct| {
            let rejected = (pct / 100.0 * outcomes.len() as f64).floor() as usize;
            let (accuracy, kept) = accuracy_of(order[rejected..].iter().map(|&i| &outcomes[i]));
            RejectionPoint { x: pct, accuracy, kept }
        })
        .collect();
    Ok(RejectionCurve { points })
}

/// For each threshold keeps the tokens whose most likely tag has
/// probability at least that high.
pub fn rejection_online(outcomes: &[Outcome], thresholds: &[f64]) -> RejectionCurve {
    let points = thresholds
        .iter()
        .map(|&theta| {
            let (accuracy, kept) = accuracy_of(outcomes.iter().filter(|o| o.max_prob >= theta));
            RejectionPoint { x: theta, accuracy, kept }
        })
        .collect();
    RejectionCurve { points }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tags(s: &str) -> Vec<ChunkTag> {
        s.split_whitespace().map(|t| t.parse().unwrap()).collect()
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(token_accuracy(&[1, 2, 3], &[1, 2, 3]).unwrap(), 1.0);
        assert_eq!(token_accuracy(&[1, 2], &[3, 4]).unwrap(), 0.0);
        assert_eq!(token_accuracy(&[1, 1, 1, 1, 1, 1, 1, 0], &[1; 8]).unwrap(), 0.875);
        assert!(token_accuracy(&[1], &[1, 2]).is_err());
    }

    #[test]
    fn f1_of_overall_row() {
        let f = f_beta(92.02, 92.50, 1.0);
        assert!((f - 92.26).abs() <= 0.005, "{f}");
    }

    #[test]
    fn ap_green_with_one_miss() {
        let gold = tags("B-NP I-NP B-ADVP B-VP B-NP I-NP B-ADJP O");
        let pred = tags("B-NP I-NP B-ADVP B-VP B-NP I-NP O O");
        let r = chunk_prf(&[pred], &[gold], 1.0).unwrap();
        assert_eq!(r.overall.precision, 1.0);
        assert_eq!(r.overall.recall, 0.8);
        assert!((r.overall.f - 8.0 / 9.0).abs() < 1e-15);
        let adjp = &r.per_type["ADJP"];
        assert_eq!((adjp.precision, adjp.recall), (0.0, 0.0));
        assert!(adjp.precision_undefined && !adjp.recall_undefined);
        assert_eq!(r.token_accuracy, 0.875);
    }

    #[test]
    fn perfect_prediction() {
        let gold = tags("B-NP I-NP B-VP O B-PP B-NP");
        let r = chunk_prf(&[gold.clone()], &[gold], 1.0).unwrap();
        for s in r.per_type.values().chain([&r.overall]) {
            assert_eq!((s.precision, s.recall, s.f), (1.0, 1.0, 1.0));
        }
    }

    #[test]
    fn boundary_mismatch_is_wrong() {
        let gold = tags("B-NP I-NP I-NP");
        let pred = tags("B-NP I-NP B-NP");
        let r = chunk_prf(&[pred], &[gold], 1.0).unwrap();
        assert_eq!(r.overall.correct, 0);
        assert_eq!((r.overall.proposed, r.overall.gold), (2, 1));
    }

    #[test]
    fn report_table_lists_overall_first() {
        let gold = tags("B-NP I-NP B-VP");
        let r = chunk_prf(&[gold.clone()], &[gold], 1.0).unwrap();
        let t = r.to_table();
        let lines: Vec<&str> = t.lines().collect();
        assert!(lines[1].trim_start().starts_with("Overall"));
        assert!(lines[1].contains("100.00"));
        assert!(lines[2].trim_start().starts_with("NP"));
    }

    #[test]
    fn cross_entropy_examples() {
        let d = |p: Vec<f64>| ClassDistribution::new(p).unwrap();
        let half = d(vec![0.5, 0.5]);
        let quarter = d(vec![0.25, 0.75]);
        let h = cross_entropy([(Some(&half), TagId(0)), (Some(&quarter), TagId(0))]).unwrap();
        assert_eq!(h, 1.5);
        let one = ClassDistribution::delta(3, TagId(1));
        assert_eq!(cross_entropy([(Some(&one), TagId(1))]).unwrap(), 0.0);
        let u = ClassDistribution::uniform(5);
        assert!((cross_entropy([(Some(&u), TagId(3))]).unwrap() - 5f64.log2()).abs() < 1e-12);
        assert!(matches!(cross_entropy([(Some(&one), TagId(0))]), Err(Error::ZeroProbability(0))));
        assert!(matches!(cross_entropy([(Some(&one), TagId(1)), (None, TagId(0))]), Err(Error::MissingDistribution(1))));
    }

    #[test]
    fn perplexity_examples() {
        assert_eq!(perplexity(0.0), 1.0);
        assert_eq!(perplexity(1.0), 2.0);
        assert!((perplexity(0.2580) - 1.19581).abs() < 1e-5);
    }

    fn outcome(entropy: f64, max_prob: f64, correct: bool) -> Outcome {
        Outcome { entropy, max_prob, correct }
    }

    #[test]
    fn batch_rejection_hand_sorted() {
        let o = [outcome(1.0, 0.5, false), outcome(0.1, 0.9, true), outcome(0.9, 0.5, false), outcome(0.0, 1.0, true)];
        let c = rejection_batch(&o, &[0.0, 50.0]).unwrap();
        assert_eq!(c.points[0].accuracy, Some(0.5));
        assert_eq!(c.points[1].accuracy, Some(1.0));
        assert_eq!(c.points[1].kept, 2);
        assert!(rejection_batch(&o, &[120.0]).is_err());
    }

    #[test]
    fn batch_rejection_with_equal_entropies_is_flat() {
        let o: Vec<_> = (0..10).map(|i| outcome(0.3, 0.8, i % 3 == 0)).collect();
        let c = rejection_batch(&o, &default_rejection_grid()).unwrap();
        assert_eq!(c.points[0].accuracy, Some(0.4));
        let same: Vec<_> = (0..10).map(|_| outcome(0.3, 0.8, true)).collect();
        let c = rejection_batch(&same, &default_rejection_grid()).unwrap();
        assert!(c.points.iter().all(|p| p.accuracy == Some(1.0)));
    }

    #[test]
    fn online_rejection_examples() {
        let o = [outcome(0.2, 0.9, true), outcome(0.8, 0.6, false), outcome(1.2, 0.4, true)];
        let c = rejection_online(&o, &[0.0, 0.5, 1.0 + 1e-9]);
        assert_eq!(c.points[0].kept, 3);
        assert_eq!(c.points[0].accuracy, Some(2.0 / 3.0));
        assert_eq!(c.points[1].kept, 2);
        assert_eq!(c.points[2].kept, 0);
        assert_eq!(c.points[2].accuracy, None);
        assert_eq!(c.to_csv().lines().count(), 3);
    }

    fn arb_tags() -> impl Strategy<Value = Vec<ChunkTag>> {
        prop::collection::vec(
            prop_oneof![
                Just(ChunkTag::outside()),
                Just(ChunkTag::begin("NP")),
                Just(ChunkTag::inside("NP")),
                Just(ChunkTag::begin("VP")),
                Just(ChunkTag::inside("VP")),
            ],
            1..12,
        )
    }

    proptest! {
        #[test]
        fn f_equals_p_when_p_equals_r(p in 0.0f64..=1.0, beta in prop_oneof![Just(0.5), Just(1.0), Just(2.0)]) {
            prop_assert!((f_beta(p, p, beta) - p).abs() <= 1e-15);
        }

        #[test]
        fn precision_and_recall_swap(a in arb_tags(), b in arb_tags()) {
            let n = a.len().min(b.len());
            let (a, b) = (a[..n].to_vec(), b[..n].to_vec());
            let ab = chunk_prf(&[a.clone()], &[b.clone()], 1.0).unwrap();
            let ba = chunk_prf(&[b], &[a], 1.0).unwrap();
            prop_assert_eq!(ab.overall.precision, ba.overall.recall);
            prop_assert_eq!(ab.overall.recall, ba.overall.precision);
            let sum: usize = ab.per_type.values().map(|s| s.correct).sum();
            prop_assert_eq!(sum, ab.overall.correct);
            for s in ab.per_type.values().chain([&ab.overall]) {
                prop_assert!((0.0..=1.0).contains(&s.precision) && (0.0..=1.0).contains(&s.recall));
            }
        }

        #[test]
        fn perplexity_is_two_to_the_h(h in 0.0f64..8.0) {
            prop_assert_eq!(perplexity(h), 2f64.powf(h));
        }

        #[test]
        fn online_kept_is_monotone(probs in prop::collection::vec((0.0f64..1.0, any::<bool>()), 0..50)) {
            let o: Vec<_> = probs.iter().map(|&(p, c)| outcome(0.0, p, c)).collect();
            let c = rejection_online(&o, &default_thresholds());
            prop_assert!(c.points.windows(2).all(|w| w[0].kept >= w[1].kept));
        }

        #[test]
        fn batch_at_zero_is_accuracy(data in prop::collection::vec((0.0f64..3.0, any::<bool>()), 1..50)) {
            let o: Vec<_> = data.iter().map(|&(h, c)| outcome(h, 0.5, c)).collect();
            let c = rejection_batch(&o, &[0.0]).unwrap();
            let acc = data.iter().filter(|d| d.1).count() as f64 / data.len() as f64;
            prop_assert_eq!(c.points[0].accuracy, Some(acc));
        }

        #[test]
        fn cross_entropy_is_non_negative(ps in prop::collection::vec(0.01f64..=1.0, 1..20)) {
            let ds: Vec<_> = ps.iter().map(|&p| {
                let mut v = vec![p, 1.0 - p];
                if p == 1.0 { v[1] = 0.0; }
                ClassDistribution::new(v).unwrap()
            }).collect();
            let h = cross_entropy(ds.iter().map(|d| (Some(d), TagId(0)))).unwrap();
            prop_assert!(h >= 0.0);
            prop_assert_eq!(h == 0.0, ps.iter().all(|&p| p == 1.0));
        }
    }
}
