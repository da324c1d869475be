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


use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tbldt::corpus::Corpus;
use tbldt::rules::{most_ambiguous_words, Field};
use tbldt::trainer::RuleList;
use tempfile::TempDir;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    /// Fresh directory with a synthetic train/test pair.
    fn new() -> Workspace {
        let ws = Workspace { dir: tempfile::tempdir().unwrap() };
        ws.ok(&["synth", "--sentences", "200", "--seed", "11", "--out", "train.txt"]);
        ws.ok(&["synth", "--sentences", "40", "--seed", "12", "--out", "test.txt"]);
        ws
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_tbldt")).args(args).current_dir(self.dir.path()).output().unwrap()
    }

    fn status(&self, args: &[&str]) -> i32 {
        self.run(args).status.code().unwrap()
    }

    fn ok(&self, args: &[&str]) -> Output {
        let out = self.run(args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        out
    }

    fn read(&self, name: &str) -> String {
        fs::read_to_string(self.path(name)).unwrap()
    }

    /// Trains, converts with growth and decodes the test set.
    fn pipeline(&self, workers: &str, tag: &str) -> Vec<String> {
        let rules = format!("{tag}.rules");
        let tree = format!("{tag}.json");
        let pred = format!("{tag}.pred");
        let batch = format!("{tag}.batch.csv");
        let online = format!("{tag}.online.csv");
        self.ok(&["--workers", workers, "train", "--train", "train.txt", "--out", &rules]);
        self.ok(&["--workers", workers, "convert", "--model", &rules, "--train", "train.txt", "--out", &tree, "--grow"]);
        self.ok(&["--workers", workers, "decode", "--model", &rules, "--tree", &tree, "--input", "test.txt", "--out", &pred]);
        self.ok(&["--workers", workers, "curves", "--pred", &pred, "--kind", "batch", "--out", &batch]);
        self.ok(&["--workers", workers, "curves", "--pred", &pred, "--kind", "online", "--out", &online]);
        [rules, format!("{tag}.rules.log.json"), tree, pred, batch, online].iter().map(|f| self.read(f)).collect()
    }
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let ws = Workspace::new();
    let one = ws.pipeline("1", "a");
    let four = ws.pipeline("4", "b");
    assert_eq!(one, four);
    assert_eq!(ws.pipeline("1", "c"), one);
}

#[test]
fn manifest_reruns_to_identical_outputs() {
    let ws = Workspace::new();
    let before = ws.pipeline("2", "m");
    for f in ["m.rules", "m.rules.log.json", "m.json", "m.pred", "m.batch.csv", "m.online.csv"] {
        fs::remove_file(ws.path(f)).unwrap();
    }
    for m in ["m.rules", "m.json", "m.pred", "m.batch.csv", "m.online.csv"] {
        ws.ok(&["rerun", &format!("{m}.manifest.json")]);
    }
    let after: Vec<String> =
        ["m.rules", "m.rules.log.json", "m.json", "m.pred", "m.batch.csv", "m.online.csv"].iter().map(|f| ws.read(f)).collect();
    assert_eq!(before, after);
}

#[test]
fn oracle_mode_passes_equivalence_and_pruned_tree_fails_it() {
    let ws = Workspace::new();
    ws.ok(&["train", "--train", "train.txt", "--out", "m.rules"]);
    ws.ok(&["convert", "--model", "m.rules", "--train", "train.txt", "--out", "k0.json", "--k", "0", "--no-grow"]);
    let out = ws.ok(&["check-equivalence", "--model", "m.rules", "--tree", "k0.json", "--corpus", "train.txt", "--out", "eq.json"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("tokens agree"));
    let report: serde_json::Value = serde_json::from_str(&ws.read("eq.json")).unwrap();
    assert_eq!(report["tokens"], report["agree"]);
    ws.ok(&["convert", "--model", "m.rules", "--train", "train.txt", "--out", "k50.json", "--k", "50", "--no-grow"]);
    assert_eq!(ws.status(&["check-equivalence", "--model", "m.rules", "--tree", "k50.json", "--corpus", "train.txt"]), 1);
}

#[test]
fn exit_codes() {
    let ws = Workspace::new();
    assert_eq!(ws.status(&["train", "--train", "missing.txt", "--out", "x.rules"]), 2);
    assert!(!ws.path("x.rules.manifest.json").exists());
    assert_eq!(ws.status(&["train", "--train", "train.txt"]), 2);
    assert_eq!(ws.status(&["train", "--train", "train.txt", "--out", "x.rules", "--threshold", "0"]), 2);
    assert_eq!(ws.status(&["frobnicate"]), 2);
    fs::write(ws.path("bad.txt"), "only two\n").unwrap();
    assert_eq!(ws.status(&["train", "--train", "bad.txt", "--out", "x.rules"]), 1);

    ws.ok(&["train", "--train", "train.txt", "--out", "m.rules"]);
    assert_eq!(ws.status(&["decode", "--model", "m.rules", "--input", "test.txt"]), 2);
    ws.ok(&["decode", "--model", "m.rules", "--input", "test.txt", "--mode", "rules", "--out", "r.pred"]);
    // Label-only predictions carry no distributions.
    assert_eq!(ws.status(&["eval", "--pred", "r.pred", "--cross-entropy"]), 1);
    assert_eq!(ws.status(&["curves", "--pred", "r.pred", "--kind", "batch"]), 1);
    ws.ok(&["eval", "--pred", "r.pred"]);
    assert_eq!(ws.status(&["eval", "--pred", "r.pred", "--gold", "train.txt"]), 1);
}

#[test]
fn eval_reports_overall_and_cross_entropy() {
    let ws = Workspace::new();
    ws.ok(&["train", "--train", "train.txt", "--out", "m.rules"]);
    ws.ok(&["convert", "--model", "m.rules", "--train", "train.txt", "--out", "t.json"]);
    ws.ok(&["decode", "--model", "m.rules", "--tree", "t.json", "--input", "test.txt", "--out", "p.pred"]);
    let table = String::from_utf8(ws.ok(&["eval", "--pred", "p.pred", "--gold", "test.txt"]).stdout).unwrap();
    assert!(table.lines().nth(1).unwrap().trim_start().starts_with("Overall"));
    assert!(table.contains("cross entropy"));
    ws.ok(&["eval", "--pred", "p.pred", "--format", "json", "--out", "e.json"]);
    let v: serde_json::Value = serde_json::from_str(&ws.read("e.json")).unwrap();
    let h = v["cross_entropy"].as_f64().unwrap();
    assert!((v["perplexity"].as_f64().unwrap() - h.exp2()).abs() < 1e-12);
    let f = v["overall"]["f"].as_f64().unwrap();
    assert!(f > 0.5 && f <= 1.0);
}

#[test]
fn config_file_sets_defaults_and_flags_override() {
    let ws = Workspace::new();
    ws.ok(&["train", "--train", "train.txt", "--out", "m.rules"]);
    fs::write(ws.path("run.cfg"), "# oracle\nK = 0\ngrow = false\nt1 = 10\n").unwrap();
    ws.ok(&["convert", "--config", "run.cfg", "--model", "m.rules", "--train", "train.txt", "--out", "a.json"]);
    let m: serde_json::Value = serde_json::from_str(&ws.read("a.json.manifest.json")).unwrap();
    assert_eq!((m["k"].as_u64(), m["no_grow"].as_bool()), (Some(0), Some(true)));
    ws.ok(&["convert", "--config", "run.cfg", "--model", "m.rules", "--train", "train.txt", "--out", "b.json", "--k", "3"]);
    let m: serde_json::Value = serde_json::from_str(&ws.read("b.json.manifest.json")).unwrap();
    assert_eq!(m["k"].as_u64(), Some(3));
    fs::write(ws.path("typo.cfg"), "kk = 3\n").unwrap();
    assert_eq!(ws.status(&["convert", "--config", "typo.cfg", "--model", "m.rules", "--train", "train.txt", "--out", "c.json"]), 2);
}

fn word_atoms(rules: &Path) -> Vec<String> {
    let list = RuleList::parse(&fs::read_to_string(rules).unwrap()).unwrap();
    list.rules
        .iter()
        .flat_map(|r| r.predicate.atoms().to_vec())
        .filter(|a| a.feature.field == Field::Word)
        .map(|a| a.value)
        .collect()
}

#[test]
fn lexicon_limit_restricts_word_atoms() {
    let ws = Workspace::new();
    ws.ok(&["train", "--train", "train.txt", "--out", "full.rules", "--threshold", "1"]);
    ws.ok(&["train", "--train", "train.txt", "--out", "lex.rules", "--threshold", "1", "--lexicon-limit", "10"]);
    assert!(!word_atoms(&ws.path("full.rules")).is_empty());
    let corpus = Corpus::parse(&ws.read("train.txt")).unwrap();
    let allowed = most_ambiguous_words(&corpus, 10);
    for w in word_atoms(&ws.path("lex.rules")) {
        assert!(allowed.contains(&w) || w == Field::Word.boundary(), "{w}");
    }
}

#[test]
fn active_learning_curve() {
    let ws = Workspace::new();
    let args = ["al", "--train", "train.txt", "--test", "test.txt", "--t1", "20", "--t2", "30", "--budget-sentences", "80"];
    ws.ok(&[&args[..], &["--out", "e.csv"]].concat());
    ws.ok(&[&args[..], &["--mode", "sequential", "--out", "s.csv"]].concat());
    let e = ws.read("e.csv");
    let s = ws.read("s.csv");
    assert!(e.starts_with("labeled_words,f1,accuracy,mode,round\n"));
    assert_eq!(e.lines().count(), 4);
    // The seed set is shared, so round 0 agrees.
    let first = |t: &str| t.lines().nth(1).unwrap().rsplit_once(',').unwrap().0.rsplit_once(',').unwrap().0.to_string();
    assert_eq!(first(&e), first(&s));
    assert!(s.lines().nth(1).unwrap().ends_with(",sequential,0"));
}

#[test]
fn grow_continues_a_converted_tree() {
    let ws = Workspace::new();
    ws.ok(&["train", "--train", "train.txt", "--out", "m.rules"]);
    ws.ok(&["convert", "--model", "m.rules", "--train", "train.txt", "--out", "base.json", "--no-grow"]);
    ws.ok(&["grow", "--model", "m.rules", "--tree", "base.json", "--train", "train.txt", "--out", "g.json", "--trace", "g.trace.json"]);
    ws.ok(&["convert", "--model", "m.rules", "--train", "train.txt", "--out", "direct.json", "--grow"]);
    assert_eq!(ws.read("g.json"), ws.read("direct.json"));
    let trace: serde_json::Value = serde_json::from_str(&ws.read("g.trace.json")).unwrap();
    let losses: Vec<f64> = trace["mean_log_loss"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!(losses.windows(2).all(|w| w[1] <= w[0]));
    ws.ok(&["grow", "--model", "m.rules", "--tree", "base.json", "--train", "train.txt", "--out", "g2.json", "--max-splits", "2"]);
    assert_ne!(ws.read("g2.json"), ws.read("g.json"));
}
