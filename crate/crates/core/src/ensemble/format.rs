//! Line-oriented text format for trained models.
//!
//! ```text
//! otbag-model 1
//! algorithm jdsmv
//! members 2
//! dimension 3
//! ledger <n_target_seen> <acc_f> <acc_h_1> .. <acc_h_M>
//! segment_length 50
//! segment_ledger <n_target_seen> <acc_f> <acc_h_1> .. <acc_h_M>
//! index 0 1
//! surviving 1
//! h perceptron <bias> <w_1> .. <w_d>
//! f logistic <learning_rate> <bias> <w_1> .. <w_d>
//! ```
//!
//! `ledger`, `segment_*`, `index`, `surviving` and `f` lines only appear for
//! the algorithms that use them. Member indices are 0-based. Floats are
//! written in Rust's shortest round-trip form, so loading is bit-exact.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{
    AccuracyLedger, DualModel, JdsmvModel, Model, OtBagModel, SdmvModel, SegmentIndexSets,
};
use crate::error::{Error, Result};
use crate::learners::{LearnerKind, WeakLearner};

const MAGIC: &str = "otbag-model";
const VERSION: u32 = 1;

fn member_line(out: &mut String, tag: &str, learner: &WeakLearner) {
    out.push_str(tag);
    match learner.kind() {
        LearnerKind::Perceptron => out.push_str(" perceptron"),
        LearnerKind::Logistic { learning_rate } => {
            let _ = write!(out, " logistic {learning_rate}");
        }
    }
    let _ = write!(out, " {}", learner.bias());
    for w in learner.weights() {
        let _ = write!(out, " {w}");
    }
    out.push('\n');
}

fn ledger_line(out: &mut String, tag: &str, ledger: &AccuracyLedger) {
    let _ = write!(out, "{tag} {} {}", ledger.n_target_seen, ledger.acc_f);
    for a in &ledger.acc_h {
        let _ = write!(out, " {a}");
    }
    out.push('\n');
}

fn index_line(out: &mut String, tag: &str, indices: &[usize]) {
    out.push_str(tag);
    for i in indices {
        let _ = write!(out, " {i}");
    }
    out.push('\n');
}

fn dual_lines(out: &mut String, dual: &DualModel) {
    ledger_line(out, "ledger", dual.ledger());
}

/// Renders `model` in the text format.
pub fn write_model(model: &Model) -> String {
    use crate::learners::Classifier;

    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "algorithm {}", model.algorithm_name());
    let (h, f) = match model {
        Model::OtBag(m) => (m.members(), None),
        Model::Sdmv(m) => (m.dual().h_members(), Some(m.dual().f_members())),
        Model::Jdsmv(m) => (m.dual().h_members(), Some(m.dual().f_members())),
    };
    let _ = writeln!(out, "members {}", h.len());
    let _ = writeln!(out, "dimension {}", model.dimension());
    match model {
        Model::OtBag(_) => {}
        Model::Sdmv(m) => {
            dual_lines(&mut out, m.dual());
            index_line(&mut out, "surviving", m.surviving());
        }
        Model::Jdsmv(m) => {
            dual_lines(&mut out, m.dual());
            let segs = m.segments();
            let _ = writeln!(out, "segment_length {}", segs.segment_length);
            for l in &segs.ledgers {
                ledger_line(&mut out, "segment_ledger", l);
            }
            for set in &segs.sets {
                index_line(&mut out, "index", set);
            }
        }
    }
    for m in h {
        member_line(&mut out, "h", m);
    }
    for m in f.into_iter().flatten() {
        member_line(&mut out, "f", m);
    }
    out
}

pub fn save_model(model: &Model, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(write_model(model).as_bytes())
        .map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_model(file)
}

struct Cursor {
    line: usize,
}

impl Cursor {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::BadModelFile {
            line: self.line,
            message: message.into(),
        }
    }

    fn parse<T: std::str::FromStr>(&self, token: &str) -> Result<T> {
        token
            .parse()
            .map_err(|_| self.err(format!("cannot parse {token:?}")))
    }
}

#[derive(Default)]
struct Parts {
    algorithm: Option<String>,
    members: Option<usize>,
    dimension: Option<usize>,
    ledger: Option<AccuracyLedger>,
    surviving: Option<Vec<usize>>,
    segment_length: Option<usize>,
    segment_ledgers: Vec<AccuracyLedger>,
    sets: Vec<Vec<usize>>,
    h: Vec<WeakLearner>,
    f: Vec<WeakLearner>,
}

fn parse_ledger(cur: &Cursor, tokens: &[&str], members: Option<usize>) -> Result<AccuracyLedger> {
    let members = members.ok_or_else(|| cur.err("ledger before members"))?;
    if tokens.len() != members + 2 {
        return Err(cur.err(format!("ledger needs {} counters", members + 2)));
    }
    let values = tokens
        .iter()
        .map(|t| cur.parse::<u64>(t))
        .collect::<Result<Vec<_>>>()?;
    Ok(AccuracyLedger {
        n_target_seen: values[0],
        acc_f: values[1],
        acc_h: values[2..].to_vec(),
    })
}

fn parse_member(cur: &Cursor, tokens: &[&str], dimension: Option<usize>) -> Result<WeakLearner> {
    let dimension = dimension.ok_or_else(|| cur.err("member before dimension"))?;
    let (kind, rest) = match tokens.first() {
        Some(&"perceptron") => (LearnerKind::Perceptron, &tokens[1..]),
        Some(&"logistic") => {
            let lr = tokens.get(1).ok_or_else(|| cur.err("missing learning rate"))?;
            (
                LearnerKind::Logistic {
                    learning_rate: cur.parse(lr)?,
                },
                &tokens[2..],
            )
        }
        other => return Err(cur.err(format!("unknown learner kind {other:?}"))),
    };
    if rest.len() != dimension + 1 {
        return Err(cur.err(format!(
            "expected bias and {dimension} weights, found {} values",
            rest.len()
        )));
    }
    let values = rest
        .iter()
        .map(|t| cur.parse::<f64>(t))
        .collect::<Result<Vec<_>>>()?;
    WeakLearner::from_parts(kind, values[1..].to_vec(), values[0]).map_err(|e| cur.err(e.to_string()))
}

/// Parses a model written by [`write_model`].
pub fn read_model(reader: impl Read) -> Result<Model> {
    let mut parts = Parts::default();
    let mut cur = Cursor { line: 0 };
    let mut saw_magic = false;
    for line in BufReader::new(reader).lines() {
        cur.line += 1;
        let line = line.map_err(|e| Error::io("<model>", e))?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let Some((&key, rest)) = tokens.split_first() else {
            continue;
        };
        if !saw_magic {
            if key != MAGIC || rest != [VERSION.to_string().as_str()] {
                return Err(cur.err(format!("expected header `{MAGIC} {VERSION}`")));
            }
            saw_magic = true;
            continue;
        }
        let single = || -> Result<&str> {
            match rest {
                [one] => Ok(one),
                _ => Err(cur.err(format!("`{key}` takes one value"))),
            }
        };
        match key {
            "algorithm" => parts.algorithm = Some(single()?.to_string()),
            "members" => parts.members = Some(cur.parse(single()?)?),
            "dimension" => parts.dimension = Some(cur.parse(single()?)?),
            "segment_length" => parts.segment_length = Some(cur.parse(single()?)?),
            "ledger" => parts.ledger = Some(parse_ledger(&cur, rest, parts.members)?),
            "segment_ledger" => parts
                .segment_ledgers
                .push(parse_ledger(&cur, rest, parts.members)?),
            "surviving" => {
                parts.surviving = Some(rest.iter().map(|t| cur.parse(t)).collect::<Result<_>>()?)
            }
            "index" => parts
                .sets
                .push(rest.iter().map(|t| cur.parse(t)).collect::<Result<_>>()?),
            "h" => parts.h.push(parse_member(&cur, rest, parts.dimension)?),
            "f" => parts.f.push(parse_member(&cur, rest, parts.dimension)?),
            other => return Err(cur.err(format!("unknown key `{other}`"))),
        }
    }
    if !saw_magic {
        return Err(cur.err("empty model file"));
    }
    assemble(parts, &cur)
}

fn assemble(parts: Parts, cur: &Cursor) -> Result<Model> {
    let members = parts.members.ok_or_else(|| cur.err("missing `members`"))?;
    if parts.h.len() != members {
        return Err(cur.err(format!("expected {members} h lines, found {}", parts.h.len())));
    }
    let algorithm = parts.algorithm.ok_or_else(|| cur.err("missing `algorithm`"))?;
    let wrap = |e: Error| cur.err(e.to_string());
    let dual = |h: Vec<WeakLearner>, f: Vec<WeakLearner>, ledger: Option<AccuracyLedger>| {
        let ledger = ledger.ok_or_else(|| cur.err("missing `ledger`"))?;
        DualModel::from_parts(h, f, ledger).map_err(wrap)
    };
    match algorithm.as_str() {
        "otbag" => OtBagModel::from_members(parts.h).map(Model::OtBag).map_err(wrap),
        "sdmv" => {
            let surviving = parts.surviving.ok_or_else(|| cur.err("missing `surviving`"))?;
            let dual = dual(parts.h, parts.f, parts.ledger)?;
            SdmvModel::from_parts(dual, surviving)
                .map(Model::Sdmv)
                .map_err(wrap)
        }
        "jdsmv" => {
            let segment_length = parts
                .segment_length
                .ok_or_else(|| cur.err("missing `segment_length`"))?;
            if parts.segment_ledgers.len() != parts.sets.len() + 1 {
                return Err(cur.err("need one more segment ledger than index sets"));
            }
            let dual = dual(parts.h, parts.f, parts.ledger)?;
            let segments = SegmentIndexSets {
                segment_length,
                sets: parts.sets,
                ledgers: parts.segment_ledgers,
            };
            JdsmvModel::from_parts(dual, segments)
                .map(Model::Jdsmv)
                .map_err(wrap)
        }
        other => Err(cur.err(format!("unknown algorithm `{other}`"))),
    }
}
