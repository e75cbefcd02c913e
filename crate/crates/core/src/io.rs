//! JSON and CSV codecs.
//!
//! Serialized state labels are 1-based; everything in memory is 0-based.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::coupling::{Cell, Coupling};
use crate::dist::{Dist, Joint};
use crate::error::{Error, Result};
use crate::estimation::SampleSet;
use crate::inference::Verdict;
use crate::scm::{FunctionTable, Scm};

#[derive(Deserialize)]
#[serde(untagged)]
enum MarginalsDoc {
    Bare(Vec<Dist>),
    Wrapped { marginals: Vec<Dist> },
}

/// Reads `[[...], [...]]` or `{"marginals": [[...], [...]]}`.
pub fn parse_marginals(text: &str) -> Result<Vec<Dist>> {
    let doc: MarginalsDoc = serde_json::from_str(text)?;
    let m = match doc {
        MarginalsDoc::Bare(m) | MarginalsDoc::Wrapped { marginals: m } => m,
    };
    if m.is_empty() {
        return Err(Error::Parse("no marginals".into()));
    }
    Ok(m)
}

#[derive(Serialize, Deserialize)]
struct CouplingDoc {
    shape: Vec<usize>,
    cells: Vec<Cell>,
}

pub fn coupling_to_json(c: &Coupling) -> String {
    let doc = CouplingDoc {
        shape: c.shape().to_vec(),
        cells: c
            .cells()
            .iter()
            .map(|cell| Cell {
                idx: cell.idx.iter().map(|u| u + 1).collect(),
                mass: cell.mass,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("coupling serializes")
}

pub fn parse_coupling(text: &str) -> Result<Coupling> {
    let doc: CouplingDoc = serde_json::from_str(text)?;
    let mut cells = doc.cells;
    for cell in &mut cells {
        if cell.idx.contains(&0) {
            return Err(Error::Parse(format!("state labels start at 1, got cell {:?}", cell.idx)));
        }
        cell.idx.iter_mut().for_each(|u| *u -= 1);
    }
    Coupling::new(doc.shape, cells)
}

#[derive(Serialize, Deserialize)]
struct ScmDoc {
    n: usize,
    m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    y_states: Option<usize>,
    fmap: Vec<Vec<usize>>,
    px: Dist,
    pe: Dist,
}

/// `{"n", "m", "fmap", "px", "pe"}` with `fmap` an `n x m` table of 1-based
/// `Y` labels. `Y` has `n` states unless `"y_states"` says otherwise.
pub fn scm_to_json(s: &Scm) -> String {
    let f = &s.fmap;
    let doc = ScmDoc {
        n: f.x_states(),
        m: f.e_states(),
        y_states: (f.y_states() != f.x_states()).then_some(f.y_states()),
        fmap: (0..f.x_states())
            .map(|x| f.row(x).iter().map(|y| y + 1).collect())
            .collect(),
        px: s.px.clone(),
        pe: s.pe.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("scm serializes")
}

pub fn parse_scm(text: &str) -> Result<Scm> {
    let doc: ScmDoc = serde_json::from_str(text)?;
    let y_states = doc.y_states.unwrap_or(doc.n);
    if doc.fmap.len() != doc.n || doc.fmap.iter().any(|r| r.len() != doc.m) {
        return Err(Error::Parse(format!("fmap must be {}x{}", doc.n, doc.m)));
    }
    let mut values = Vec::with_capacity(doc.n * doc.m);
    for &y in doc.fmap.iter().flatten() {
        if y == 0 || y > y_states {
            return Err(Error::Parse(format!("fmap entry {y} outside 1..={y_states}")));
        }
        values.push(y - 1);
    }
    let fmap = FunctionTable::new(doc.n, doc.m, y_states, values)?;
    Scm::new(fmap, doc.px, doc.pe)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JointDoc {
    Bare(Vec<Vec<f64>>),
    Wrapped { joint: Vec<Vec<f64>> },
}

/// Reads a joint table as rows indexed by `X`: `[[...], ...]` or `{"joint": [[...], ...]}`.
pub fn parse_joint(text: &str) -> Result<Joint> {
    let doc: JointDoc = serde_json::from_str(text)?;
    let rows = match doc {
        JointDoc::Bare(r) | JointDoc::Wrapped { joint: r } => r,
    };
    Joint::from_rows(&rows)
}

/// Reads `x,y` pairs of 1-based labels. A non-numeric first line is taken as
/// a header. State counts default to the largest label seen.
pub fn read_samples_csv<R: Read>(
    reader: R,
    x_states: Option<usize>,
    y_states: Option<usize>,
) -> Result<SampleSet> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut pairs = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(Error::Parse(format!("record {} has {} fields, expected 2", line + 1, rec.len())));
        }
        let parsed = (rec[0].parse::<usize>(), rec[1].parse::<usize>());
        let (x, y) = match parsed {
            (Ok(x), Ok(y)) => (x, y),
            _ if line == 0 && rec.iter().all(|f| f.parse::<f64>().is_err()) => continue,
            _ => {
                return Err(Error::Parse(format!(
                    "record {}: expected two positive integers, got {:?}",
                    line + 1,
                    rec.iter().collect::<Vec<_>>()
                )))
            }
        };
        if x == 0 || y == 0 {
            return Err(Error::Parse(format!("record {}: state labels start at 1", line + 1)));
        }
        pairs.push((x - 1, y - 1));
    }
    if pairs.is_empty() {
        return Err(Error::EmptySamples);
    }
    let xs = x_states.unwrap_or_else(|| pairs.iter().map(|p| p.0 + 1).max().unwrap_or(0));
    let ys = y_states.unwrap_or_else(|| pairs.iter().map(|p| p.1 + 1).max().unwrap_or(0));
    SampleSet::new(xs, ys, pairs)
}

pub fn parse_samples_csv(text: &str) -> Result<SampleSet> {
    read_samples_csv(text.as_bytes(), None, None)
}

/// Writes an `x,y` header and one 1-based pair per line.
pub fn write_samples_csv<W: Write>(s: &SampleSet, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["x", "y"])?;
    for &(x, y) in s.pairs() {
        w.write_record([(x + 1).to_string(), (y + 1).to_string()])?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(())
}

pub fn verdict_to_json(v: &Verdict) -> String {
    serde_json::to_string_pretty(v).expect("verdict serializes")
}

pub fn parse_verdict(text: &str) -> Result<Verdict> {
    Ok(serde_json::from_str(text)?)
}

/// Column names matching [`verdict_csv_row`].
pub const VERDICT_CSV_HEADER: [&str; 10] = [
    "criterion",
    "direction",
    "h_exo_fwd",
    "h_exo_bwd",
    "h_x",
    "h_y",
    "max_cond_fwd",
    "max_cond_bwd",
    "threshold_used",
    "diagnostic",
];

pub fn verdict_csv_row(v: &Verdict) -> [String; 10] {
    [
        v.criterion.as_str().to_string(),
        v.direction.as_str().to_string(),
        v.h_exo_fwd.to_string(),
        v.h_exo_bwd.to_string(),
        v.h_x.to_string(),
        v.h_y.to_string(),
        v.max_cond_fwd.to_string(),
        v.max_cond_bwd.to_string(),
        v.threshold_used.map(|t| t.to_string()).unwrap_or_default(),
        v.diagnostic.clone().unwrap_or_default(),
    ]
}
