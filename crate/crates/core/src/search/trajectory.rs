//! JSONL files exchanged with external constructors.
//!
//! Seed routes: `{"instance_id": "...", "routes": [[0, ..., 2n+1], ...]}`,
//! one line per instance. Heatmap logits use `"logits"` in place of
//! `"routes"`.

use crate::error::Result;
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryRecord {
    pub instance_id: String,
    pub routes: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "S: Scalar")]
pub struct LogitRecord<S = f64> {
    pub instance_id: String,
    pub logits: Vec<Vec<S>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, bound = "S: Scalar")]
pub enum ExternalRecord<S = f64> {
    Trajectories(TrajectoryRecord),
    Logits(LogitRecord<S>),
}

impl<S> ExternalRecord<S> {
    pub fn instance_id(&self) -> &str {
        match self {
            ExternalRecord::Trajectories(t) => &t.instance_id,
            ExternalRecord::Logits(l) => &l.instance_id,
        }
    }
}

/// Reads every non-blank line of a JSONL stream.
pub fn read_records<S: Scalar, R: BufRead>(reader: R) -> Result<Vec<ExternalRecord<S>>> {
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

pub fn write_trajectories<W: Write>(mut writer: W, records: &[TrajectoryRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut writer, r)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_both_record_kinds() {
        let text = "{\"instance_id\":\"0\",\"routes\":[[0,1,3,4]]}\n\n{\"instance_id\":\"1\",\"logits\":[[0.5,1.0],[0.0,0.0]]}\n";
        let recs: Vec<ExternalRecord<f64>> = read_records(text.as_bytes()).unwrap();
        assert_eq!(recs.len(), 2);
        assert!(matches!(&recs[0], ExternalRecord::Trajectories(t) if t.routes[0] == vec![0, 1, 3, 4]));
        assert!(matches!(&recs[1], ExternalRecord::Logits(_)));
        assert_eq!(recs[1].instance_id(), "1");
    }

    #[test]
    fn write_then_read() {
        let recs = vec![TrajectoryRecord {
            instance_id: "a".into(),
            routes: vec![vec![0, 3], vec![0, 1, 2, 3]],
        }];
        let mut buf = Vec::new();
        write_trajectories(&mut buf, &recs).unwrap();
        let back: Vec<ExternalRecord<f64>> = read_records(buf.as_slice()).unwrap();
        assert_eq!(back, vec![ExternalRecord::Trajectories(recs[0].clone())]);
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = "{\"instance_id\":\"0\",\"routes\":[],\"extra\":1}\n";
        assert!(read_records::<f64, _>(text.as_bytes()).is_err());
    }
}
