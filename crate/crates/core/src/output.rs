//! Machine-readable results: a CSV table with columns `d,param,value,bound,pass`
//! and a JSON summary with keys `command, seed, params, results, pass`.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::error::Result;

/// One checked quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub d: usize,
    pub param: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Row {
    /// Passes iff `value ≤ bound`.
    pub fn upper(d: usize, param: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            d,
            param: param.into(),
            value,
            bound,
            pass: value <= bound,
        }
    }

    /// Passes iff `value ≥ bound`.
    pub fn lower(d: usize, param: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            d,
            param: param.into(),
            value,
            bound,
            pass: value >= bound,
        }
    }

    /// A recorded value with no bound attached; passes iff finite.
    pub fn record(d: usize, param: impl Into<String>, value: f64) -> Self {
        Self {
            d,
            param: param.into(),
            value,
            bound: f64::INFINITY,
            pass: value.is_finite(),
        }
    }

    /// How far the row misses its bound, relative to the bound's scale.
    pub fn violation(&self) -> f64 {
        if self.pass {
            return 0.0;
        }
        if !self.value.is_finite() {
            return f64::INFINITY;
        }
        (self.value - self.bound).abs() / self.bound.abs().max(1e-300)
    }
}

/// Writes the rows with a header line.
pub fn write_csv<W: Write>(out: W, rows: &[Row]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(["d", "param", "value", "bound", "pass"])?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(rows: &[Row]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// Audit record of one run.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub command: String,
    pub seed: Option<u64>,
    pub params: BTreeMap<String, serde_json::Value>,
    pub results: serde_json::Value,
    pub pass: bool,
}

impl Summary {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let rows = vec![
            Row::upper(2, "law", 1e-15, 1e-10),
            Row::lower(3, "ratio", 0.5, 0.6),
            Row::record(1, "curve", 1.25),
        ];
        let s = csv_string(&rows).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "d,param,value,bound,pass");
        assert_eq!(lines[1], "2,law,1e-15,1e-10,true");
        assert_eq!(lines[2], "3,ratio,0.5,0.6,false");
        assert_eq!(lines[3], "1,curve,1.25,inf,true");
        assert_eq!(csv_string(&[]).unwrap(), "d,param,value,bound,pass\n");
    }

    #[test]
    fn violation_measure() {
        assert_eq!(Row::upper(1, "a", 1.0, 2.0).violation(), 0.0);
        assert!((Row::upper(1, "a", 3.0, 2.0).violation() - 0.5).abs() < 1e-15);
        assert_eq!(Row::record(1, "a", f64::NAN).violation(), f64::INFINITY);
    }

    #[test]
    fn summary_keys() {
        let s = Summary {
            command: "x".into(),
            seed: Some(7),
            params: BTreeMap::from([("samples".to_string(), serde_json::json!(10))]),
            results: serde_json::json!([]),
            pass: true,
        };
        let v: serde_json::Value = serde_json::from_str(&s.to_json().unwrap()).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys.len(), 5);
        for k in ["command", "seed", "params", "results", "pass"] {
            assert!(v.get(k).is_some());
        }
    }
}
