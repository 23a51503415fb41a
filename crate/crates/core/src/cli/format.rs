//! JSON documents for matrices and chains. Every entry is a rational literal
//! string (`"p/q"` or an integer), never a float.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmat::{Rat, RatMatrix};
use crate::sse::{EsseStep, SseChain};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<String>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &RatMatrix) -> MatrixFile {
        MatrixFile {
            rows: m.rows(),
            cols: m.cols(),
            entries: (0..m.rows()).map(|i| m.row(i).iter().map(Rat::to_string).collect()).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<RatMatrix> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::dim(format!("declared shape {}x{} is empty", self.rows, self.cols)));
        }
        if self.entries.len() != self.rows {
            return Err(Error::dim(format!("declared {} rows, found {}", self.rows, self.entries.len())));
        }
        let mut data = Vec::with_capacity(self.rows * self.cols);
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != self.cols {
                return Err(Error::dim(format!("row {i} has {} entries, declared {}", row.len(), self.cols)));
            }
            for lit in row {
                data.push(lit.parse::<Rat>()?);
            }
        }
        RatMatrix::new(self.rows, self.cols, data)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepFile {
    #[serde(rename = "A")]
    pub a: MatrixFile,
    #[serde(rename = "B")]
    pub b: MatrixFile,
    #[serde(rename = "U")]
    pub u: MatrixFile,
    #[serde(rename = "V")]
    pub v: MatrixFile,
}

/// A similarity `X start X^-1 = target`, carried by same-size results.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimilarityFile {
    pub witness: MatrixFile,
    pub target: MatrixFile,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFile {
    pub description: String,
    /// Required when `steps` is empty; otherwise must equal the first `A`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<MatrixFile>,
    pub steps: Vec<StepFile>,
    pub declared_lag: usize,
    pub declared_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub similarity: Option<SimilarityFile>,
}

impl ChainFile {
    pub fn from_chain(description: impl Into<String>, chain: &SseChain) -> ChainFile {
        ChainFile {
            description: description.into(),
            start: Some(MatrixFile::from_matrix(chain.start())),
            steps: chain
                .steps
                .iter()
                .map(|s| StepFile {
                    a: MatrixFile::from_matrix(&s.a),
                    b: MatrixFile::from_matrix(&s.b),
                    u: MatrixFile::from_matrix(&s.u),
                    v: MatrixFile::from_matrix(&s.v),
                })
                .collect(),
            declared_lag: chain.lag(),
            declared_size: chain.size(),
            similarity: None,
        }
    }

    pub fn to_chain(&self) -> Result<SseChain> {
        let mut steps = Vec::with_capacity(self.steps.len());
        for (k, s) in self.steps.iter().enumerate() {
            let parse = |m: &MatrixFile, name: &str| {
                m.to_matrix().map_err(|e| match e {
                    Error::Dimension(msg) => Error::dim(format!("step {} {name}: {msg}", k + 1)),
                    other => other,
                })
            };
            steps.push(EsseStep::new(parse(&s.a, "A")?, parse(&s.b, "B")?, parse(&s.u, "U")?, parse(&s.v, "V")?));
        }
        match (&self.start, steps.is_empty()) {
            (Some(m), _) => {
                let start = m.to_matrix()?;
                let mut chain = SseChain::trivial(start);
                chain.steps = steps;
                Ok(chain)
            }
            (None, false) => Ok(SseChain::from_steps(steps).expect("nonempty")),
            (None, true) => Err(Error::dim("chain with no steps needs a start matrix")),
        }
    }
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, String> {
    serde_json::from_str(text).map_err(|e| e.to_string())
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let m = RatMatrix::from_scaled_ints(&[[7, 2, 1], [2, 7, 1], [2, 2, 6]], 10);
        let f = MatrixFile::from_matrix(&m);
        assert_eq!(f.entries[0], vec!["7/10", "1/5", "1/10"]);
        let text = to_json(&f);
        let back: MatrixFile = parse_json(&text).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.to_matrix().unwrap(), m);
    }

    #[test]
    fn bad_documents() {
        let f = MatrixFile { rows: 1, cols: 2, entries: vec![vec!["1".into(), "1/0".into()]] };
        assert!(matches!(f.to_matrix(), Err(Error::Parse(_))));
        let f = MatrixFile { rows: 2, cols: 1, entries: vec![vec!["1".into()]] };
        assert!(matches!(f.to_matrix(), Err(Error::Dimension(_))));
        assert!(parse_json::<MatrixFile>(r#"{"rows": 1, "cols": 1, "entries": [[0.5]]}"#).is_err());
        assert!(parse_json::<MatrixFile>(r#"{"rows": 1, "cols": 1, "entries": [["1"]], "x": 1}"#).is_err());
    }

    #[test]
    fn chain_round_trip() {
        let step = crate::sse::column_split(&RatMatrix::from_int_rows(&[[1]]), 0, &Rat::ratio(1, 2)).unwrap();
        let chain = SseChain::from_steps(vec![step]).unwrap();
        let file = ChainFile::from_chain("split of [[1]]", &chain);
        let back: ChainFile = parse_json(&to_json(&file)).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_chain().unwrap(), chain);
        assert_eq!((file.declared_lag, file.declared_size), (1, 2));

        let lone = ChainFile { start: None, steps: vec![], ..file };
        assert!(lone.to_chain().is_err());
    }
}
