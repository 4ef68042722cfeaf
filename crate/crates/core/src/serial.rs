//! JSON encodings for matrices, states and POVMs, the correlation CSV format,
//! and the versioned report envelope.
//!
//! Complex entries are `[re, im]` pairs in row-major order. Floats are written
//! with shortest round-trip formatting, so decode(encode(x)) is exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::{c, CMat, SubsystemShape};
use crate::qobjects::{Povm, QState};
use crate::tol::Tolerances;
use crate::tomography::CorrelationRow;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dims: Vec<usize>,
    pub entries: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMat, shape: Option<&SubsystemShape>) -> Self {
        let (dims, labels) = match shape {
            Some(s) => (s.dims.clone(), s.labels.clone()),
            None => (vec![m.rows(), m.cols()], Vec::new()),
        };
        MatrixJson {
            dims,
            entries: m.as_slice().iter().map(|z| [z.re, z.im]).collect(),
            labels,
        }
    }

    /// Square matrix whose side is the product of `dims` when labels are
    /// present, otherwise `dims = [rows, cols]`.
    pub fn to_matrix(&self) -> Result<CMat> {
        let (rows, cols) = if self.labels.is_empty() {
            match self.dims.as_slice() {
                [r, c] => (*r, *c),
                _ => {
                    return Err(Error::Parse(
                        "unlabelled matrix needs dims [rows, cols]".into(),
                    ))
                }
            }
        } else {
            let n = self.dims.iter().product();
            (n, n)
        };
        CMat::from_vec(
            rows,
            cols,
            self.entries.iter().map(|[r, i]| c(*r, *i)).collect(),
        )
    }

    pub fn shape(&self) -> Result<SubsystemShape> {
        SubsystemShape::new(&self.dims, &self.labels)
    }
}

pub fn matrix_to_json(m: &CMat) -> Result<String> {
    Ok(serde_json::to_string(&MatrixJson::from_matrix(m, None))?)
}

pub fn matrix_from_json(s: &str) -> Result<CMat> {
    serde_json::from_str::<MatrixJson>(s)?.to_matrix()
}

pub fn state_to_json(q: &QState) -> Result<String> {
    Ok(serde_json::to_string(&MatrixJson::from_matrix(
        q.rho(),
        Some(q.shape()),
    ))?)
}

pub fn state_from_json(s: &str) -> Result<QState> {
    let j: MatrixJson = serde_json::from_str(s)?;
    if j.labels.is_empty() {
        return Err(Error::Parse("state JSON needs subsystem labels".into()));
    }
    QState::new(j.to_matrix()?, j.shape()?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PovmJson {
    pub elements: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kets: Option<Vec<Vec<[f64; 2]>>>,
}

pub fn povm_to_json(p: &Povm) -> Result<String> {
    let j = PovmJson {
        elements: p
            .elements()
            .iter()
            .map(|e| MatrixJson::from_matrix(e, None))
            .collect(),
        kets: p.stored_kets().map(|ks| {
            ks.iter()
                .map(|k| k.iter().map(|z| [z.re, z.im]).collect())
                .collect()
        }),
    };
    Ok(serde_json::to_string(&j)?)
}

pub fn povm_from_json(s: &str) -> Result<Povm> {
    let j: PovmJson = serde_json::from_str(s)?;
    let elements = j
        .elements
        .iter()
        .map(MatrixJson::to_matrix)
        .collect::<Result<Vec<_>>>()?;
    let p = Povm::new(elements)?;
    match j.kets {
        Some(ks) => p.with_kets(
            ks.into_iter()
                .map(|k| k.into_iter().map(|[r, i]| c(r, i)).collect())
                .collect(),
        ),
        None => Ok(p),
    }
}

pub const CORRELATION_HEADER: &str = "a,E_I,E_X,E_Y,E_Z";

/// One line per outcome, 17 significant digits, `.` as decimal separator.
pub fn correlations_to_csv(rows: &[CorrelationRow]) -> String {
    let mut out = String::from(CORRELATION_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.outcome.to_string());
        for v in r.values {
            out.push_str(&format!(",{v:.16e}"));
        }
        out.push('\n');
    }
    out
}

pub fn correlations_from_csv(s: &str) -> Result<Vec<CorrelationRow>> {
    let mut lines = s.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == CORRELATION_HEADER => {}
        other => return Err(Error::Parse(format!("bad correlation header {other:?}"))),
    }
    lines
        .enumerate()
        .map(|(n, line)| {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 5 {
                return Err(Error::Parse(format!("line {}: expected 5 fields", n + 2)));
            }
            let outcome = fields[0]
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", n + 2)))?;
            let mut values = [0.0; 4];
            for (v, f) in values.iter_mut().zip(&fields[1..]) {
                *v = f
                    .parse()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", n + 2)))?;
            }
            Ok(CorrelationRow { outcome, values })
        })
        .collect()
}

/// Versioned wrapper around any report body.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema: u32,
    pub tolerances: Tolerances,
    #[serde(flatten)]
    pub body: T,
}

impl<T> Envelope<T> {
    pub fn new(body: T, tolerances: Tolerances) -> Self {
        Envelope {
            schema: SCHEMA_VERSION,
            tolerances,
            body,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qobjects::{adjusted_tetrahedral, full_state, AncillaRealization, Angle};
    use crate::tomography::correlations_from_povm;

    #[test]
    fn matrix_round_trip() {
        let m = crate::paulis::y().scale_real(1.0 / 3.0);
        assert_eq!(matrix_from_json(&matrix_to_json(&m).unwrap()).unwrap(), m);
    }

    #[test]
    fn state_round_trip() {
        let s = full_state(Angle::new(0.37).unwrap(), AncillaRealization::Mixed);
        let back = state_from_json(&state_to_json(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(state_to_json(&s).unwrap().contains("\"A'\""));
    }

    #[test]
    fn povm_round_trip() {
        let p = adjusted_tetrahedral(Angle::new(0.8).unwrap());
        assert_eq!(povm_from_json(&povm_to_json(&p).unwrap()).unwrap(), p);
    }

    #[test]
    fn csv_round_trip() {
        let t = Angle::new(1.3).unwrap();
        let rows = correlations_from_povm(&adjusted_tetrahedral(t), t).unwrap();
        let csv = correlations_to_csv(&rows);
        assert!(csv.starts_with("a,E_I,E_X,E_Y,E_Z\n"));
        assert_eq!(correlations_from_csv(&csv).unwrap(), rows);
    }

    #[test]
    fn csv_errors() {
        assert!(correlations_from_csv("x\n").is_err());
        assert!(correlations_from_csv("a,E_I,E_X,E_Y,E_Z\n0,1,2\n").is_err());
        assert!(correlations_from_csv("a,E_I,E_X,E_Y,E_Z\n0,1,2,zz,4\n").is_err());
    }

    #[test]
    fn envelope_has_schema() {
        #[derive(Serialize)]
        struct Body {
            value: f64,
        }
        let s = serde_json::to_string(&Envelope::new(Body { value: 1.5 }, Tolerances::default()))
            .unwrap();
        assert!(s.starts_with("{\"schema\":1,"));
        assert!(s.contains("\"value\":1.5"));
    }
}
